#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "walsh/operator_file.hpp"
#include "walsh/verify.hpp"

using namespace walsh;

namespace {

std::string run(const std::string& cmd, int* status = nullptr)
{
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    const int s = pclose(p);
    if (status) *status = WEXITSTATUS(s);
    return out;
}

std::string temp_file(const std::string& name, const std::string& content)
{
    const std::string path = std::string(WALSH_TEST_TMP) + "/" + name;
    std::ofstream(path) << content;
    return path;
}

const std::string ctl = WALSHCTL_PATH;

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("operator files")
    {
        const auto T = parse_operator(R"({"dims": [2, 3],
            "domain": {"norm": "l1_weighted", "weights": [1, 0.5, 2]},
            "codomain": {"norm": "linf"},
            "matrix": [1, 2, 3, 4, 5, 6]})");
        CHECK(T.domain().kind() == NormKind::l1_weighted);
        CHECK(T.domain().weights() == std::vector<double>{1, 0.5, 2});
        CHECK(T.codomain().dim() == 2);
        CHECK(T.matrix()(1, 0) == 4);
        const auto back = parse_operator(format_operator(T));
        CHECK(back.matrix() == T.matrix());
        CHECK(back.domain() == T.domain());
    }

    TEST_CASE("operator file diagnostics")
    {
        auto error_of = [](const std::string& text) -> OperatorFileError {
            try {
                parse_operator(text);
            } catch (const OperatorFileError& e) {
                return e;
            }
            FAIL("no error");
            return {0, 0, "", ""};
        };
        const auto missing = error_of("{\"dims\": [1, 1],\n \"domain\": {\"norm\": \"l1_weighted\"},\n \"codomain\": {\"norm\": \"linf\"}, \"matrix\": [1]}");
        CHECK(missing.field() == "domain.weights");
        CHECK(missing.line() == 2);
        const auto count = error_of("{\"dims\": [2, 2], \"domain\": {\"norm\": \"linf\"},\n\"codomain\": {\"norm\": \"linf\"},\n\"matrix\": [1, 2, 3]}");
        CHECK(count.field() == "matrix");
        CHECK(count.line() == 3);
        const auto syntax = error_of("{\"dims\": [1, 1],\n\n  \"domain\" {}}");
        CHECK(syntax.line() == 3);
        CHECK(error_of("{\"dims\": [0, 1]}").field() == "dims");
        CHECK(error_of("{\"dims\": [1, 1], \"domain\": {\"norm\": \"l7\"}}").field() == "domain.norm");
        CHECK(error_of("{\"dims\": [1, 1], \"domain\": {\"norm\": \"l1_weighted\", \"weights\": [-1]}}").field() == "domain.weights");
    }

    TEST_CASE("report rendering")
    {
        VerifyConfig cfg;
        cfg.p = 2;
        const auto r = run_suite("corollary3", cfg);
        CHECK(r.passed());
        CHECK(r.checks.size() == 4);
        const auto csv = render(r, OutputFormat::csv);
        CHECK(csv.find("report,check,status,value,reference,detail\n") != std::string::npos);
        CHECK(csv.find("# verdict = PASS") != std::string::npos);
        CHECK(render(r, OutputFormat::json).find("\"passed\": true") != std::string::npos);
        CHECK(render(r, OutputFormat::plot_data).find("# series ratios") != std::string::npos);
        CHECK_THROWS(run_suite("everything", cfg));
        CHECK_THROWS(parse_output_format("xml"));
    }

    TEST_CASE("wht command")
    {
        const auto in = temp_file("impulse.txt", "# impulse\n1\n0\n\n0\n0\n");
        CHECK(run(ctl + " wht " + in) == "# paley coefficients, q = 2\n0.25\n0.25\n0.25\n0.25\n");
        const auto c = temp_file("const.txt", "2\n2\n2\n2\n2\n2\n2\n2\n");
        CHECK(run(ctl + " wht " + c + " --order sequency") == "# sequency coefficients, q = 3\n2\n0\n0\n0\n0\n0\n0\n0\n");

        const auto data = temp_file("data.txt", "0.5\n-1.25\n3\n7\n0\n1e-3\n-2\n4.5\n");
        for (const std::string order : {"paley", "natural", "sequency"}) {
            const auto coeff = temp_file("coeff.txt", run(ctl + " wht " + data + " --order " + order));
            std::istringstream back(run(ctl + " wht " + coeff + " --inverse --order " + order));
            const double expect[] = {0.5, -1.25, 3, 7, 0, 1e-3, -2, 4.5};
            std::string line;
            std::getline(back, line);
            for (double e : expect) {
                std::getline(back, line);
                CHECK(std::abs(std::stod(line) - e) <= 1e-12);
            }
        }
        int status = 0;
        run(ctl + " wht " + temp_file("three.txt", "1\n2\n3\n") + " 2>/dev/null", &status);
        CHECK(status != 0);
        run(ctl + " wht /nonexistent/file 2>/dev/null", &status);
        CHECK(status != 0);
    }

    TEST_CASE("lebesgue command")
    {
        int status = -1;
        const auto out = run(ctl + " lebesgue --p 2", &status);
        CHECK(status == 0);
        CHECK(out.find("3,3/2,1.5,3/2\n") != std::string::npos);
        CHECK(out.find("4,1,1,3/2\n") != std::string::npos);
        CHECK(out.find("1/4 <= 3/2 <= 2") != std::string::npos);
        run(ctl + " lebesgue --p 15 2>/dev/null", &status);
        CHECK(status != 0);
    }

    TEST_CASE("verify and norms commands")
    {
        int status = -1;
        const auto th = run(ctl + " verify --suite theorem --p 3", &status);
        CHECK(status == 0);
        CHECK(th.find("# sandwich = 2 ≤ 2 ≤ 4") != std::string::npos);
        run(ctl + " verify --suite nothing 2>/dev/null", &status);
        CHECK(status != 0);

        const auto id1 = temp_file("id1.json", R"({"dims":[1,1],"domain":{"norm":"euclidean"},"codomain":{"norm":"euclidean"},"matrix":[1]})");
        const auto mu = run(ctl + " norms --op " + id1 + " --mode mu --p 4 --format json", &status);
        CHECK(status == 0);
        CHECK(mu.find("\"status\": \"exact\"") != std::string::npos);

        std::string w = "[";
        std::string m = "[";
        for (int i = 0; i < 16; ++i) {
            w += std::string(i ? "," : "") + "0.0625";
            for (int j = 0; j < 16; ++j) m += std::string(i || j ? "," : "") + (i == j ? "1" : "0");
        }
        const auto l1 = temp_file("l1.json", "{\"dims\":[16,16],\"domain\":{\"norm\":\"l1_weighted\",\"weights\":" + w +
                                                 "]},\"codomain\":{\"norm\":\"l1_weighted\",\"weights\":" + w + "]},\"matrix\":" + m + "]}");
        const auto d = run(ctl + " norms --op " + l1 + " --mode delta --n 5 --q 4", &status);
        CHECK(status == 0);
        CHECK(d.find(",1.75,1.75,") != std::string::npos);

        const auto bad = temp_file("bad.json", "{\"dims\": [1,1],\n\"domain\": {\"norm\": \"l1_weighted\"}}");
        run(ctl + " norms --op " + bad + " 2>&1", &status);
        CHECK(status == 2);
        CHECK(run(ctl + " norms --op " + bad + " 2>&1").find("line 2") != std::string::npos);
    }
}
