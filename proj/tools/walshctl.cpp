#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "walsh/kernels.hpp"
#include "walsh/operator_file.hpp"
#include "walsh/verify.hpp"
#include "walsh/walsh.hpp"

using namespace walsh;

namespace {

constexpr unsigned max_q = 24;

std::vector<double> read_samples(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", path));
    std::vector<double> out;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ss(line.substr(start));
        double v;
        std::string rest;
        if (!(ss >> v) || (ss >> rest)) throw std::runtime_error(fmt::format("{}:{}: expected one number per line", path, lineno));
        out.push_back(v);
    }
    return out;
}

void emit(const std::string& text, const std::string& out)
{
    if (out.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", out));
    f << text;
}

int cmd_wht(const std::string& input, const std::string& order_name, bool inverse, const std::string& out)
{
    const auto samples = read_samples(input);
    if (samples.empty() || !is_power_of_two(samples.size()))
        throw std::invalid_argument(fmt::format("'{}' holds {} samples; a power of two is required", input, samples.size()));
    const unsigned q = ceil_log2(samples.size());
    if (q > max_q) throw std::invalid_argument(fmt::format("input length 2^{} exceeds the 2^{} limit", q, max_q));
    const DyadicGrid grid(q);
    const auto order = parse_walsh_order(order_name);

    std::vector<double> result;
    if (inverse) {
        const auto paley = reorder_to_paley(samples, order, q);
        const auto f = ifwht(WalshCoefficients<double>{grid, paley});
        result.assign(f.values().begin(), f.values().end());
    } else {
        const auto c = fwht(StepFunction<double>(grid, samples));
        result = reorder_from_paley(c.coeffs, order, q);
    }

    std::string text = inverse ? fmt::format("# samples from {} coefficients, q = {}\n", order_name, q)
                               : fmt::format("# {} coefficients, q = {}\n", order_name, q);
    for (double v : result) text += fmt::format("{:.17g}\n", v);
    emit(text, out);
    return 0;
}

int cmd_lebesgue(unsigned p, const std::string& format_name, const std::string& out)
{
    if (p < 1 || p > 14) throw std::out_of_range("lebesgue: p must be in 1..14");
    const auto format = parse_output_format(format_name);
    const auto table = lebesgue_table(p);
    const auto m = lebesgue_max(table);
    const std::uint64_t N = std::uint64_t{1} << p;
    const auto verdict = fmt::format("{} <= {} <= {}", m.lower_bound.to_string(), m.value.to_string(), m.upper_bound.to_string());

    std::string text;
    switch (format) {
    case OutputFormat::csv:
        text = "n,L_n,decimal,running_max\n";
        for (std::uint64_t n = 1; n <= N; ++n)
            text += fmt::format("{},{},{:.17g},{}\n", n, table.at(n).to_string(), table.at(n).to_double(),
                                table.max_at(n).to_string());
        text += fmt::format("# p/8 <= L^max <= p: {} (argmax n = {}) {}\n", verdict, m.argmax, m.within_bounds ? "PASS" : "FAIL");
        break;
    case OutputFormat::json: {
        nlohmann::ordered_json j;
        j["p"] = p;
        j["rows"] = nlohmann::ordered_json::array();
        for (std::uint64_t n = 1; n <= N; ++n)
            j["rows"].push_back({{"n", n},
                                 {"L_n", table.at(n).to_string()},
                                 {"decimal", table.at(n).to_double()},
                                 {"running_max", table.max_at(n).to_string()}});
        j["max"] = {{"value", m.value.to_string()}, {"argmax", m.argmax}, {"bounds", verdict}, {"passed", m.within_bounds}};
        text = j.dump(2) + "\n";
        break;
    }
    case OutputFormat::plot_data:
        text = fmt::format("# lebesgue constants, p = {}\n# n L_n running_max\n", p);
        for (std::uint64_t n = 1; n <= N; ++n)
            text += fmt::format("{} {:.17g} {:.17g}\n", n, table.at(n).to_double(), table.max_at(n).to_double());
        text += fmt::format("# {} {}\n", verdict, m.within_bounds ? "PASS" : "FAIL");
        break;
    }
    emit(text, out);
    return m.within_bounds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Walsh series toolkit: transforms, Lebesgue constants, ideal norm estimates and verification suites."};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0x5eedc0ffee2024ULL;
    double tol = 1e-9;
    unsigned budget = 32;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", out, "Write output to this file instead of stdout");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "plot-data"}))->capture_default_str();
    };
    auto add_search = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "RNG seed (default 0x5eedc0ffee2024)")->capture_default_str();
        sub->add_option("--tol", tol, "Relative tolerance for norm comparisons")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--budget", budget, "Ascent restarts per search")->check(CLI::Range(1u, 4096u))->capture_default_str();
    };

    auto* wht = app.add_subcommand("wht", "Walsh-Hadamard transform of a data file (one sample per line, '#' comments)");
    std::string input;
    std::string order = "paley";
    bool inverse = false;
    wht->add_option("input", input, "Input data file")->required();
    wht->add_option("--order", order, "Coefficient order")->check(CLI::IsMember({"paley", "natural", "sequency"}))->capture_default_str();
    wht->add_flag("--inverse", inverse, "Input holds coefficients; reconstruct samples");
    wht->add_option("--out", out, "Write output to this file instead of stdout");

    auto* leb = app.add_subcommand("lebesgue", "Table of Lebesgue constants L_n, n <= 2^p, as exact fractions");
    unsigned p = 3;
    leb->add_option("--p", p, "Depth, 1..14")->capture_default_str();
    add_common(leb);

    auto* ver = app.add_subcommand("verify", "Run a verification suite; exit status 1 if any check fails");
    std::string suite = "identities";
    unsigned q = 6;
    std::string op_file;
    ver->add_option("--suite", suite, "identities | kernels | theorem | corollary3 | convergence")->capture_default_str();
    ver->add_option("--q", q, "Grid resolution (identities, convergence)")->check(CLI::Range(1u, max_q))->capture_default_str();
    ver->add_option("--p", p, "Depth (kernels, theorem, corollary3)")->capture_default_str();
    ver->add_option("--op", op_file, "Operator file (theorem, convergence); default diag(2,1) on Euclidean R^2");
    add_common(ver);
    add_search(ver);

    auto* norms = app.add_subcommand("norms", "Estimate delta(T|W_n,W_n), its running maximum, or mu_p(T)");
    std::string mode = "delta";
    std::uint64_t n = 0;
    unsigned nq = 4;
    norms->add_option("--op", op_file, "Operator file")->required();
    norms->add_option("--mode", mode, "delta | delta-max | mu")->check(CLI::IsMember({"delta", "delta-max", "mu"}))->capture_default_str();
    norms->add_option("--n", n, "Partial sum order (delta modes; default 2^q)");
    norms->add_option("--q", nq, "Grid resolution (delta modes)")->check(CLI::Range(1u, max_q))->capture_default_str();
    norms->add_option("--p", p, "Martingale depth (mu)")->capture_default_str();
    add_common(norms);
    add_search(norms);

    CLI11_PARSE(app, argc, argv);

    try {
        if (wht->parsed()) return cmd_wht(input, order, inverse, out);
        if (leb->parsed()) return cmd_lebesgue(p, format, out);
        if (ver->parsed()) {
            VerifyConfig cfg{q, p, seed, tol, budget, std::nullopt};
            if (!op_file.empty()) cfg.op = read_operator_file(op_file);
            const auto report = run_suite(suite, cfg);
            emit(render(report, parse_output_format(format)), out);
            return report.passed() ? 0 : 1;
        }
        if (norms->parsed()) {
            NormsConfig cfg{parse_norm_mode(mode), std::nullopt, nq, p, seed, tol, budget};
            if (norms->count("--n") > 0) cfg.n = n;
            const auto report = norms_report(read_operator_file(op_file), cfg);
            emit(render(report, parse_output_format(format)), out);
            return report.passed() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "walshctl: {}\n", e.what());
        return 2;
    }
    return 0;
}
