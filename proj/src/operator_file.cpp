#include "walsh/operator_file.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace walsh {

using nlohmann::json;

OperatorFileError::OperatorFileError(std::size_t line, std::size_t column, std::string field, const std::string& message)
    : std::runtime_error(fmt::format("operator file, line {}, column {}, field '{}': {}", line, column, field, message)),
      line_(line),
      column_(column),
      field_(std::move(field))
{
}

namespace {

struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
};

Position position_of(const std::string& text, std::size_t offset)
{
    Position p;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else {
            ++p.column;
        }
    }
    return p;
}

// Location of the first occurrence of "key" (quoted), or the document start.
Position position_of_key(const std::string& text, const std::string& key)
{
    const auto at = text.find('"' + key + '"');
    return at == std::string::npos ? Position{} : position_of(text, at);
}

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& field, const std::string& message) const
    {
        // Innermost path segment that appears in the text.
        std::string path = field;
        Position p;
        while (true) {
            const auto dot = path.rfind('.');
            const auto leaf = path.substr(dot == std::string::npos ? 0 : dot + 1);
            if (text_.find('"' + leaf + '"') != std::string::npos || dot == std::string::npos) {
                p = position_of_key(text_, leaf);
                break;
            }
            path.resize(dot);
        }
        throw OperatorFileError(p.line, p.column, field, message);
    }

    const json& member(const json& obj, const std::string& key, const std::string& path) const
    {
        if (!obj.contains(key)) fail(path, "missing required key");
        return obj.at(key);
    }

    std::vector<double> numbers(const json& arr, const std::string& path) const
    {
        if (!arr.is_array()) fail(path, "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number()) fail(path, fmt::format("entry {} is not a number", i));
            out.push_back(arr[i].get<double>());
        }
        return out;
    }

    NormedSpace space(const json& obj, const std::string& path, std::size_t dim) const
    {
        if (!obj.is_object()) fail(path, "expected an object with key 'norm'");
        const auto& tag = member(obj, "norm", path + ".norm");
        if (!tag.is_string()) fail(path + ".norm", "expected a string");
        NormKind kind;
        try {
            kind = parse_norm_kind(tag.get<std::string>());
        } catch (const std::exception& e) {
            fail(path + ".norm", e.what());
        }
        switch (kind) {
        case NormKind::euclidean:
            return NormedSpace::euclidean(dim);
        case NormKind::linf:
            return NormedSpace::linf(dim);
        case NormKind::l1_weighted: {
            if (!obj.contains("weights")) fail(path + ".weights", "weights are mandatory for l1_weighted");
            auto w = numbers(obj.at("weights"), path + ".weights");
            if (w.size() != dim) fail(path + ".weights", fmt::format("expected {} weights, got {}", dim, w.size()));
            for (double x : w)
                if (!(x > 0.0)) fail(path + ".weights", "weights must be positive");
            return NormedSpace::l1_weighted(std::move(w));
        }
        }
        fail(path, "unknown norm");
    }

private:
    const std::string& text_;
};

}  // namespace

OperatorSpec parse_operator(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto p = position_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw OperatorFileError(p.line, p.column, "<document>", e.what());
    }
    const Reader r(text);
    if (!doc.is_object()) r.fail("<document>", "expected a JSON object");

    const auto& dims_json = r.member(doc, "dims", "dims");
    const auto dims = r.numbers(dims_json, "dims");
    if (dims.size() != 2) r.fail("dims", "expected [rows, cols]");
    for (double d : dims)
        if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) r.fail("dims", "dimensions must be positive integers");
    const auto rows = static_cast<std::size_t>(dims[0]);
    const auto cols = static_cast<std::size_t>(dims[1]);

    auto domain = r.space(r.member(doc, "domain", "domain"), "domain", cols);
    auto codomain = r.space(r.member(doc, "codomain", "codomain"), "codomain", rows);

    const auto entries = r.numbers(r.member(doc, "matrix", "matrix"), "matrix");
    if (entries.size() != rows * cols)
        r.fail("matrix", fmt::format("expected {} x {} = {} entries, got {}", rows, cols, rows * cols, entries.size()));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i * cols + j];
    return OperatorSpec(std::move(domain), std::move(codomain), std::move(m));
}

OperatorSpec read_operator_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open operator file '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_operator(ss.str());
}

std::string format_operator(const OperatorSpec& T)
{
    auto space = [](const NormedSpace& s) {
        json j{{"norm", std::string(to_string(s.kind()))}};
        if (s.kind() == NormKind::l1_weighted) j["weights"] = s.weights();
        return j;
    };
    const auto& m = T.matrix();
    std::vector<double> entries;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
    json doc{{"dims", {m.rows(), m.cols()}},
             {"domain", space(T.domain())},
             {"codomain", space(T.codomain())},
             {"matrix", entries}};
    return doc.dump(2) + "\n";
}

}  // namespace walsh
