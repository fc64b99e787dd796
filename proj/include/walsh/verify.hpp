#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "walsh/operators.hpp"

namespace walsh {

enum class OutputFormat { csv, json, plot_data };

OutputFormat parse_output_format(std::string_view name);

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;      // observed quantity
    double reference = 0.0;  // what it was compared against
    std::string detail;
};

// Column data for plot-data output.
struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Report {
    std::string title;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<Check> checks;
    std::vector<Series> series;

    bool passed() const;
};

struct VerifyConfig {
    unsigned q = 6;
    unsigned p = 3;
    std::uint64_t seed = 0x5eedc0ffee2024ULL;
    double tolerance = 1e-9;
    unsigned budget = 32;  // ascent restarts
    std::optional<OperatorSpec> op;
};

inline constexpr std::string_view verify_suites[] = {"identities", "kernels", "theorem", "corollary3", "convergence"};

Report run_suite(std::string_view suite, const VerifyConfig& config);

Report verify_identities(const VerifyConfig& config);
Report verify_kernels(const VerifyConfig& config);
Report verify_theorem(const VerifyConfig& config);
Report verify_corollary3(const VerifyConfig& config);
Report verify_convergence(const VerifyConfig& config);

// diag(2, 1) on Euclidean R^2.
OperatorSpec default_theorem_operator();

enum class NormMode { delta, delta_max, mu };

NormMode parse_norm_mode(std::string_view name);

struct NormsConfig {
    NormMode mode = NormMode::delta;
    std::optional<std::uint64_t> n;  // delta modes, default 2^q
    unsigned q = 4;
    unsigned p = 3;
    std::uint64_t seed = 0x5eedc0ffee2024ULL;
    double tolerance = 1e-9;
    unsigned budget = 32;
};

Report norms_report(const OperatorSpec& T, const NormsConfig& config);

// 64-bit FNV-1a over the IEEE bytes of the samples.
std::uint64_t digest(std::span<const double> values);

std::string render(const Report& report, OutputFormat format);

}  // namespace walsh
