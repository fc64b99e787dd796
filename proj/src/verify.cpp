#include "walsh/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "walsh/kernels.hpp"
#include "walsh/l1_embedding.hpp"
#include "walsh/martingale.hpp"
#include "walsh/walsh.hpp"

namespace walsh {

OutputFormat parse_output_format(std::string_view name)
{
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    if (name == "plot-data") return OutputFormat::plot_data;
    throw std::invalid_argument(fmt::format("unknown output format '{}' (csv, json, plot-data)", name));
}

NormMode parse_norm_mode(std::string_view name)
{
    if (name == "delta") return NormMode::delta;
    if (name == "delta-max") return NormMode::delta_max;
    if (name == "mu") return NormMode::mu;
    throw std::invalid_argument(fmt::format("unknown norms mode '{}' (delta, delta-max, mu)", name));
}

bool Report::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

OperatorSpec default_theorem_operator()
{
    Eigen::MatrixXd m(2, 2);
    m << 2, 0, 0, 1;
    return {NormedSpace::euclidean(2), NormedSpace::euclidean(2), m};
}

std::uint64_t digest(std::span<const double> values)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return std::mt19937_64(seq);
}

StepFunction<Rational> random_rational(const DyadicGrid& grid, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::int64_t> num(-64, 64);
    std::uniform_int_distribution<std::int64_t> den(1, 8);
    StepFunction<Rational> f(grid);
    for (auto& v : f.values()) v = Rational(num(rng), den(rng));
    return f;
}

StepFunction<double> random_real(const DyadicGrid& grid, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    StepFunction<double> f(grid);
    for (auto& v : f.values()) v = normal(rng);
    return f;
}

std::string count_detail(std::uint64_t cases, std::uint64_t failures)
{
    return fmt::format("{} cases, {} failures", cases, failures);
}

Check exact_check(std::string name, std::uint64_t cases, std::uint64_t failures)
{
    return {std::move(name), failures == 0, static_cast<double>(failures), 0.0, count_detail(cases, failures)};
}

Check bounded_check(std::string name, double value, double bound, std::string detail = {})
{
    return {std::move(name), value <= bound, value, bound, std::move(detail)};
}

bool leq_rel(double a, double b, double tol) { return a <= b + tol * std::max(1.0, std::abs(b)); }

AscentOptions ascent_options(const VerifyConfig& c)
{
    AscentOptions a;
    a.seed = c.seed;
    a.restarts = std::max(1u, c.budget);
    a.tolerance = c.tolerance;
    return a;
}

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

// ---------------------------------------------------------------------------

Report verify_identities(const VerifyConfig& config)
{
    if (config.q == 0 || config.q > 12) throw std::out_of_range("identities suite requires 1 <= q <= 12");
    const DyadicGrid grid(config.q);
    const std::uint64_t N = grid.cells();
    auto rng = make_rng(config.seed, 1);
    Report r{"identities", {{"q", std::to_string(config.q)}, {"seed", std::to_string(config.seed)}}};

    {
        // w_n(s xor t) = w_n(s) w_n(t), all n, s, t.
        std::uint64_t cases = 0, bad = 0;
        for (std::uint64_t n = 0; n < N; ++n)
            for (std::uint64_t s = 0; s < N; ++s)
                for (std::uint64_t t = 0; t < N; ++t, ++cases)
                    if (walsh_value(n, s ^ t, grid) != walsh_value(n, s, grid) * walsh_value(n, t, grid)) ++bad;
        r.checks.push_back(exact_check("walsh multiplicativity w_n(s+t) = w_n(s) w_n(t)", cases, bad));
    }
    {
        std::uint64_t cases = 0, bad = 0;
        for (std::uint64_t a = 0; a < N; ++a)
            for (std::uint64_t b = 0; b < N; ++b, ++cases)
                if (walsh_eval(a, grid) * walsh_eval(b, grid) != walsh_eval(a ^ b, grid)) ++bad;
        r.checks.push_back(exact_check("walsh product w_a w_b = w_(a xor b)", cases, bad));
    }
    {
        std::uint64_t bad = 0;
        std::uniform_int_distribution<std::uint64_t> cell(0, N - 1);
        for (int i = 0; i < 100; ++i) {
            const auto f = random_rational(grid, rng);
            if (translate(f, cell(rng)).mean() != f.mean()) ++bad;
        }
        r.checks.push_back(exact_check("translation invariance of the integral", 100, bad));
    }
    {
        std::uint64_t bad = 0;
        for (std::uint64_t n = 1; n < N; ++n)
            if (dirichlet_factored(n, grid) != dirichlet(n, grid)) ++bad;
        r.checks.push_back(exact_check("kernel factorization D_n = w_n sum (D_2^(k+1) - D_2^k)", N - 1, bad));
    }
    {
        std::uint64_t bad = 0;
        const auto f = random_rational(grid, rng);
        for (unsigned i = 0; i <= config.q; ++i)
            if (conditional_expectation(f, i) != partial_sum(f, std::uint64_t{1} << i)) ++bad;
        r.checks.push_back(exact_check("span equivalence E_i = S_(2^i)", config.q + 1, bad));
    }
    {
        const auto f = random_real(grid, rng);
        const auto fast = fwht(f);
        double err = 0.0;
        for (std::uint64_t n = 0; n < N; ++n) {
            double acc = 0.0;
            for (std::uint64_t k = 0; k < N; ++k) acc += f[k] * walsh_value(n, k, grid);
            err = std::max(err, std::abs(std::ldexp(acc, -static_cast<int>(config.q)) - fast.coeffs[n]));
        }
        r.checks.push_back(bounded_check("fwht against direct summation", err, 1e-12, "max abs difference"));

        double energy = 0.0;
        for (double c : fast.coeffs) energy += c * c;
        const double ns = f.norm_squared();
        r.checks.push_back(bounded_check("parseval", std::abs(energy - ns) / ns, 1e-12, "relative difference"));

        const auto back = ifwht(fast);
        double rt = 0.0;
        for (std::uint64_t k = 0; k < N; ++k) rt = std::max(rt, std::abs(back[k] - f[k]));
        r.checks.push_back(bounded_check("inverse transform round trip", rt, 1e-12, "max abs difference"));
    }
    {
        std::uint64_t cases = 0, bad = 0;
        const std::uint64_t limit = std::min<std::uint64_t>(N, 64);
        for (std::uint64_t i = 0; i < limit; ++i) {
            const auto hi = haar(i, grid);
            for (std::uint64_t j = 0; j < limit; ++j, ++cases)
                if (haar_inner_product(hi, haar(j, grid)) != Rational(i == j ? 1 : 0)) ++bad;
        }
        r.checks.push_back(exact_check("haar orthonormality", cases, bad));
    }
    return r;
}

Report verify_kernels(const VerifyConfig& config)
{
    const unsigned p = config.p;
    if (p == 0 || p > 14) throw std::out_of_range("kernels suite requires 1 <= p <= 14");
    const DyadicGrid grid(p);
    const std::uint64_t N = grid.cells();
    Report r{"kernels", {{"p", std::to_string(p)}, {"seed", std::to_string(config.seed)}}};

    const auto table = lebesgue_table(p);
    {
        std::uint64_t bad = 0;
        for (unsigned k = 0; k <= p; ++k)
            if (table.at(std::uint64_t{1} << k) != Rational(1)) ++bad;
        r.checks.push_back(exact_check("L_(2^k) = 1", p + 1, bad));
    }
    const auto m = lebesgue_max(table);
    r.checks.push_back({"p/8 <= L^max <= p", m.within_bounds, m.value.to_double(), m.upper_bound.to_double(),
                        fmt::format("{} <= {} <= {} (argmax n = {})", m.lower_bound.to_string(), m.value.to_string(),
                                    m.upper_bound.to_string(), m.argmax)});
    if (p <= 12) {
        const auto serial = lebesgue_table_serial(p);
        r.checks.push_back(exact_check("parallel table equals serial table", N, serial.values == table.values ? 0 : 1));
        std::uint64_t bad = 0;
        for (std::uint64_t n = 1; n <= N; ++n)
            if (lebesgue_constant(n, grid) != table.at(n)) ++bad;
        r.checks.push_back(exact_check("incremental table equals direct integral of |D_n|", N, bad));
        bad = 0;
        for (std::uint64_t n = 1; n < N; ++n)
            if (dirichlet_factored(n, grid) != dirichlet(n, grid)) ++bad;
        r.checks.push_back(exact_check("kernel factorization", N - 1, bad));
    }
    {
        const DyadicGrid small(std::min(p, 6u));
        auto rng = make_rng(config.seed, 2);
        const auto f = random_rational(small, rng);
        std::uint64_t bad = 0;
        for (std::uint64_t n = 1; n <= small.cells(); ++n)
            if (kernel_partial_sum(f, n) != partial_sum(f, n)) ++bad;
        r.checks.push_back(exact_check("S_n f = f * D_n", small.cells(), bad));
    }

    Series s{"lebesgue", {"n", "L_n", "running_max"}};
    for (std::uint64_t n = 1; n <= N; ++n) s.rows.push_back({static_cast<double>(n), table.at(n).to_double(), table.max_at(n).to_double()});
    r.series.push_back(std::move(s));
    return r;
}

Report verify_theorem(const VerifyConfig& config)
{
    const auto T = config.op ? *config.op : default_theorem_operator();
    if (config.p == 0 || config.p > 10) throw std::out_of_range("theorem suite requires 1 <= p <= 10");
    TheoremOptions opts;
    opts.ascent = ascent_options(config);
    opts.mu.ascent = opts.ascent;
    opts.mu.ascent.restarts = std::max(1u, config.budget / 4);
    opts.tolerance = config.tolerance;
    const auto rep = theorem_check(T, config.p, opts);

    Report r{"theorem",
             {{"p", std::to_string(config.p)},
              {"seed", std::to_string(config.seed)},
              {"regime", rep.exact_regime ? "exact" : "estimated"},
              {"sandwich", rep.sandwich()}}};
    for (const auto& rel : rep.relations) r.checks.push_back({rel.name, rel.passed, rel.lhs, rel.rhs, {}});
    r.checks.push_back({"delta_max interval", rep.delta_max.lower <= rep.delta_max.upper, rep.delta_max.lower,
                        rep.delta_max.upper, rep.delta_max.method});
    r.checks.push_back({"mu interval", rep.mu.lower <= rep.mu.upper, rep.mu.lower, rep.mu.upper, rep.mu.method});
    if (!rep.exact_regime)
        r.checks.push_back({"converted witness bound <= mu_upper", leq_rel(rep.converted_bound, rep.mu.upper, config.tolerance),
                            rep.converted_bound, rep.mu.upper, {}});
    return r;
}

Report verify_corollary3(const VerifyConfig& config)
{
    const unsigned p = config.p;
    if (p < 1 || p > 5) throw std::out_of_range("corollary3 suite requires 1 <= p <= 5");
    Report r{"corollary3", {{"p", std::to_string(p)}, {"seed", std::to_string(config.seed)}}};
    Series s{"ratios", {"n", "ratio", "L_n"}};
    for (std::uint64_t n = 1; n < (std::uint64_t{1} << p); ++n) {
        const auto w = corollary_witness(p, n);
        const auto L = lebesgue_constant(n);
        r.checks.push_back({fmt::format("||S_n F|| / ||F|| = L_n, n = {}", n), w.ratio == L, w.ratio.to_double(), L.to_double(),
                            fmt::format("{} vs {}", w.ratio.to_string(), L.to_string())});
        s.rows.push_back({static_cast<double>(n), w.ratio.to_double(), L.to_double()});
    }
    {
        auto rng = make_rng(config.seed, 3);
        const auto ids = check_embedding_identities(random_rational(DyadicGrid(p), rng));
        r.checks.push_back({"embedding identities", ids.all(), 0.0, 0.0, "coefficients, norm, all partial sums"});
    }
    r.series.push_back(std::move(s));
    return r;
}

Report verify_convergence(const VerifyConfig& config)
{
    const unsigned q = config.q;
    if (q == 0 || q > 12) throw std::out_of_range("convergence suite requires 1 <= q <= 12");
    const DyadicGrid grid(q);
    const std::uint64_t N = grid.cells();
    Report r{"convergence", {{"q", std::to_string(q)}, {"seed", std::to_string(config.seed)}}};

    std::vector<std::pair<std::string, OperatorSpec>> spaces;
    if (config.op) {
        spaces.emplace_back("operator", *config.op);
    } else {
        spaces.emplace_back("euclidean", OperatorSpec::identity(NormedSpace::euclidean(3)));
        spaces.emplace_back("l1", OperatorSpec::identity(l1_space(3)));
    }

    auto rng = make_rng(config.seed, 4);
    std::normal_distribution<double> normal;
    for (const auto& [label, T] : spaces) {
        VectorStepFunction<double> f(grid, T.domain());
        for (auto& v : f.data()) v = normal(rng);
        const double fn = l2x_norm(f);

        DeltaOptions dopts{ascent_options(config), {}};
        dopts.ascent.restarts = std::max(1u, config.budget / 8);
        dopts.ascent.iterations = 50;
        const auto profile = delta_profile(T, N, grid, dopts);
        const auto dmax = delta_max(profile);

        // Errors e_n = ||f - S_n f|| and ratios ||T S_n f|| / ||f||.
        std::vector<double> err(N + 1), ratio(N + 1);
        for (std::uint64_t n = 0; n <= N; ++n) {
            const auto sn = partial_sum(f, n);
            err[n] = l2x_norm(f - sn);
            ratio[n] = l2x_norm(T.apply(sn)) / fn;
        }
        double observed = 0.0;
        for (std::uint64_t n = 1; n <= N; ++n) observed = std::max(observed, ratio[n]);

        r.checks.push_back({label + ": ||f - S_n f|| = 0 at n = 2^q", err[N] == 0.0, err[N], 0.0, {}});

        // For N' = 2^k <= n: f - S_n f = (I - S_n)(f - S_N' f).
        std::uint64_t bad = 0;
        double worst = 0.0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            const std::uint64_t base = std::bit_floor(n);
            const double bound = (1.0 + profile[n - 1].upper) * err[base];
            worst = std::max(worst, err[n] - bound);
            if (!leq_rel(err[n], bound, config.tolerance)) ++bad;
        }
        r.checks.push_back({label + ": ||f - S_n f|| <= (1 + delta(n)) ||f - S_2^k f||", bad == 0, worst, 0.0,
                            count_detail(N, bad)});
        r.checks.push_back({label + ": observed sup ratio within delta_max interval",
                            observed >= 1.0 - config.tolerance && leq_rel(observed, dmax.upper, config.tolerance), observed,
                            dmax.upper,
                            fmt::format("observed {} in [{}, {}] (certified lower end {})", fmt_num(observed), fmt_num(1.0),
                                        fmt_num(dmax.upper), fmt_num(dmax.lower))});

        Series s{label, {"n", "error", "envelope", "ratio"}};
        double envelope = 0.0;
        std::vector<double> env(N + 1);
        for (std::uint64_t n = N + 1; n-- > 0;) env[n] = envelope = std::max(envelope, err[n]);
        for (std::uint64_t n = 0; n <= N; ++n) s.rows.push_back({static_cast<double>(n), err[n], env[n], ratio[n]});
        r.series.push_back(std::move(s));
    }
    return r;
}

Report run_suite(std::string_view suite, const VerifyConfig& config)
{
    if (suite == "identities") return verify_identities(config);
    if (suite == "kernels") return verify_kernels(config);
    if (suite == "theorem") return verify_theorem(config);
    if (suite == "corollary3") return verify_corollary3(config);
    if (suite == "convergence") return verify_convergence(config);
    throw std::invalid_argument(fmt::format("unknown suite '{}' (identities, kernels, theorem, corollary3, convergence)", suite));
}

// ---------------------------------------------------------------------------

Report norms_report(const OperatorSpec& T, const NormsConfig& config)
{
    AscentOptions ascent;
    ascent.seed = config.seed;
    ascent.restarts = std::max(1u, config.budget);
    ascent.tolerance = config.tolerance;

    NormEstimate est;
    std::string mode;
    Report r;
    switch (config.mode) {
    case NormMode::delta:
    case NormMode::delta_max: {
        if (config.q == 0 || config.q > 24) throw std::out_of_range("norms: q must be in 1..24");
        const DyadicGrid grid(config.q);
        const std::uint64_t n = config.n.value_or(grid.cells());
        DeltaOptions opts{ascent, embedding_seeds(T, grid)};
        mode = config.mode == NormMode::delta ? "delta" : "delta-max";
        est = config.mode == NormMode::delta ? delta_norm(T, n, grid, opts) : delta_max(T, n, grid, opts);
        r.parameters = {{"mode", mode}, {"n", std::to_string(n)}, {"q", std::to_string(config.q)}};
        break;
    }
    case NormMode::mu: {
        mode = "mu";
        if (T.domain().kind() == NormKind::euclidean && T.codomain().kind() == NormKind::euclidean) {
            est = mu_exact_euclidean(T, config.p, MuExactOptions{.seed = config.seed});
        } else {
            TheoremOptions opts;
            opts.ascent = ascent;
            opts.mu.ascent = ascent;
            opts.mu.ascent.restarts = std::max(1u, config.budget / 4);
            opts.tolerance = config.tolerance;
            est = theorem_check(T, config.p, opts).mu;
        }
        r.parameters = {{"mode", mode}, {"p", std::to_string(config.p)}};
        break;
    }
    }
    r.title = "norms";
    r.parameters.emplace_back("seed", std::to_string(config.seed));
    r.parameters.emplace_back("method", est.method);
    r.parameters.emplace_back("status", est.exact(config.tolerance) ? "exact" : "interval");
    if (est.witness) r.parameters.emplace_back("witness_digest", fmt::format("{:016x}", digest(est.witness->data())));
    if (!est.signs.empty()) {
        std::string s;
        for (int e : est.signs) s += e > 0 ? '+' : '-';
        r.parameters.emplace_back("signs", s);
    }
    r.checks.push_back({mode + " lower <= upper", leq_rel(est.lower, est.upper, config.tolerance), est.lower, est.upper,
                        fmt::format("[{}, {}]", fmt_num(est.lower), fmt_num(est.upper))});
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string render_csv(const Report& r)
{
    std::string out;
    for (const auto& [k, v] : r.parameters) out += fmt::format("# {} = {}\n", k, v);
    out += "report,check,status,value,reference,detail\n";
    for (const auto& c : r.checks)
        out += fmt::format("{},{},{},{},{},{}\n", r.title, csv_field(c.name), c.passed ? "PASS" : "FAIL", fmt_num(c.value),
                           fmt_num(c.reference), csv_field(c.detail));
    out += fmt::format("# verdict = {}\n", r.passed() ? "PASS" : "FAIL");
    return out;
}

std::string render_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["report"] = r.title;
    auto& params = j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) params[k] = v;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back(
            {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"reference", c.reference}, {"detail", c.detail}});
    j["series"] = nlohmann::ordered_json::array();
    for (const auto& s : r.series) j["series"].push_back({{"name", s.name}, {"columns", s.columns}, {"rows", s.rows}});
    j["passed"] = r.passed();
    return j.dump(2) + "\n";
}

std::string render_plot(const Report& r)
{
    std::string out = fmt::format("# {}\n", r.title);
    for (const auto& [k, v] : r.parameters) out += fmt::format("# {} = {}\n", k, v);
    if (r.series.empty()) {
        out += "# index value reference passed\n";
        for (std::size_t i = 0; i < r.checks.size(); ++i)
            out += fmt::format("{} {} {} {}\n", i, fmt_num(r.checks[i].value), fmt_num(r.checks[i].reference),
                               r.checks[i].passed ? 1 : 0);
    }
    for (std::size_t b = 0; b < r.series.size(); ++b) {
        const auto& s = r.series[b];
        if (b > 0) out += "\n\n";
        out += fmt::format("# series {}\n# {}\n", s.name, fmt::join(s.columns, " "));
        for (const auto& row : s.rows) {
            std::vector<std::string> cells;
            for (double v : row) cells.push_back(fmt_num(v));
            out += fmt::format("{}\n", fmt::join(cells, " "));
        }
    }
    return out;
}

}  // namespace

std::string render(const Report& report, OutputFormat format)
{
    switch (format) {
    case OutputFormat::csv:
        return render_csv(report);
    case OutputFormat::json:
        return render_json(report);
    case OutputFormat::plot_data:
        return render_plot(report);
    }
    return {};
}

}  // namespace walsh
