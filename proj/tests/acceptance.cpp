#include <cstdio>
#include <functional>
#include <string>

#include <fmt/format.h>

#include "oracles.hpp"
#include "walsh/kernels.hpp"
#include "walsh/l1_embedding.hpp"
#include "walsh/martingale.hpp"
#include "walsh/verify.hpp"
#include "walsh/walsh.hpp"

using namespace walsh;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && passed) detail = what;
        passed = passed && ok;
    }
};

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// 1. Kernel factorization, all 1 <= n < 2^10 at q = 10, exact integers.
Outcome kernel_factorization()
{
    Outcome o;
    const DyadicGrid g(10);
    std::uint64_t checked = 0;
    for (std::uint64_t n = 1; n < g.cells(); ++n, ++checked)
        o.require(dirichlet_factored(n, g) == dirichlet(n, g), fmt::format("mismatch at n = {}", n));
    // spot check the fast kernel against the plain Walsh sum
    for (std::uint64_t n : {1, 5, 683, 1000}) {
        const auto d = dirichlet(n, g);
        const auto ref = oracle::dirichlet(n, 10);
        o.require(std::equal(ref.begin(), ref.end(), d.values().begin()), fmt::format("kernel differs from Walsh sum at n = {}", n));
    }
    if (o.passed) o.detail = fmt::format("{} orders, zero tolerance", checked);
    return o;
}

// 2. p/8 <= L^max <= p for p = 1..12, exact rationals.
Outcome lebesgue_sandwich()
{
    Outcome o;
    std::string last;
    for (unsigned p = 1; p <= 12; ++p) {
        const auto m = lebesgue_max(p);
        o.require(m.lower_bound == Rational(p, 8) && m.upper_bound == Rational(p), "wrong bounds");
        o.require(Rational(p, 8) <= m.value && m.value <= Rational(p), fmt::format("p = {}: L^max = {}", p, m.value.to_string()));
        if (p <= 7) o.require(m.value == oracle::lebesgue(m.argmax, p), fmt::format("p = {}: argmax value disagrees with oracle", p));
        last = fmt::format("L^max_4096 = {}", m.value.to_string());
    }
    if (o.passed) o.detail = last;
    return o;
}

// 3. delta(T|W_{2^p}) = ||T||: exact for Euclidean p <= 6, 1e-6 for polytope norms p <= 3.
Outcome delta_at_dyadic_orders()
{
    Outcome o;
    std::mt19937_64 rng(0x3);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    int cases = 0;
    for (unsigned p = 1; p <= 6; ++p)
        for (int t = 0; t < 3; ++t, ++cases) {
            const auto dx = dim(rng), dy = dim(rng);
            const OperatorSpec T(NormedSpace::euclidean(dx), NormedSpace::euclidean(dy), oracle::random_matrix(dy, dx, rng));
            const double norm = oracle::spectral_norm(T.matrix());
            const auto e = delta_norm(T, std::uint64_t{1} << p, DyadicGrid(p));
            o.require(e.lower == e.upper, "euclidean estimate not exact");
            o.require(close_rel(e.lower, norm, 1e-12), fmt::format("euclidean p = {}: {} vs {}", p, e.lower, norm));
        }
    const NormKind kinds[] = {NormKind::l1_weighted, NormKind::linf};
    double worst = 0.0;
    for (int t = 0; t < 10; ++t, ++cases) {
        const unsigned p = 1 + static_cast<unsigned>(t % 3);
        const auto dx = dim(rng), dy = dim(rng);
        const OperatorSpec T(oracle::random_space(kinds[t % 2], dx, rng), oracle::random_space(kinds[(t / 2) % 2], dy, rng),
                             oracle::random_matrix(dy, dx, rng));
        const double norm = oracle::operator_norm(T);
        const auto e = delta_norm(T, std::uint64_t{1} << p, DyadicGrid(p));
        o.require(close_rel(delta_quotient(T, *e.witness, std::uint64_t{1} << p), e.lower, 1e-12), "witness does not reproduce lower");
        o.require(close_rel(e.lower, e.upper, 1e-6), fmt::format("case {}: interval [{}, {}]", t, e.lower, e.upper));
        o.require(close_rel(e.upper, norm, 1e-6), fmt::format("case {}: {} vs ||T|| = {}", t, e.upper, norm));
        worst = std::max(worst, std::abs(e.upper - e.lower));
    }
    if (o.passed) o.detail = fmt::format("{} operators, widest polytope interval {:.3g}", cases, worst);
    return o;
}

// 4. ||S_n F|| / ||F|| = L_n exactly for p = 2, 3, 4 and all 1 <= n < 2^p.
Outcome corollary_witness_ratios()
{
    Outcome o;
    int count = 0;
    for (unsigned p = 2; p <= 4; ++p)
        for (std::uint64_t n = 1; n < (std::uint64_t{1} << p); ++n, ++count) {
            const auto w = corollary_witness(p, n);
            o.require(w.ratio == oracle::lebesgue(n, p),
                      fmt::format("p = {}, n = {}: {} vs {}", p, n, w.ratio.to_string(), oracle::lebesgue(n, p).to_string()));
            o.require(w.ratio == lebesgue_constant(n), "library constant disagrees");
        }
    if (o.passed) o.detail = fmt::format("{} exact matches", count);
    return o;
}

// 5. ||sum_{i in I} T dM_i|| = ||T S_n(M_p w_n)|| to 1e-12, 1000 cases per norm tag.
Outcome differences_as_partial_sums()
{
    Outcome o;
    std::mt19937_64 rng(0x5);
    std::uniform_int_distribution<unsigned> depth(1, 6);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    double worst = 0.0;
    for (auto kind : {NormKind::euclidean, NormKind::l1_weighted, NormKind::linf})
        for (int t = 0; t < 1000; ++t) {
            const unsigned p = depth(rng);
            const auto dx = dim(rng), dy = dim(rng);
            const OperatorSpec T(oracle::random_space(kind, dx, rng), oracle::random_space(kind, dy, rng), oracle::random_matrix(dy, dx, rng));
            const auto M = martingale_from_final(oracle::random_function(DyadicGrid(p), T.domain(), rng), p);
            const std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(1, (std::uint64_t{1} << p) - 1)(rng);

            std::vector<unsigned> I;
            VectorStepFunction<double> sum(M.grid(), M.space());
            const auto d = differences(M);
            for (unsigned i = 0; i < p; ++i)
                if ((n >> i) & 1) {
                    I.push_back(i);
                    sum += d[i];
                }
            const double lhs = l2x_norm(T.apply(sum));
            auto g = M.final();
            g.multiply(walsh_as<double>(n, M.grid()));
            const double rhs = l2x_norm(apply_TSn(T, g, n));
            const double rel = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
            worst = std::max(worst, rel);
            o.require(rel <= 1e-12, fmt::format("{} case {}: {} vs {}", to_string(kind), t, lhs, rhs));
            const auto w = witness_to_walsh(T, M, I);
            o.require(w.n == n && close_rel(w.transform_side, lhs, 1e-12) && close_rel(w.walsh_side, rhs, 1e-12),
                      "witness_to_walsh disagrees with direct evaluation");
            o.require(close_rel(l2x_norm(g), l2x_norm(M.final()), 1e-12), "||M_p w_n|| != ||M_p||");
        }
    if (o.passed) o.detail = fmt::format("3000 cases, worst relative gap {:.3g}", worst);
    return o;
}

// 6. delta^max = mu_p = ||T|| for 20 random Euclidean operators.
Outcome exact_regime_sandwich()
{
    Outcome o;
    std::mt19937_64 rng(0x6);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    for (int t = 0; t < 20; ++t) {
        const unsigned p = 1 + static_cast<unsigned>(t % 6);
        const auto dx = dim(rng), dy = dim(rng);
        const OperatorSpec T(NormedSpace::euclidean(dx), NormedSpace::euclidean(dy), oracle::random_matrix(dy, dx, rng));
        const double norm = oracle::spectral_norm(T.matrix());
        const auto r = theorem_check(T, p);
        const auto& dm = r.delta_max;
        const auto& mu = r.mu;
        o.require(r.exact_regime && r.passed(), fmt::format("case {}: relation failed", t));
        for (double v : {dm.lower, dm.upper, mu.lower, mu.upper})
            o.require(close_rel(v, norm, 1e-9), fmt::format("case {} (p = {}): {} vs ||T|| = {}", t, p, v, norm));
        o.require(dm.upper <= mu.lower * (1 + 1e-9) && mu.upper <= 2 * dm.lower * (1 + 1e-9), fmt::format("case {}: sandwich", t));
    }
    if (o.passed) o.detail = "20 operators, p = 1..6";
    return o;
}

// 7. l1-discretized identity: converted witnesses reach L^max; nothing exceeds 2 L^max.
Outcome estimated_regime()
{
    Outcome o;
    const double tol = 1e-9;
    std::string detail;
    for (unsigned p = 2; p <= 4; ++p) {
        const auto T = OperatorSpec::identity(l1_space(p));
        const auto r = theorem_check(T, p);
        const double lmax = lebesgue_max(p).value.to_double();
        o.require(r.passed(), fmt::format("p = {}: relation failed", p));
        o.require(r.mu.lower >= p / 8.0 - tol && r.mu.upper <= 2.0 * p + tol, fmt::format("p = {}: p/8 <= mu <= 2p", p));
        o.require(close_rel(r.delta_max.lower, lmax, tol) && close_rel(r.delta_max.upper, lmax, tol),
                  fmt::format("p = {}: delta^max [{}, {}] vs L^max {}", p, r.delta_max.lower, r.delta_max.upper, lmax));
        for (double certified : {r.converted_bound, r.mu.lower})
            o.require(certified <= 2 * lmax * (1 + tol), fmt::format("p = {}: certified {} > 2 L^max", p, certified));
        if (p == 4) {
            o.require(r.converted_bound >= lmax * (1 - tol), fmt::format("converted bound {} < L^max {}", r.converted_bound, lmax));
            detail = fmt::format("p = 4: {} <= converted {:.10g} <= mu_lower {:.10g} <= {}", lmax, r.converted_bound, r.mu.lower, 2 * lmax);
        }
    }
    if (o.passed) o.detail = detail;
    return o;
}

// 8. Identity suite.
Outcome identity_suite()
{
    Outcome o;
    VerifyConfig cfg;
    for (unsigned q = 1; q <= 8; ++q) {
        cfg.q = q;
        const auto r = verify_identities(cfg);
        for (const auto& c : r.checks) o.require(c.passed, fmt::format("q = {}: {}", q, c.name));
    }
    std::mt19937_64 rng(0x8);
    std::normal_distribution<double> g;
    for (unsigned q = 1; q <= 8; ++q) {
        std::vector<double> v(std::size_t{1} << q);
        for (auto& x : v) x = g(rng);
        const auto fast = fwht(StepFunction<double>(DyadicGrid(q), v));
        const auto slow = oracle::coefficients(v, q);
        double energy = 0.0, ns = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            o.require(std::abs(fast.coeffs[i] - slow[i]) <= 1e-12, fmt::format("fwht q = {}", q));
            energy += fast.coeffs[i] * fast.coeffs[i];
            ns += v[i] * v[i] / static_cast<double>(v.size());
        }
        o.require(std::abs(energy - ns) <= 1e-12 * ns, fmt::format("parseval q = {}", q));
    }
    if (o.passed) o.detail = "q = 1..8";
    return o;
}

// 9. Convergence probe at q = 8.
Outcome convergence_probe()
{
    Outcome o;
    VerifyConfig cfg;
    cfg.q = 8;
    const auto r = verify_convergence(cfg);
    for (const auto& c : r.checks) o.require(c.passed, c.name + ": " + c.detail);

    std::mt19937_64 rng(0x9);
    const DyadicGrid grid(8);
    for (const auto& T : {OperatorSpec::identity(NormedSpace::euclidean(2)), OperatorSpec::identity(l1_space(2))}) {
        const auto f = oracle::random_function(grid, T.domain(), rng);
        o.require(l2x_norm(f - partial_sum(f, 256)) == 0.0, "S_256 f != f");
        double sup = 0.0, upper = 0.0;
        for (std::uint64_t n = 1; n <= 256; ++n) {
            sup = std::max(sup, l2x_norm(partial_sum(f, n)) / l2x_norm(f));
            upper = std::max(upper, delta_upper_bound(T, n));
        }
        o.require(sup >= 1.0 - 1e-12 && sup <= upper * (1 + 1e-9), fmt::format("sup ratio {} outside [1, {}]", sup, upper));
    }
    if (o.passed) o.detail = fmt::format("{} checks", r.checks.size());
    return o;
}

std::string capture(const std::string& cmd)
{
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return "<popen failed>";
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
    pclose(p);
    return out;
}

// 10. Two runs of the verify command with identical seeds give identical bytes.
Outcome determinism()
{
    Outcome o;
    const std::string ctl = WALSHCTL_PATH;
    const std::vector<std::string> runs{
        "verify --suite identities --q 6 --seed 42",
        "verify --suite kernels --p 8 --format json",
        "verify --suite theorem --p 3 --seed 7 --format json",
        "verify --suite corollary3 --p 4 --format plot-data",
        "verify --suite convergence --q 6 --seed 99 --budget 8",
    };
    std::size_t bytes = 0;
    for (const auto& args : runs) {
        const auto a = capture(ctl + " " + args);
        const auto b = capture(ctl + " " + args);
        o.require(!a.empty() && a == b, "outputs differ: " + args);
        bytes += a.size();
    }
    if (o.passed) o.detail = fmt::format("{} suites, {} bytes each run", runs.size(), bytes);
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"kernel factorization, q = 10", kernel_factorization},
        {"p/8 <= L^max <= p, p = 1..12", lebesgue_sandwich},
        {"delta at n = 2^p equals ||T||", delta_at_dyadic_orders},
        {"L_1 witness ratios equal L_n", corollary_witness_ratios},
        {"martingale differences as Walsh partial sums", differences_as_partial_sums},
        {"exact regime sandwich", exact_regime_sandwich},
        {"estimated regime, l1 identity", estimated_regime},
        {"identity suite", identity_suite},
        {"convergence probe, q = 8", convergence_probe},
        {"determinism of verify reports", determinism},
    };
    const int only = argc > 1 ? std::stoi(argv[1]) : 0;
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i + 1) != only) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.passed;
        fmt::print("{} criterion {}: {} ({})\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
