#include "walsh/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "walsh/l1_embedding.hpp"
#include "walsh/walsh.hpp"

namespace walsh {

namespace {

double max_abs_difference(const VectorStepFunction<double>& a, const VectorStepFunction<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

void require_signs(std::span<const int> signs)
{
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("sign pattern entries must be +1 or -1");
}

}  // namespace

DyadicMartingale::DyadicMartingale(std::vector<VectorStepFunction<double>> levels) : levels_(std::move(levels))
{
    if (levels_.empty()) throw std::invalid_argument("DyadicMartingale: at least M_0 is required");
    if (levels_.size() - 1 > grid().resolution()) throw std::invalid_argument("DyadicMartingale: depth exceeds grid resolution");
    for (const auto& l : levels_) l.require_compatible(levels_.front());
}

bool DyadicMartingale::is_adapted(double tol) const
{
    for (unsigned i = 0; i <= depth(); ++i) {
        if (max_abs_difference(conditional_expectation(final(), i), levels_[i]) > tol) return false;
        if (max_abs_difference(conditional_expectation(levels_[i], i), levels_[i]) > tol) return false;
    }
    return true;
}

bool DyadicMartingale::has_haar_form(double tol) const
{
    const auto& g = grid();
    for (unsigned i = 0; i <= depth(); ++i) {
        for (std::uint64_t j = std::uint64_t{1} << i; j < g.cells(); ++j) {
            const auto h = haar(j, g);
            for (std::size_t c = 0; c < space().dim(); ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < g.cells(); ++k) acc += static_cast<double>(h.signs[k]) * levels_[i].cell(k)[c];
                if (std::abs(acc) > tol * static_cast<double>(g.cells())) return false;
            }
        }
    }
    return true;
}

DyadicMartingale DyadicMartingale::extended(unsigned new_depth) const
{
    if (new_depth < depth()) throw std::invalid_argument("extended: depth can only grow");
    auto levels = levels_;
    while (levels.size() < new_depth + 1) levels.push_back(final());
    return DyadicMartingale(std::move(levels));
}

DyadicMartingale martingale_from_final(const VectorStepFunction<double>& final, unsigned p)
{
    const auto& grid = final.grid();
    if (p > grid.resolution()) throw std::invalid_argument("martingale_from_final: grid resolution must be >= p");
    if (conditional_expectation(final, p) != final)
        throw std::invalid_argument("martingale_from_final: M_p must be constant on order-p dyadic intervals");
    std::vector<VectorStepFunction<double>> levels(p + 1, final);
    for (unsigned i = p; i-- > 0;) {
        levels[i] = levels[i + 1];
        conditional_expectation_inplace(levels[i], i);
    }
    return DyadicMartingale(std::move(levels));
}

std::vector<VectorStepFunction<double>> differences(const DyadicMartingale& M)
{
    std::vector<VectorStepFunction<double>> d;
    d.reserve(M.depth());
    for (unsigned i = 0; i < M.depth(); ++i) d.push_back(M.level(i + 1) - M.level(i));
    return d;
}

SignPattern SignPattern::from_mask(std::uint64_t mask, unsigned p)
{
    SignPattern s;
    s.signs.resize(p);
    for (unsigned i = 0; i < p; ++i) s.signs[i] = (mask >> i) & 1 ? -1 : 1;
    return s;
}

void martingale_transform_inplace(VectorStepFunction<double>& f, std::span<const int> signs)
{
    require_signs(signs);
    const auto p = static_cast<unsigned>(signs.size());
    require_level(p, f.grid());
    // upper = E_{i+1} f, descending from i = p - 1.
    auto upper = conditional_expectation(f, p);
    std::fill(f.data().begin(), f.data().end(), 0.0);
    for (unsigned i = p; i-- > 0;) {
        auto lower = conditional_expectation(upper, i);
        const double s = signs[i];
        for (std::size_t k = 0; k < f.data().size(); ++k) f.data()[k] += s * (upper.data()[k] - lower.data()[k]);
        upper = std::move(lower);
    }
}

double transform_norm(const OperatorSpec& T, const DyadicMartingale& M, std::span<const int> signs)
{
    if (signs.size() != M.depth()) throw std::invalid_argument("transform_norm: sign pattern length must equal depth");
    require_signs(signs);
    if (!(M.space() == T.domain())) throw std::invalid_argument("transform_norm: martingale does not take values in T's domain");
    VectorStepFunction<double> sum(M.grid(), M.space());
    const auto d = differences(M);
    for (unsigned i = 0; i < M.depth(); ++i) {
        auto term = d[i];
        term.scale(signs[i]);
        sum += term;
    }
    return l2x_norm(T.apply(sum));
}

// ---------------------------------------------------------------------------
// Exact Euclidean mu via Lanczos on B^T B, B = T (x) A_eps.
// ---------------------------------------------------------------------------

namespace {

struct PatternResult {
    double value = 0.0;
    std::vector<double> vector;
};

PatternResult top_singular_pair(const OperatorSpec& T, const DyadicGrid& grid, std::span<const int> signs,
                                std::uint64_t seed, std::uint64_t salt, unsigned max_steps)
{
    const std::size_t N = grid.cells() * T.domain().dim();
    auto apply_gram = [&](const Eigen::VectorXd& v) {
        VectorStepFunction<double> f(grid, T.domain(), std::vector<double>(v.data(), v.data() + v.size()));
        martingale_transform_inplace(f, signs);
        auto h = T.apply_transpose(T.apply(f));
        martingale_transform_inplace(h, signs);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(h.data().data(), static_cast<Eigen::Index>(N)));
    };

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Eigen::VectorXd q(static_cast<Eigen::Index>(N));
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = normal(rng);
    q.normalize();

    const auto steps = static_cast<Eigen::Index>(std::min<std::size_t>(N, max_steps));
    Eigen::MatrixXd Q(static_cast<Eigen::Index>(N), steps);
    std::vector<double> alpha, beta;
    Q.col(0) = q;
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < steps; ++j) {
        m = j + 1;
        Eigen::VectorXd w = apply_gram(Q.col(j));
        alpha.push_back(Q.col(j).dot(w));
        // Full reorthogonalization, twice.
        for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
        const double b = w.norm();
        const double scale = std::max(1.0, *std::max_element(alpha.begin(), alpha.end(),
                                                             [](double a, double c) { return std::abs(a) < std::abs(c); }));
        if (b <= 1e-12 * scale || j + 1 == steps) break;
        beta.push_back(b);
        Q.col(j + 1) = w / b;
    }

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::Index top = m - 1;  // eigenvalues ascending
    const double lambda = std::max(0.0, es.eigenvalues()[top]);
    Eigen::VectorXd ritz = Q.leftCols(m) * es.eigenvectors().col(top);
    ritz.normalize();
    return {std::sqrt(lambda), std::vector<double>(ritz.data(), ritz.data() + ritz.size())};
}

bool both_euclidean(const OperatorSpec& T)
{
    return T.domain().kind() == NormKind::euclidean && T.codomain().kind() == NormKind::euclidean;
}

}  // namespace

NormEstimate mu_exact_euclidean(const OperatorSpec& T, unsigned p, const MuExactOptions& options)
{
    if (!both_euclidean(T)) throw std::invalid_argument("mu_exact_euclidean: both spaces must be euclidean");
    if (p > options.max_depth) throw std::invalid_argument(fmt::format("mu_exact_euclidean: depth {} exceeds cap {}", p, options.max_depth));
    NormEstimate est;
    est.method = "euclidean-exact (lanczos over all sign patterns)";
    if (p == 0) return est;

    const DyadicGrid grid(p);
    const auto patterns = static_cast<std::int64_t>(std::uint64_t{1} << p);
    std::vector<PatternResult> results(static_cast<std::size_t>(patterns));
    std::vector<std::exception_ptr> errors(results.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t mask = 0; mask < patterns; ++mask) {
        try {
            const auto s = SignPattern::from_mask(static_cast<std::uint64_t>(mask), p);
            results[static_cast<std::size_t>(mask)] =
                top_singular_pair(T, grid, s.signs, options.seed, static_cast<std::uint64_t>(mask), options.lanczos_steps);
        } catch (...) {
            errors[static_cast<std::size_t>(mask)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].value > results[best].value) best = i;
    est.lower = est.upper = results[best].value;
    est.witness = VectorStepFunction<double>(grid, T.domain(), results[best].vector);
    est.signs = SignPattern::from_mask(best, p).signs;
    return est;
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

NormEstimate mu_lower_search(const OperatorSpec& T, unsigned p, const MuSearchOptions& options)
{
    if (p == 0) throw std::invalid_argument("mu_lower_search: depth must be >= 1");
    const DyadicGrid grid(p);
    const double tol = options.ascent.tolerance;

    NormEstimate est;
    est.upper = 2.0 * [&] {
        double m = 0.0;
        for (std::uint64_t k = 1; k <= grid.cells(); ++k) m = std::max(m, delta_upper_bound(T, k));
        return m;
    }();

    std::vector<std::uint64_t> masks;
    const std::uint64_t half = std::uint64_t{1} << (p - 1);
    if (half <= options.max_patterns) {
        // eps and -eps give the same norm; fix eps_0 = +1.
        for (std::uint64_t m = 0; m < half; ++m) masks.push_back(m << 1);
    } else {
        std::mt19937_64 rng(options.ascent.seed ^ 0x9e3779b97f4a7c15ULL);
        masks.push_back(0);
        std::uniform_int_distribution<std::uint64_t> pick(0, half - 1);
        while (masks.size() < options.max_patterns) {
            const auto m = pick(rng) << 1;
            if (std::find(masks.begin(), masks.end(), m) == masks.end()) masks.push_back(m);
        }
    }

    struct Candidate {
        double value = -1.0;
        std::optional<VectorStepFunction<double>> final;
        std::vector<int> signs;
        std::string source;
    };
    Candidate best;
    auto consider = [&](AscentResult r, const std::vector<int>& signs, const std::string& source) {
        if (r.witness && r.value > best.value) best = {r.value, std::move(r.witness), signs, source};
    };
    auto projection = [](const std::vector<int>& signs) {
        return ScalarProjection([signs](VectorStepFunction<double>& f) { martingale_transform_inplace(f, signs); });
    };

    // x h_1 with eps = +1 certifies mu_p >= ||T||.
    {
        auto f = constant_witness(T, grid);
        const auto h1 = haar(1, grid);
        for (std::size_t k = 0; k < f.cells(); ++k)
            for (auto& v : f.cell(k)) v *= static_cast<double>(h1.signs[k]);
        const auto signs = SignPattern::all_plus(p).signs;
        consider({ascent_quotient(T, projection(signs), f), f}, signs, "haar-seed");
    }
    for (const auto& seed : options.seeds) {
        if (!(seed.final.grid() == grid) || seed.signs.size() != p)
            throw std::invalid_argument("mu_lower_search: seed must live on the depth-p grid with p signs");
        const auto P = projection(seed.signs);
        consider({ascent_quotient(T, P, seed.final), seed.final}, seed.signs, "converted-witness");
        consider(ascend_from(T, P, seed.final, options.ascent), seed.signs, "seeded-ascent");
    }
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const auto signs = SignPattern::from_mask(masks[i], p).signs;
        consider(ascend_restarts(T, projection(signs), grid, options.ascent, 0x6d75000000000000ULL + masks[i]), signs,
                 "ascent");
    }

    est.lower = best.value;
    est.witness = std::move(best.final);
    est.signs = best.signs;
    est.method = fmt::format("lower={} upper=2*delta_max bound, {} sign patterns", best.source, masks.size());
    if (est.lower > est.upper * (1.0 + tol))
        throw std::logic_error(fmt::format("mu_lower_search: certified lower bound {} exceeds 2*delta_max upper bound {}",
                                           est.lower, est.upper));
    return est;
}

// ---------------------------------------------------------------------------
// Witness conversions
// ---------------------------------------------------------------------------

WalshWitness witness_to_walsh(const OperatorSpec& T, const DyadicMartingale& M, std::span<const unsigned> indices)
{
    const unsigned p = M.depth();
    std::uint64_t n = 0;
    for (unsigned i : indices) {
        if (i >= p) throw std::out_of_range("witness_to_walsh: index outside 0..p-1");
        if (n & (std::uint64_t{1} << i)) throw std::invalid_argument("witness_to_walsh: repeated index");
        n |= std::uint64_t{1} << i;
    }

    const auto d = differences(M);
    VectorStepFunction<double> sum(M.grid(), M.space());
    for (unsigned i : indices) sum += d[i];

    WalshWitness w{n, M.final()};
    w.g.multiply(walsh_as<double>(n, M.grid()));
    w.transform_side = l2x_norm(T.apply(sum));
    w.walsh_side = l2x_norm(apply_TSn(T, w.g, n));
    w.g_norm = l2x_norm(w.g);
    w.final_norm = l2x_norm(M.final());
    const auto& m0 = M.level(0).data();
    w.mean_free = std::all_of(m0.begin(), m0.end(), [](double v) { return v == 0.0; });
    return w;
}

MartingaleWitness witness_to_martingale(const OperatorSpec& T, const VectorStepFunction<double>& f, std::uint64_t n)
{
    const auto& grid = f.grid();
    if (n == 0 || n >= grid.cells()) throw std::out_of_range("witness_to_martingale requires 1 <= n < 2^q");
    if (l2x_norm(f) == 0.0) throw std::invalid_argument("witness_to_martingale: f must be non-zero");

    const auto K = bit_decompose(n);
    const unsigned depth = K.highest() + 1;
    auto g = f;
    g.multiply(walsh_as<double>(n, grid));

    std::vector<VectorStepFunction<double>> levels;
    levels.reserve(depth + 1);
    for (unsigned i = 0; i <= depth; ++i) levels.push_back(partial_sum(g, std::uint64_t{1} << i));
    DyadicMartingale M(std::move(levels));

    std::vector<int> all_plus(depth, 1);
    std::vector<int> split(depth);
    for (unsigned i = 0; i < depth; ++i) split[i] = K.contains(i) ? 1 : -1;

    const auto d = differences(M);
    VectorStepFunction<double> split_sum(grid, f.space());
    for (unsigned k : K.exponents) split_sum += d[k];

    MartingaleWitness w{M, {}};
    w.partial_sum_norm = l2x_norm(apply_TSn(T, f, n));
    w.split_norm = l2x_norm(T.apply(split_sum));
    w.all_plus_norm = transform_norm(T, M, all_plus);
    w.split_sign_norm = transform_norm(T, M, split);
    w.denominator = l2x_norm(M.final());
    w.signs = w.split_sign_norm > w.all_plus_norm ? split : all_plus;
    w.bound = w.denominator > 0.0 ? std::max(w.all_plus_norm, w.split_sign_norm) / w.denominator : 0.0;
    return w;
}

// ---------------------------------------------------------------------------
// Theorem harness
// ---------------------------------------------------------------------------

bool TheoremReport::passed() const
{
    return std::all_of(relations.begin(), relations.end(), [](const Relation& r) { return r.passed; });
}

std::string TheoremReport::sandwich() const
{
    if (exact_regime) return fmt::format("{:.10g} ≤ {:.10g} ≤ {:.10g}", delta_max.lower, mu.lower, 2.0 * delta_max.lower);
    return fmt::format("[{:.10g}, {:.10g}] ≤ [{:.10g}, {:.10g}] ≤ [{:.10g}, {:.10g}]", delta_max.lower, delta_max.upper,
                       mu.lower, mu.upper, 2.0 * delta_max.lower, 2.0 * delta_max.upper);
}

namespace {

Relation leq(std::string name, double lhs, double rhs, double tol)
{
    return {std::move(name), lhs, rhs, lhs <= rhs + tol * std::max(1.0, std::abs(rhs))};
}

}  // namespace

TheoremReport theorem_check(const OperatorSpec& T, unsigned p, const TheoremOptions& options)
{
    if (p == 0) throw std::invalid_argument("theorem_check: p must be >= 1");
    const DyadicGrid grid(p);
    const std::uint64_t N = grid.cells();
    const double tol = options.tolerance;

    TheoremReport report;
    report.p = p;
    report.exact_regime = both_euclidean(T);

    DeltaOptions delta_options{options.ascent, embedding_seeds(T, grid)};
    const auto profile = delta_profile(T, N, grid, delta_options);
    report.delta_max = delta_max(profile);

    if (report.exact_regime) {
        report.mu = mu_exact_euclidean(T, p, MuExactOptions{.seed = options.ascent.seed});
    } else {
        auto mu_options = options.mu;
        for (std::uint64_t n = 1; n < N; ++n) {
            const auto& e = profile[n - 1];
            if (!e.witness || l2x_norm(*e.witness) == 0.0) continue;
            const auto w = witness_to_martingale(T, *e.witness, n);
            report.converted_bound = std::max(report.converted_bound, w.bound);
            auto signs = w.signs;
            signs.resize(p, 1);
            mu_options.seeds.push_back({w.martingale.final(), std::move(signs)});
        }
        report.mu = mu_lower_search(T, p, mu_options);
    }

    const auto& dm = report.delta_max;
    const auto& mu = report.mu;
    report.relations.push_back(leq("mu_lower <= 2*delta_max_upper", mu.lower, 2.0 * dm.upper, tol));
    report.relations.push_back(leq("delta_max_lower <= mu_upper", dm.lower, mu.upper, tol));
    if (report.exact_regime) {
        report.relations.push_back(leq("delta_max <= mu", dm.upper, mu.lower, tol));
        report.relations.push_back(leq("mu <= 2*delta_max", mu.upper, 2.0 * dm.lower, tol));
    } else {
        report.relations.push_back(leq("delta_max_lower <= mu_lower (witness conversion)", dm.lower, mu.lower, tol));
    }
    return report;
}

}  // namespace walsh
