#include "walsh/operators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "walsh/walsh.hpp"

namespace walsh {

double vector_norm(std::span<const double> x, const NormedSpace& space) { return space.norm(x); }

double l2x_norm(const VectorStepFunction<double>& f)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < f.cells(); ++k) {
        const double v = f.space().norm(f.cell(k));
        acc += v * v;
    }
    return std::sqrt(std::ldexp(acc, -static_cast<int>(f.grid().resolution())));
}

Rational l2x_norm_squared(const VectorStepFunction<Rational>& f)
{
    Rational acc;
    for (std::size_t k = 0; k < f.cells(); ++k) acc += f.space().norm_squared(f.cell(k));
    return acc * Rational(1, std::int64_t{1} << f.grid().resolution());
}

VectorStepFunction<double> to_double(const VectorStepFunction<Rational>& f)
{
    std::vector<double> data;
    data.reserve(f.data().size());
    for (const auto& v : f.data()) data.push_back(v.to_double());
    return {f.grid(), f.space(), std::move(data)};
}

StepFunction<double> to_double(const StepFunction<Rational>& f)
{
    std::vector<double> data;
    data.reserve(f.size());
    for (const auto& v : f.values()) data.push_back(v.to_double());
    return {f.grid(), std::move(data)};
}

// ---------------------------------------------------------------------------

OperatorSpec::OperatorSpec(NormedSpace domain, NormedSpace codomain, Eigen::MatrixXd matrix)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix))
{
    if (static_cast<std::size_t>(matrix_.rows()) != codomain_.dim() || static_cast<std::size_t>(matrix_.cols()) != domain_.dim())
        throw std::invalid_argument(fmt::format("operator matrix is {}x{}, expected {}x{} (codomain x domain)", matrix_.rows(),
                                                matrix_.cols(), codomain_.dim(), domain_.dim()));
    if (!matrix_.allFinite()) throw std::invalid_argument("operator matrix has non-finite entries");
}

OperatorSpec OperatorSpec::identity(const NormedSpace& space)
{
    const auto d = static_cast<Eigen::Index>(space.dim());
    return {space, space, Eigen::MatrixXd::Identity(d, d)};
}

VectorStepFunction<double> OperatorSpec::apply(const VectorStepFunction<double>& f) const
{
    if (!(f.space() == domain_)) throw std::invalid_argument("apply: function does not take values in the operator domain");
    VectorStepFunction<double> out(f.grid(), codomain_);
    const auto dx = static_cast<Eigen::Index>(domain_.dim());
    const auto dy = static_cast<Eigen::Index>(codomain_.dim());
    for (std::size_t k = 0; k < f.cells(); ++k) {
        Eigen::Map<const Eigen::VectorXd> x(f.cell(k).data(), dx);
        Eigen::Map<Eigen::VectorXd> y(out.cell(k).data(), dy);
        y.noalias() = matrix_ * x;
    }
    return out;
}

VectorStepFunction<double> OperatorSpec::apply_transpose(const VectorStepFunction<double>& g) const
{
    g.space().require_dim(codomain_.dim());
    VectorStepFunction<double> out(g.grid(), domain_);
    const auto dx = static_cast<Eigen::Index>(domain_.dim());
    const auto dy = static_cast<Eigen::Index>(codomain_.dim());
    for (std::size_t k = 0; k < g.cells(); ++k) {
        Eigen::Map<const Eigen::VectorXd> y(g.cell(k).data(), dy);
        Eigen::Map<Eigen::VectorXd> x(out.cell(k).data(), dx);
        x.noalias() = matrix_.transpose() * y;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t max_enumerated_dim = 24;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double image_norm(const OperatorSpec& T, const std::vector<double>& x)
{
    const Eigen::VectorXd y = T.matrix() * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return T.codomain().norm(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

// Iterates sign vectors with the first entry fixed to +1 (x and -x have
// the same image norm).
template <class Fn>
void for_each_sign_vector(std::size_t d, Fn&& fn)
{
    if (d > max_enumerated_dim) throw std::invalid_argument("operator_norm: sign enumeration limited to 24 dimensions");
    std::vector<double> s(d, 1.0);
    const std::uint64_t count = std::uint64_t{1} << (d - 1);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 1; i < d; ++i) s[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
        fn(s);
    }
}

std::vector<double> candidate_norming_vector(const OperatorSpec& T)
{
    const auto& X = T.domain();
    const auto& Y = T.codomain();
    const auto& M = T.matrix();
    std::vector<double> best;
    double best_value = -1.0;
    auto consider = [&](std::vector<double> x) {
        const double v = image_norm(T, x) / X.norm(x);
        if (v > best_value) {
            best_value = v;
            best = std::move(x);
        }
    };

    switch (X.kind()) {
    case NormKind::l1_weighted:
        for (std::size_t k = 0; k < X.dim(); ++k) {
            std::vector<double> x(X.dim(), 0.0);
            x[k] = 1.0 / X.weights()[k];
            consider(std::move(x));
        }
        return best;
    case NormKind::linf:
        for_each_sign_vector(X.dim(), [&](const std::vector<double>& s) { consider(s); });
        return best;
    case NormKind::euclidean:
        break;
    }

    switch (Y.kind()) {
    case NormKind::euclidean: {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinV);
        consider(to_std(svd.matrixV().col(0)));
        return best;
    }
    case NormKind::linf:
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            const Eigen::VectorXd r = M.row(i).transpose();
            if (r.norm() > 0.0) consider(to_std(r / r.norm()));
        }
        break;
    case NormKind::l1_weighted:
        for_each_sign_vector(Y.dim(), [&](const std::vector<double>& s) {
            Eigen::VectorXd phi(static_cast<Eigen::Index>(s.size()));
            for (std::size_t i = 0; i < s.size(); ++i) phi[static_cast<Eigen::Index>(i)] = s[i] * Y.weights()[i];
            const Eigen::VectorXd x = M.transpose() * phi;
            if (x.norm() > 0.0) consider(to_std(x / x.norm()));
        });
        break;
    }
    if (best.empty()) {
        best.assign(X.dim(), 0.0);
        best[0] = 1.0;
    }
    return best;
}

}  // namespace

OperatorNorm operator_norm(const OperatorSpec& T)
{
    auto x = candidate_norming_vector(T);
    const double nx = T.domain().norm(x);
    for (auto& v : x) v /= nx;
    return {image_norm(T, x), std::move(x)};
}

VectorStepFunction<double> apply_TSn(const OperatorSpec& T, const VectorStepFunction<double>& f, std::uint64_t n)
{
    return T.apply(partial_sum(f, n));
}

VectorStepFunction<double> constant_witness(const OperatorSpec& T, const DyadicGrid& grid)
{
    const auto x = operator_norm(T).norming_vector;
    VectorStepFunction<double> f(grid, T.domain());
    for (std::size_t k = 0; k < f.cells(); ++k) std::copy(x.begin(), x.end(), f.cell(k).begin());
    return f;
}

// ---------------------------------------------------------------------------
// Ascent
// ---------------------------------------------------------------------------

double ascent_quotient(const OperatorSpec& T, const ScalarProjection& P, const VectorStepFunction<double>& f)
{
    const double denom = l2x_norm(f);
    if (denom == 0.0) return 0.0;
    auto g = f;
    P(g);
    return l2x_norm(T.apply(g)) / denom;
}

AscentResult ascend_from(const OperatorSpec& T, const ScalarProjection& P, VectorStepFunction<double> f,
                         const AscentOptions& options)
{
    double nf = l2x_norm(f);
    if (nf == 0.0) return {};
    f.scale(1.0 / nf);
    double value = ascent_quotient(T, P, f);

    const auto& X = T.domain();
    const auto& Y = T.codomain();
    std::vector<double> unit(std::max(X.dim(), Y.dim()));
    for (unsigned it = 0; it < options.iterations; ++it) {
        auto g = f;
        P(g);
        auto phi = T.apply(g);
        for (std::size_t k = 0; k < phi.cells(); ++k) {
            auto cell = phi.cell(k);
            const double len = Y.norm(cell);
            std::span<double> u(unit.data(), Y.dim());
            Y.norming_functional(cell, u);
            for (std::size_t c = 0; c < cell.size(); ++c) cell[c] = len * u[c];
        }
        auto psi = T.apply_transpose(phi);
        P(psi);
        VectorStepFunction<double> next(f.grid(), X);
        for (std::size_t k = 0; k < psi.cells(); ++k) {
            const auto cell = psi.cell(k);
            const double len = X.dual_norm(cell);
            auto out = next.cell(k);
            X.norming_vector(cell, out);
            for (auto& v : out) v *= len;
        }
        const double nn = l2x_norm(next);
        if (nn == 0.0) break;
        next.scale(1.0 / nn);
        const double next_value = ascent_quotient(T, P, next);
        if (!(next_value > value)) break;
        const bool converged = next_value <= value * (1.0 + options.rel_improvement);
        f = std::move(next);
        value = next_value;
        if (converged) break;
    }
    return {value, std::move(f)};
}

AscentResult ascend_restarts(const OperatorSpec& T, const ScalarProjection& P, const DyadicGrid& grid,
                             const AscentOptions& options, std::uint64_t salt)
{
    const auto restarts = static_cast<std::int64_t>(options.restarts);
    std::vector<AscentResult> results(static_cast<std::size_t>(restarts));
    std::vector<std::exception_ptr> errors(results.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t r = 0; r < restarts; ++r) {
        try {
            std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                              static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32),
                              static_cast<std::uint32_t>(r)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> normal;
            VectorStepFunction<double> f(grid, T.domain());
            for (auto& v : f.data()) v = normal(rng);
            results[static_cast<std::size_t>(r)] = ascend_from(T, P, std::move(f), options);
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    AscentResult best;
    for (auto& r : results)
        if (r.witness && (!best.witness || r.value > best.value)) best = std::move(r);
    return best;
}

// ---------------------------------------------------------------------------
// delta
// ---------------------------------------------------------------------------

namespace {

struct DeltaBounds {
    OperatorNorm t_norm;
    double hilbert_through_domain = std::numeric_limits<double>::infinity();
    double hilbert_through_codomain = std::numeric_limits<double>::infinity();
};

// Norm of an auxiliary map, or +inf when its sign enumeration is too large.
double norm_or_infinity(const OperatorSpec& S)
{
    try {
        return operator_norm(S).value;
    } catch (const std::invalid_argument&) {
        return std::numeric_limits<double>::infinity();
    }
}

DeltaBounds delta_bounds(const OperatorSpec& T)
{
    DeltaBounds b{operator_norm(T)};
    const auto dx = static_cast<Eigen::Index>(T.domain().dim());
    const auto dy = static_cast<Eigen::Index>(T.codomain().dim());
    const auto l2x = NormedSpace::euclidean(T.domain().dim());
    const auto l2y = NormedSpace::euclidean(T.codomain().dim());
    // ||T S_n f||_Y <= ||T||_{2->Y} ||S_n f||_{L2(l2)} <= ||T||_{2->Y} ||id||_{X->2} ||f||_X
    b.hilbert_through_domain = norm_or_infinity(OperatorSpec(l2x, T.codomain(), T.matrix())) *
                               norm_or_infinity(OperatorSpec(T.domain(), l2x, Eigen::MatrixXd::Identity(dx, dx)));
    b.hilbert_through_codomain = norm_or_infinity(OperatorSpec(l2y, T.codomain(), Eigen::MatrixXd::Identity(dy, dy))) *
                                 norm_or_infinity(OperatorSpec(T.domain(), l2y, T.matrix()));
    return b;
}

void require_delta_order(std::uint64_t n, const DyadicGrid& grid)
{
    if (n == 0 || n > grid.cells()) throw std::out_of_range("delta: order must satisfy 1 <= n <= 2^q");
}

bool both_euclidean(const OperatorSpec& T)
{
    return T.domain().kind() == NormKind::euclidean && T.codomain().kind() == NormKind::euclidean;
}

std::pair<double, const char*> best_upper(const OperatorSpec& T, const DeltaBounds& bounds, std::uint64_t n)
{
    const double t_norm = bounds.t_norm.value;
    if (both_euclidean(T)) return {t_norm, "euclidean-exact"};
    std::pair<double, const char*> best{t_norm * lebesgue_constant(n).to_double(), "kernel"};
    auto consider = [&](double v, const char* name) {
        if (v < best.first) best = {v, name};
    };
    consider(bounds.hilbert_through_domain, "hilbert-domain");
    consider(bounds.hilbert_through_codomain, "hilbert-codomain");
    if (is_power_of_two(n)) consider(t_norm, "conditional-expectation");
    return best;
}

NormEstimate delta_norm_with(const OperatorSpec& T, const DeltaBounds& bounds, std::uint64_t n, const DyadicGrid& grid,
                             const DeltaOptions& options)
{
    require_delta_order(n, grid);
    const double t_norm = bounds.t_norm.value;
    NormEstimate est;
    est.order = n;

    if (both_euclidean(T)) {
        // S_n is an orthogonal projection on L_2 (x) R^d.
        est.lower = est.upper = t_norm;
        est.witness = constant_witness(T, grid);
        est.method = "euclidean-exact";
        return est;
    }

    const auto [upper, bound_name] = best_upper(T, bounds, n);
    est.upper = upper;

    const ScalarProjection P = [n](VectorStepFunction<double>& f) { partial_sum_inplace(f, n); };
    const double tol = options.ascent.tolerance;
    AscentResult best{0.0, constant_witness(T, grid)};
    best.value = ascent_quotient(T, P, *best.witness);
    std::string source = "constant";
    auto consider = [&](AscentResult r, const std::string& name) {
        if (r.witness && r.value > best.value) {
            best = std::move(r);
            source = name;
        }
    };
    for (const auto& s : options.seeds) {
        if (!(s.grid() == grid) || !(s.space() == T.domain()))
            throw std::invalid_argument("delta_norm: seed witness has the wrong grid or space");
        consider({ascent_quotient(T, P, s), s}, "seed");
    }
    if (best.value < est.upper * (1.0 - tol)) {
        for (const auto& s : options.seeds) consider(ascend_from(T, P, s, options.ascent), "seeded-ascent");
        consider(ascend_restarts(T, P, grid, options.ascent, n), "ascent");
    }

    est.witness = std::move(best.witness);
    est.lower = best.value;
    if (est.lower > est.upper) {
        if (est.lower > est.upper * (1.0 + tol))
            throw std::logic_error(fmt::format("delta_norm: witness quotient {} exceeds certified upper bound {}", est.lower,
                                               est.upper));
        est.upper = est.lower;
    }
    est.method = fmt::format("lower={} upper={}", source, bound_name);
    return est;
}

}  // namespace

double delta_upper_bound(const OperatorSpec& T, std::uint64_t n)
{
    if (n == 0) throw std::out_of_range("delta: order must be >= 1");
    return best_upper(T, delta_bounds(T), n).first;
}

double delta_quotient(const OperatorSpec& T, const VectorStepFunction<double>& f, std::uint64_t n)
{
    const double denom = l2x_norm(f);
    if (denom == 0.0) return 0.0;
    return l2x_norm(apply_TSn(T, f, n)) / denom;
}

NormEstimate delta_norm(const OperatorSpec& T, std::uint64_t n, const DyadicGrid& grid, const DeltaOptions& options)
{
    require_delta_order(n, grid);
    return delta_norm_with(T, delta_bounds(T), n, grid, options);
}

std::vector<NormEstimate> delta_profile(const OperatorSpec& T, std::uint64_t n, const DyadicGrid& grid,
                                        const DeltaOptions& options)
{
    require_delta_order(n, grid);
    const auto bounds = delta_bounds(T);
    std::vector<NormEstimate> out;
    out.reserve(n);
    for (std::uint64_t k = 1; k <= n; ++k) out.push_back(delta_norm_with(T, bounds, k, grid, options));
    return out;
}

NormEstimate delta_max(const std::vector<NormEstimate>& profile)
{
    if (profile.empty()) throw std::invalid_argument("delta_max: empty profile");
    NormEstimate est;
    est.lower = -1.0;
    for (const auto& e : profile) {
        if (e.lower > est.lower) {
            est.lower = e.lower;
            est.witness = e.witness;
            est.order = e.order;
        }
        est.upper = std::max(est.upper, e.upper);
    }
    est.method = fmt::format("max over k<={} (witness at k={})", profile.size(), est.order);
    return est;
}

NormEstimate delta_max(const OperatorSpec& T, std::uint64_t n, const DyadicGrid& grid, const DeltaOptions& options)
{
    return delta_max(delta_profile(T, n, grid, options));
}

}  // namespace walsh
