#include "walsh/normed_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace walsh {

std::string_view to_string(NormKind kind)
{
    switch (kind) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::l1_weighted: return "l1_weighted";
    case NormKind::linf: return "linf";
    }
    return "?";
}

NormKind parse_norm_kind(std::string_view tag)
{
    if (tag == "euclidean") return NormKind::euclidean;
    if (tag == "l1_weighted") return NormKind::l1_weighted;
    if (tag == "linf") return NormKind::linf;
    throw std::invalid_argument("unknown norm tag '" + std::string(tag) + "'");
}

NormedSpace::NormedSpace(NormKind kind, std::size_t dim, std::vector<double> weights)
    : kind_(kind), dim_(dim), weights_(std::move(weights))
{
    if (dim_ == 0) throw std::invalid_argument("NormedSpace: dimension must be positive");
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("NormedSpace: weights must be positive and finite");
    }
}

NormedSpace NormedSpace::euclidean(std::size_t dim) { return {NormKind::euclidean, dim, {}}; }
NormedSpace NormedSpace::linf(std::size_t dim) { return {NormKind::linf, dim, {}}; }
NormedSpace NormedSpace::l1_weighted(std::vector<double> weights)
{
    const auto d = weights.size();
    return {NormKind::l1_weighted, d, std::move(weights)};
}
NormedSpace NormedSpace::uniform_l1(std::size_t dim)
{
    return l1_weighted(std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

void NormedSpace::require_dim(std::size_t d) const
{
    if (d != dim_) throw std::invalid_argument("dimension mismatch: expected " + std::to_string(dim_) + ", got " + std::to_string(d));
}

double NormedSpace::norm(std::span<const double> x) const
{
    require_dim(x.size());
    double acc = 0.0;
    switch (kind_) {
    case NormKind::euclidean:
        for (double v : x) acc += v * v;
        return std::sqrt(acc);
    case NormKind::l1_weighted:
        for (std::size_t k = 0; k < dim_; ++k) acc += weights_[k] * std::abs(x[k]);
        return acc;
    case NormKind::linf:
        for (double v : x) acc = std::max(acc, std::abs(v));
        return acc;
    }
    return acc;
}

double NormedSpace::dual_norm(std::span<const double> a) const
{
    require_dim(a.size());
    double acc = 0.0;
    switch (kind_) {
    case NormKind::euclidean:
        for (double v : a) acc += v * v;
        return std::sqrt(acc);
    case NormKind::l1_weighted:
        for (std::size_t k = 0; k < dim_; ++k) acc = std::max(acc, std::abs(a[k]) / weights_[k]);
        return acc;
    case NormKind::linf:
        for (double v : a) acc += std::abs(v);
        return acc;
    }
    return acc;
}

namespace {
double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }
}  // namespace

void NormedSpace::norming_functional(std::span<const double> x, std::span<double> out) const
{
    require_dim(x.size());
    require_dim(out.size());
    std::fill(out.begin(), out.end(), 0.0);
    const double nx = norm(x);
    if (nx == 0.0) return;
    switch (kind_) {
    case NormKind::euclidean:
        for (std::size_t k = 0; k < dim_; ++k) out[k] = x[k] / nx;
        break;
    case NormKind::l1_weighted:
        for (std::size_t k = 0; k < dim_; ++k) out[k] = x[k] == 0.0 ? 0.0 : weights_[k] * sign(x[k]);
        break;
    case NormKind::linf: {
        std::size_t best = 0;
        for (std::size_t k = 1; k < dim_; ++k)
            if (std::abs(x[k]) > std::abs(x[best])) best = k;
        out[best] = sign(x[best]);
        break;
    }
    }
}

void NormedSpace::norming_vector(std::span<const double> a, std::span<double> out) const
{
    require_dim(a.size());
    require_dim(out.size());
    std::fill(out.begin(), out.end(), 0.0);
    const double na = dual_norm(a);
    if (na == 0.0) return;
    switch (kind_) {
    case NormKind::euclidean:
        for (std::size_t k = 0; k < dim_; ++k) out[k] = a[k] / na;
        break;
    case NormKind::l1_weighted: {
        std::size_t best = 0;
        for (std::size_t k = 1; k < dim_; ++k)
            if (std::abs(a[k]) / weights_[k] > std::abs(a[best]) / weights_[best]) best = k;
        out[best] = sign(a[best]) / weights_[best];
        break;
    }
    case NormKind::linf:
        for (std::size_t k = 0; k < dim_; ++k) out[k] = a[k] == 0.0 ? 0.0 : sign(a[k]);
        break;
    }
}

Rational NormedSpace::norm(std::span<const Rational> x) const
{
    require_dim(x.size());
    Rational acc;
    switch (kind_) {
    case NormKind::euclidean:
        throw std::domain_error("exact euclidean norm is not rational in general; use norm_squared");
    case NormKind::l1_weighted:
        for (std::size_t k = 0; k < dim_; ++k) acc += exact_rational(weights_[k]) * abs(x[k]);
        return acc;
    case NormKind::linf:
        for (const auto& v : x) acc = std::max(acc, abs(v));
        return acc;
    }
    return acc;
}

Rational NormedSpace::norm_squared(std::span<const Rational> x) const
{
    if (kind_ == NormKind::euclidean) {
        require_dim(x.size());
        Rational acc;
        for (const auto& v : x) acc += v * v;
        return acc;
    }
    const auto n = norm(x);
    return n * n;
}

Rational exact_rational(double x)
{
    if (!std::isfinite(x)) throw std::domain_error("exact_rational: non-finite value");
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
    // Shift the mantissa into an integer, then fold the exponent back in.
    std::int64_t m = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    while (m != 0 && (m & 1) == 0) {
        m >>= 1;
        ++exp;
    }
    if (m == 0) return Rational(0);
    if (exp >= 0) {
        if (exp > 62) throw std::overflow_error("exact_rational: value too large");
        return Rational(m) * Rational(std::int64_t{1} << exp);
    }
    if (-exp > 62) throw std::overflow_error("exact_rational: denominator too large");
    return Rational(m, std::int64_t{1} << -exp);
}

}  // namespace walsh
