#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "walsh/rational.hpp"

namespace walsh {

enum class NormKind { euclidean, l1_weighted, linf };

std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view tag);

// Finite-dimensional real normed space: R^d with one of three norms.
// l1_weighted(w) is sum_k w_k |x_k|; with w_k = 2^-p on 2^p coordinates it
// discretizes L_1[0,1].
class NormedSpace {
public:
    static NormedSpace euclidean(std::size_t dim);
    static NormedSpace linf(std::size_t dim);
    static NormedSpace l1_weighted(std::vector<double> weights);
    static NormedSpace uniform_l1(std::size_t dim);

    NormKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    const std::vector<double>& weights() const { return weights_; }

    double norm(std::span<const double> x) const;
    // Norm of a functional a acting by a(x) = sum a_k x_k.
    double dual_norm(std::span<const double> a) const;

    // Unit-norm functional a with a(x) = ||x|| (zero for x = 0).
    void norming_functional(std::span<const double> x, std::span<double> out) const;
    // Unit-norm vector x with a(x) = ||a||_* (zero for a = 0).
    void norming_vector(std::span<const double> a, std::span<double> out) const;

    // Exact evaluation on rational points. Euclidean norms are generally
    // irrational, so only the squared norm is offered for every kind.
    Rational norm(std::span<const Rational> x) const;
    Rational norm_squared(std::span<const Rational> x) const;

    void require_dim(std::size_t d) const;

    friend bool operator==(const NormedSpace&, const NormedSpace&) = default;

private:
    NormedSpace(NormKind kind, std::size_t dim, std::vector<double> weights);

    NormKind kind_ = NormKind::euclidean;
    std::size_t dim_ = 0;
    std::vector<double> weights_;
};

// Exact rational value of a finite double; throws std::overflow_error when
// the binary fraction does not fit the 64-bit Rational.
Rational exact_rational(double x);

}  // namespace walsh
