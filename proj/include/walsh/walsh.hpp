#pragma once

#include <bit>
#include <cstdint>
#include <span>

#include "walsh/step_function.hpp"

namespace walsh {

// ---------------------------------------------------------------------------
// Function evaluation on a grid.
//
// Convention: r_i on cell k of a q-grid is read from bit (q - i) of k, so r_1
// is the most significant bit (left/right half of [0,1)). The Paley-ordered
// Walsh function w_n multiplies r_{i+1} for every set bit i of n, hence
//   w_n(k) = (-1)^{popcount(n & bit_reverse(k, q))}.
// ---------------------------------------------------------------------------

int rademacher(unsigned i, std::size_t cell, const DyadicGrid& grid);
StepFunction<std::int64_t> rademacher_function(unsigned i, const DyadicGrid& grid);

inline int walsh_value(std::uint64_t n, std::size_t cell, const DyadicGrid& grid)
{
    return (std::popcount(n & bit_reverse(cell, grid.resolution())) & 1) ? -1 : 1;
}

StepFunction<std::int64_t> walsh_eval(std::uint64_t n, const DyadicGrid& grid);

template <Scalar T>
StepFunction<T> walsh_as(std::uint64_t n, const DyadicGrid& grid)
{
    const auto w = walsh_eval(n, grid);
    StepFunction<T> out(grid);
    for (std::size_t k = 0; k < grid.cells(); ++k) out[k] = T(w[k]);
    return out;
}

// Haar function h_j = 2^{(p-1)/2} * s_j where s_j has values in {-1,0,1};
// j = 2^{p-1} + m for j >= 1, and h_0 = 1 (level 0).
struct HaarFunction {
    unsigned level = 0;  // p
    StepFunction<std::int64_t> signs;

    double scale() const { return level == 0 ? 1.0 : std::sqrt(std::ldexp(1.0, static_cast<int>(level) - 1)); }
    StepFunction<double> values() const;
};

HaarFunction haar(std::uint64_t j, const DyadicGrid& grid);
StepFunction<double> haar_eval(std::uint64_t j, const DyadicGrid& grid);

// Exact <h_i, h_j>. Throws std::domain_error if the value would be irrational,
// i.e. if sign patterns on different levels fail to be orthogonal.
Rational haar_inner_product(const HaarFunction& a, const HaarFunction& b);

// ---------------------------------------------------------------------------
// Fast Walsh-Hadamard transform in Paley order.
//
// Row kernels act on `cells` rows of `width` contiguous entries; a scalar
// function is width 1, a vector step function transforms all coordinates at
// once. The butterfly computes the natural-order Hadamard transform
// H[a][b] = (-1)^{popcount(a & b)}; Paley order is obtained by bit-reversing
// the cell index.
// ---------------------------------------------------------------------------

namespace detail {

template <class T>
void hadamard_rows_serial(std::span<T> data, std::size_t cells, std::size_t width)
{
    for (std::size_t h = 1; h < cells; h <<= 1) {
        for (std::size_t block = 0; block < cells; block += 2 * h) {
            for (std::size_t i = block; i < block + h; ++i) {
                T* a = data.data() + i * width;
                T* b = data.data() + (i + h) * width;
                for (std::size_t c = 0; c < width; ++c) {
                    const T x = a[c];
                    const T y = b[c];
                    a[c] = x + y;
                    b[c] = x - y;
                }
            }
        }
    }
}

// Each butterfly pair within a stage is independent; the result is bitwise
// identical to the serial kernel regardless of thread count.
void hadamard_rows_parallel(std::span<double> data, std::size_t cells, std::size_t width);

template <class T>
void hadamard_rows(std::span<T> data, std::size_t cells, std::size_t width)
{
    constexpr std::size_t parallel_threshold = std::size_t{1} << 14;
    if constexpr (std::is_same_v<T, double>) {
        if (cells * width >= parallel_threshold) {
            hadamard_rows_parallel(data, cells, width);
            return;
        }
    }
    hadamard_rows_serial(data, cells, width);
}

template <class T>
void bit_reverse_rows(std::span<T> data, std::size_t cells, std::size_t width, unsigned q)
{
    for (std::size_t k = 0; k < cells; ++k) {
        const std::size_t r = bit_reverse(k, q);
        if (r > k) std::swap_ranges(data.begin() + k * width, data.begin() + (k + 1) * width, data.begin() + r * width);
    }
}

template <class T>
void scale_rows(std::span<T> data, unsigned q)
{
    const T s = ScalarTraits<T>::pow2_inverse(q);
    for (auto& v : data) v *= s;
}

}  // namespace detail

// Walsh coefficients <f, w_i> for i < 2^q, in Paley order.
template <Scalar T>
struct WalshCoefficients {
    DyadicGrid grid;
    std::vector<T> coeffs;
};

template <Scalar T>
WalshCoefficients<T> fwht(const StepFunction<T>& f)
{
    std::vector<T> data(f.values().begin(), f.values().end());
    const unsigned q = f.grid().resolution();
    detail::bit_reverse_rows<T>(data, f.size(), 1, q);
    detail::hadamard_rows<T>(data, f.size(), 1);
    detail::scale_rows<T>(data, q);
    return {f.grid(), std::move(data)};
}

template <Scalar T>
StepFunction<T> ifwht(const WalshCoefficients<T>& c)
{
    std::vector<T> data = c.coeffs;
    detail::hadamard_rows<T>(data, data.size(), 1);
    detail::bit_reverse_rows<T>(data, data.size(), 1, c.grid.resolution());
    return StepFunction<T>(c.grid, std::move(data));
}

// Serial-only reference transform of a double-valued function; used by the
// benchmark and the thread-independence tests.
WalshCoefficients<double> fwht_serial(const StepFunction<double>& f);
WalshCoefficients<double> fwht_parallel(const StepFunction<double>& f);

// In-place coordinatewise transforms for vector step functions. After
// forward, row i holds the coefficient vector <f, w_i>.
template <Scalar T>
void fwht_inplace(VectorStepFunction<T>& f)
{
    const unsigned q = f.grid().resolution();
    detail::bit_reverse_rows<T>(f.data(), f.cells(), f.dim(), q);
    detail::hadamard_rows<T>(f.data(), f.cells(), f.dim());
    detail::scale_rows<T>(f.data(), q);
}

template <Scalar T>
void ifwht_inplace(VectorStepFunction<T>& f)
{
    detail::hadamard_rows<T>(f.data(), f.cells(), f.dim());
    detail::bit_reverse_rows<T>(f.data(), f.cells(), f.dim(), f.grid().resolution());
}

// ---------------------------------------------------------------------------
// Partial sums and conditional expectations.
// ---------------------------------------------------------------------------

inline void require_partial_sum_order(std::uint64_t n, const DyadicGrid& grid)
{
    if (n > grid.cells()) throw std::out_of_range("partial sum order exceeds grid resolution");
}

// S_n(f) = sum_{i<n} <f,w_i> w_i, with S_0 = 0 and S_{2^q} = f exactly.
template <Scalar T>
StepFunction<T> partial_sum(const StepFunction<T>& f, std::uint64_t n)
{
    require_partial_sum_order(n, f.grid());
    if (n == f.size()) return f;
    if (n == 0) return StepFunction<T>(f.grid());
    auto c = fwht(f);
    std::fill(c.coeffs.begin() + static_cast<std::ptrdiff_t>(n), c.coeffs.end(), T(0));
    return ifwht(c);
}

template <Scalar T>
void partial_sum_inplace(VectorStepFunction<T>& f, std::uint64_t n)
{
    require_partial_sum_order(n, f.grid());
    if (n == f.cells()) return;
    if (n == 0) {
        std::fill(f.data().begin(), f.data().end(), T(0));
        return;
    }
    fwht_inplace(f);
    std::fill(f.data().begin() + static_cast<std::ptrdiff_t>(n * f.dim()), f.data().end(), T(0));
    ifwht_inplace(f);
}

template <Scalar T>
VectorStepFunction<T> partial_sum(VectorStepFunction<T> f, std::uint64_t n)
{
    partial_sum_inplace(f, n);
    return f;
}

namespace detail {

template <class T>
void block_average_rows(std::span<T> data, std::size_t cells, std::size_t width, unsigned q, unsigned level)
{
    const std::size_t block = cells >> level;
    const unsigned shift = q - level;
    std::vector<T> acc(width);
    for (std::size_t start = 0; start < cells; start += block) {
        std::fill(acc.begin(), acc.end(), T(0));
        for (std::size_t k = start; k < start + block; ++k)
            for (std::size_t c = 0; c < width; ++c) acc[c] += data[k * width + c];
        if (shift > 0) detail::scale_rows<T>(acc, shift);
        for (std::size_t k = start; k < start + block; ++k)
            for (std::size_t c = 0; c < width; ++c) data[k * width + c] = acc[c];
    }
}

}  // namespace detail

inline void require_level(unsigned level, const DyadicGrid& grid)
{
    if (level > grid.resolution()) throw std::out_of_range("filtration level exceeds grid resolution");
}

// E_i(f): average over each order-i dyadic interval.
template <Scalar T>
StepFunction<T> conditional_expectation(const StepFunction<T>& f, unsigned level)
{
    require_level(level, f.grid());
    std::vector<T> data(f.values().begin(), f.values().end());
    detail::block_average_rows<T>(data, f.size(), 1, f.grid().resolution(), level);
    return StepFunction<T>(f.grid(), std::move(data));
}

template <Scalar T>
void conditional_expectation_inplace(VectorStepFunction<T>& f, unsigned level)
{
    require_level(level, f.grid());
    detail::block_average_rows<T>(f.data(), f.cells(), f.dim(), f.grid().resolution(), level);
}

template <Scalar T>
VectorStepFunction<T> conditional_expectation(VectorStepFunction<T> f, unsigned level)
{
    conditional_expectation_inplace(f, level);
    return f;
}

// Coefficient order conversions layered on Paley order (CLI only).
enum class WalshOrder { paley, natural, sequency };
WalshOrder parse_walsh_order(std::string_view name);
// Paley index of the coefficient stored at position `pos` of the given order.
std::uint64_t paley_index(std::uint64_t pos, WalshOrder order, unsigned q);
std::vector<double> reorder_from_paley(std::span<const double> paley, WalshOrder order, unsigned q);
std::vector<double> reorder_to_paley(std::span<const double> ordered, WalshOrder order, unsigned q);

}  // namespace walsh
