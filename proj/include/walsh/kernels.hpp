#pragma once

#include <cstdint>
#include <vector>

#include "walsh/walsh.hpp"

namespace walsh {

using IntStepFunction = StepFunction<std::int64_t>;

inline void require_kernel_order(std::uint64_t n, const DyadicGrid& grid)
{
    if (n == 0 || n > grid.cells()) throw std::out_of_range("Dirichlet kernel order must satisfy 1 <= n <= 2^q");
}

// D_n = sum_{i<n} w_i, integer valued.
IntStepFunction dirichlet(std::uint64_t n, const DyadicGrid& grid);

// D_n rebuilt from the factorization
//   D_n = w_n * sum_{i in {k_1..k_s}} (D_{2^{i+1}} - D_{2^i}),
// where n = sum 2^{k_l}. Requires n < 2^q so that w_n lives on the grid.
IntStepFunction dirichlet_factored(std::uint64_t n, const DyadicGrid& grid);

// S_n(f)(t) = integral f(s) D_n(s xor t) ds, evaluated directly in O(4^q).
template <Scalar T>
StepFunction<T> kernel_partial_sum(const StepFunction<T>& f, std::uint64_t n)
{
    const auto& grid = f.grid();
    require_kernel_order(n, grid);
    const auto kernel = dirichlet(n, grid);
    StepFunction<T> out(grid);
    for (std::size_t t = 0; t < grid.cells(); ++t) {
        T acc(0);
        for (std::size_t s = 0; s < grid.cells(); ++s) {
            const auto d = kernel[s ^ t];
            if (d != 0) acc += f[s] * T(d);
        }
        out[t] = acc;
    }
    // One common 2^-q factor for the whole integral.
    for (auto& v : out.values()) v *= ScalarTraits<T>::pow2_inverse(grid.resolution());
    return out;
}

// L_n = integral |D_n|, exact. The one-argument form uses the coarsest grid
// that resolves D_n.
Rational lebesgue_constant(std::uint64_t n, const DyadicGrid& grid);
Rational lebesgue_constant(std::uint64_t n);

struct LebesgueTable {
    unsigned p = 0;
    std::vector<Rational> values;       // values[n-1] = L_n, 1 <= n <= 2^p
    std::vector<Rational> running_max;  // running_max[n-1] = max_{k<=n} L_k

    Rational at(std::uint64_t n) const { return values.at(n - 1); }
    Rational max_at(std::uint64_t n) const { return running_max.at(n - 1); }
};

// Incremental table D_{n+1} = D_n + w_n, one pass, O(4^p).
LebesgueTable lebesgue_table_serial(unsigned p);
// Same table; threads take contiguous chunks of n, seed D_a by a fast
// inverse transform, then run the incremental recurrence.
LebesgueTable lebesgue_table(unsigned p);

struct LebesgueMax {
    unsigned p = 0;
    Rational value;          // max_{n <= 2^p} L_n
    std::uint64_t argmax = 0;  // smallest maximizing n
    Rational lower_bound;    // p/8
    Rational upper_bound;    // p
    bool within_bounds = false;
};

LebesgueMax lebesgue_max(unsigned p);
LebesgueMax lebesgue_max(const LebesgueTable& table);

}  // namespace walsh
