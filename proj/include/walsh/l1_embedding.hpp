#pragma once

#include <cstdint>
#include <vector>

#include "walsh/operators.hpp"
#include "walsh/walsh.hpp"

namespace walsh {

// R^{2^p} with ||x|| = 2^-p sum |x_s|: L_1[0,1] restricted to step functions
// on the grid of resolution p.
NormedSpace l1_space(unsigned p);

// F(t) = f(t xor .): cell t of F is the translate of f by t, viewed as an
// element of l1_space(p).
template <Scalar T>
VectorStepFunction<T> embed(const StepFunction<T>& f)
{
    const auto& grid = f.grid();
    VectorStepFunction<T> F(grid, l1_space(grid.resolution()));
    for (std::size_t t = 0; t < grid.cells(); ++t) {
        auto row = F.cell(t);
        for (std::size_t s = 0; s < grid.cells(); ++s) row[s] = f[t ^ s];
    }
    return F;
}

struct EmbeddingIdentities {
    bool coefficients = false;         // <F, w_j> = <f, w_j> w_j for all j
    bool norm = false;                 // ||F||_2 = ||f||_1
    std::vector<bool> partial_sums;    // ||S_n F||_2 = ||S_n f||_1, n = 0..2^p

    bool all() const;
};

// Exact rational check of the three embedding identities.
EmbeddingIdentities check_embedding_identities(const StepFunction<Rational>& f);

struct CorollaryWitness {
    VectorStepFunction<Rational> F;  // embed(1_[0, 2^-p))
    Rational partial_sum_norm;       // ||S_n F||_2
    Rational witness_norm;           // ||F||_2 = 2^-p
    Rational ratio;                  // equals L_n
};

// Witness for delta(L_1 | W_n, W_n) >= L_n. The L_2^{L_1} norms are exact
// rationals because ||S_n F(t)||_1 does not depend on t.
CorollaryWitness corollary_witness(unsigned p, std::uint64_t n);

// Structured starting points for delta searches: the embedded indicator of
// the first cell, whenever the operator domain has dimension 2^q.
std::vector<VectorStepFunction<double>> embedding_seeds(const OperatorSpec& T, const DyadicGrid& grid);

}  // namespace walsh
