#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "walsh/operators.hpp"

namespace walsh {

// X-valued dyadic martingale (M_0, ..., M_p) on a grid of resolution q >= p.
// M_i is constant on order-i dyadic intervals and M_i = E_i(M_p).
class DyadicMartingale {
public:
    explicit DyadicMartingale(std::vector<VectorStepFunction<double>> levels);

    unsigned depth() const { return static_cast<unsigned>(levels_.size() - 1); }
    const VectorStepFunction<double>& level(unsigned i) const { return levels_.at(i); }
    const VectorStepFunction<double>& final() const { return levels_.back(); }
    const DyadicGrid& grid() const { return levels_.front().grid(); }
    const NormedSpace& space() const { return levels_.front().space(); }

    // E_i(M_p) = M_i for every i, to the given absolute tolerance.
    bool is_adapted(double tol = 1e-12) const;
    // M_i = sum_{j < 2^i} x_j h_j: the Haar coefficients of M_i vanish for
    // j >= 2^i.
    bool has_haar_form(double tol = 1e-12) const;

    // Same martingale viewed at a larger depth (levels beyond p repeat M_p).
    DyadicMartingale extended(unsigned depth) const;

private:
    std::vector<VectorStepFunction<double>> levels_;
};

// M_i := E_i(M_p) for i = 0..p. M_p must be constant on order-p intervals.
DyadicMartingale martingale_from_final(const VectorStepFunction<double>& final, unsigned p);

// dM_i = M_{i+1} - M_i, i = 0..p-1.
std::vector<VectorStepFunction<double>> differences(const DyadicMartingale& M);

struct SignPattern {
    std::vector<int> signs;

    // eps_i = -1 iff bit i of mask is set.
    static SignPattern from_mask(std::uint64_t mask, unsigned p);
    static SignPattern all_plus(unsigned p) { return {std::vector<int>(p, 1)}; }
    std::size_t size() const { return signs.size(); }
};

// f |-> sum_i eps_i (E_{i+1} - E_i) f on a grid of resolution >= signs.size();
// self-adjoint for the L_2 pairing.
void martingale_transform_inplace(VectorStepFunction<double>& f, std::span<const int> signs);

// ||sum_i eps_i T dM_i||_2 in L_2^Y.
double transform_norm(const OperatorSpec& T, const DyadicMartingale& M, std::span<const int> signs);

// ---------------------------------------------------------------------------
// mu_p(T)
// ---------------------------------------------------------------------------

struct MuExactOptions {
    std::uint64_t seed = 0x5eedc0ffee2024ULL;
    unsigned max_depth = 10;
    unsigned lanczos_steps = 64;
};

// Euclidean X and Y only. Largest singular value of the assembled map
// M_p |-> sum eps_i T dM_i (grid q = p), maximized over all 2^p sign
// patterns; mu_0 := 0.
NormEstimate mu_exact_euclidean(const OperatorSpec& T, unsigned p, const MuExactOptions& options = {});

struct MuSeed {
    VectorStepFunction<double> final;  // M_p on the grid of resolution p
    std::vector<int> signs;
};

struct MuSearchOptions {
    AscentOptions ascent{.restarts = 8};
    unsigned max_patterns = 256;
    std::vector<MuSeed> seeds;
};

// Certified lower bound on mu_p(T) with an (M_p, eps) witness; the upper end
// is 2 * (certified upper bound of delta^max(T | W_{2^p}, W_{2^p})).
NormEstimate mu_lower_search(const OperatorSpec& T, unsigned p, const MuSearchOptions& options = {});

// ---------------------------------------------------------------------------
// Witness conversions.
// ---------------------------------------------------------------------------

struct WalshWitness {
    std::uint64_t n = 0;                  // sum_{i in I} 2^i
    VectorStepFunction<double> g;         // M_p * w_n
    double transform_side = 0.0;          // ||sum_{i in I} T dM_i||_2
    double walsh_side = 0.0;              // ||T S_n(g)||_2
    double g_norm = 0.0;                  // ||g||_2
    double final_norm = 0.0;              // ||M_p||_2
    bool mean_free = false;               // M_0 == 0
};

// Martingale differences over the index set I rewritten as a Walsh partial
// sum: ||sum_{i in I} T dM_i|| = ||T S_n(M_p w_n)|| and ||M_p w_n|| = ||M_p||.
// Any M_0 is accepted; dM_i never involves the constant term.
WalshWitness witness_to_walsh(const OperatorSpec& T, const DyadicMartingale& M, std::span<const unsigned> indices);

struct MartingaleWitness {
    DyadicMartingale martingale;  // M_i = S_{2^i}(f w_n), depth k_s + 1
    std::vector<int> signs;       // the better of the two sign choices
    double bound = 0.0;           // certified lower bound for mu_{k_s+1}(T)
    double partial_sum_norm = 0.0;  // ||T S_n f||_2
    double split_norm = 0.0;        // ||sum_{i in K} T dM_i||_2 (equals partial_sum_norm)
    double all_plus_norm = 0.0;     // eps = +1
    double split_sign_norm = 0.0;   // eps_i = +1 iff i in {k_1..k_s}
    double denominator = 0.0;       // ||S_{2^{k_s+1}}(f w_n)||_2
};

// Builds the martingale M_i = S_{2^i}(f w_n) from a delta witness f and
// bounds ||T S_n f|| by the average of two martingale transforms.
MartingaleWitness witness_to_martingale(const OperatorSpec& T, const VectorStepFunction<double>& f, std::uint64_t n);

// ---------------------------------------------------------------------------
// delta^max <= mu_p <= 2 delta^max
// ---------------------------------------------------------------------------

struct Relation {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
};

struct TheoremOptions {
    AscentOptions ascent;
    MuSearchOptions mu;
    double tolerance = 1e-9;
};

struct TheoremReport {
    unsigned p = 0;
    bool exact_regime = false;
    NormEstimate delta_max;
    NormEstimate mu;
    double converted_bound = 0.0;  // best certified mu bound from witness_to_martingale
    std::vector<Relation> relations;

    bool passed() const;
    std::string sandwich() const;
};

TheoremReport theorem_check(const OperatorSpec& T, unsigned p, const TheoremOptions& options = {});

}  // namespace walsh
