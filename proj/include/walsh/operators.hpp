#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "walsh/kernels.hpp"
#include "walsh/normed_space.hpp"
#include "walsh/step_function.hpp"

namespace walsh {

double vector_norm(std::span<const double> x, const NormedSpace& space);

// Linear map T: X -> Y stored as a dim(Y) x dim(X) matrix.
class OperatorSpec {
public:
    OperatorSpec(NormedSpace domain, NormedSpace codomain, Eigen::MatrixXd matrix);

    static OperatorSpec identity(const NormedSpace& space);

    const NormedSpace& domain() const { return domain_; }
    const NormedSpace& codomain() const { return codomain_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    OperatorSpec scaled(double c) const { return {domain_, codomain_, c * matrix_}; }

    // Pointwise application T f(t).
    VectorStepFunction<double> apply(const VectorStepFunction<double>& f) const;
    // Pointwise transpose T^T g(t), mapping Y*-valued to X*-valued functions.
    VectorStepFunction<double> apply_transpose(const VectorStepFunction<double>& g) const;

private:
    NormedSpace domain_;
    NormedSpace codomain_;
    Eigen::MatrixXd matrix_;
};

struct OperatorNorm {
    double value = 0.0;
    std::vector<double> norming_vector;  // unit x in X with ||T x|| = value
};

// ||T||_{X->Y}. Exact up to rounding for every pair of norm tags: polytope
// unit balls are handled through their extreme points, the Euclidean pair by
// singular values. Sign-vector enumeration is capped at 24 dimensions.
OperatorNorm operator_norm(const OperatorSpec& T);

// T S_n f, coordinatewise partial sum then pointwise T.
VectorStepFunction<double> apply_TSn(const OperatorSpec& T, const VectorStepFunction<double>& f, std::uint64_t n);

// Certified interval for an ideal norm. When a witness is attached, the
// defining quotient evaluated on it reproduces `lower`.
struct NormEstimate {
    double lower = 0.0;
    double upper = 0.0;
    std::optional<VectorStepFunction<double>> witness;
    std::vector<int> signs;   // martingale-transform witness signs (mu only)
    std::uint64_t order = 0;  // n of the certifying partial sum (delta only)
    std::string method;

    bool exact(double rel_tol = 1e-9) const { return upper - lower <= rel_tol * std::max(1.0, std::abs(upper)); }
};

struct AscentOptions {
    std::uint64_t seed = 0x5eedc0ffee2024ULL;
    unsigned restarts = 32;
    unsigned iterations = 200;
    double rel_improvement = 1e-10;
    double tolerance = 1e-9;
};

struct DeltaOptions {
    AscentOptions ascent;
    // Extra starting points for the ascent (e.g. structured witnesses).
    std::vector<VectorStepFunction<double>> seeds;
};

// Quotient ||T S_n f||_2 / ||f||_2 (0 for f = 0).
double delta_quotient(const OperatorSpec& T, const VectorStepFunction<double>& f, std::uint64_t n);

// Certified upper end of delta(T | W_n, W_n), the minimum of ||T|| L_n, the
// factorizations through l_2 on either side, and ||T|| when n is a power of
// two. Independent of the grid.
double delta_upper_bound(const OperatorSpec& T, std::uint64_t n);

// delta(T | W_n, W_n) on the given grid.
NormEstimate delta_norm(const OperatorSpec& T, std::uint64_t n, const DyadicGrid& grid, const DeltaOptions& options = {});

// delta(T | W_k, W_k) for k = 1..n.
std::vector<NormEstimate> delta_profile(const OperatorSpec& T, std::uint64_t n, const DyadicGrid& grid,
                                        const DeltaOptions& options = {});
// max over k <= n of the profile, interval end by interval end.
NormEstimate delta_max(const OperatorSpec& T, std::uint64_t n, const DyadicGrid& grid, const DeltaOptions& options = {});
NormEstimate delta_max(const std::vector<NormEstimate>& profile);

// ---------------------------------------------------------------------------
// Alternating ascent for sup ||T P f||_2 / ||f||_2, where P is a scalar
// linear operator acting coordinatewise and self-adjoint for the L_2 pairing
// (a partial sum S_n, or a martingale transform). Steps alternate between the
// duality map of T P f in L_2^{Y*} and the best f for the pulled-back
// functional P T^T phi.
// ---------------------------------------------------------------------------

using ScalarProjection = std::function<void(VectorStepFunction<double>&)>;

struct AscentResult {
    double value = 0.0;
    std::optional<VectorStepFunction<double>> witness;
};

double ascent_quotient(const OperatorSpec& T, const ScalarProjection& P, const VectorStepFunction<double>& f);

AscentResult ascend_from(const OperatorSpec& T, const ScalarProjection& P, VectorStepFunction<double> start,
                         const AscentOptions& options);

// Random restarts in parallel, each with its own seeded stream; the result
// does not depend on the thread count. `salt` separates independent searches
// sharing one seed.
AscentResult ascend_restarts(const OperatorSpec& T, const ScalarProjection& P, const DyadicGrid& grid,
                             const AscentOptions& options, std::uint64_t salt);

// Constant function equal to the norming vector of T; certifies ||T||.
VectorStepFunction<double> constant_witness(const OperatorSpec& T, const DyadicGrid& grid);

}  // namespace walsh
