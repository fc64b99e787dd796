#include "walsh/l1_embedding.hpp"

#include <algorithm>
#include <stdexcept>

namespace walsh {

NormedSpace l1_space(unsigned p)
{
    const std::size_t dim = std::size_t{1} << p;
    return NormedSpace::l1_weighted(std::vector<double>(dim, std::ldexp(1.0, -static_cast<int>(p))));
}

bool EmbeddingIdentities::all() const
{
    return coefficients && norm && std::all_of(partial_sums.begin(), partial_sums.end(), [](bool b) { return b; });
}

namespace {

// Common value of ||G(t)|| over all cells t, or nullopt if it varies.
std::optional<Rational> uniform_cell_norm(const VectorStepFunction<Rational>& G)
{
    const Rational first = G.space().norm(G.cell(0));
    for (std::size_t t = 1; t < G.cells(); ++t)
        if (G.space().norm(G.cell(t)) != first) return std::nullopt;
    return first;
}

}  // namespace

EmbeddingIdentities check_embedding_identities(const StepFunction<Rational>& f)
{
    const auto& grid = f.grid();
    const auto F = embed(f);
    EmbeddingIdentities out;

    auto coeffs = F;
    fwht_inplace(coeffs);
    const auto scalar = fwht(f);
    out.coefficients = true;
    for (std::size_t j = 0; j < grid.cells() && out.coefficients; ++j) {
        const auto row = coeffs.cell(j);
        for (std::size_t s = 0; s < grid.cells(); ++s) {
            if (row[s] != scalar.coeffs[j] * Rational(walsh_value(j, s, grid))) {
                out.coefficients = false;
                break;
            }
        }
    }

    const auto f_l1 = f.l1_norm();
    out.norm = l2x_norm_squared(F) == f_l1 * f_l1;

    for (std::uint64_t n = 0; n <= grid.cells(); ++n) {
        const auto lhs = l2x_norm_squared(partial_sum(F, n));
        const auto rhs = partial_sum(f, n).l1_norm();
        out.partial_sums.push_back(lhs == rhs * rhs);
    }
    return out;
}

CorollaryWitness corollary_witness(unsigned p, std::uint64_t n)
{
    const DyadicGrid grid(p);
    if (n == 0 || n >= grid.cells()) throw std::out_of_range("corollary_witness requires 1 <= n < 2^p");
    StepFunction<Rational> indicator(grid);
    indicator[0] = Rational(1);

    auto F = embed(indicator);
    const auto SnF = partial_sum(F, n);
    const auto num = uniform_cell_norm(SnF);
    const auto den = uniform_cell_norm(F);
    if (!num || !den) throw std::logic_error("corollary_witness: cell norms of a translation family must agree");
    return {std::move(F), *num, *den, *num / *den};
}

std::vector<VectorStepFunction<double>> embedding_seeds(const OperatorSpec& T, const DyadicGrid& grid)
{
    std::vector<VectorStepFunction<double>> seeds;
    if (T.domain().dim() != grid.cells()) return seeds;
    // F(t) = e_t carries the same values in any space of the right dimension.
    StepFunction<double> indicator(grid);
    indicator[0] = 1.0;
    const auto F = embed(indicator);
    seeds.emplace_back(grid, T.domain(), std::vector<double>(F.data().begin(), F.data().end()));
    return seeds;
}

}  // namespace walsh
