#include "walsh/walsh.hpp"

#include <stdexcept>

namespace walsh {

int rademacher(unsigned i, std::size_t cell, const DyadicGrid& grid)
{
    if (i == 0) throw std::invalid_argument("rademacher: index starts at 1");
    if (i > grid.resolution()) throw std::out_of_range("rademacher: r_i is not constant on cells when i > q");
    grid.require_cell(cell);
    return ((cell >> (grid.resolution() - i)) & 1) ? -1 : 1;
}

StepFunction<std::int64_t> rademacher_function(unsigned i, const DyadicGrid& grid)
{
    StepFunction<std::int64_t> r(grid);
    for (std::size_t k = 0; k < grid.cells(); ++k) r[k] = rademacher(i, k, grid);
    return r;
}

StepFunction<std::int64_t> walsh_eval(std::uint64_t n, const DyadicGrid& grid)
{
    if (n >= grid.cells()) throw std::out_of_range("walsh_eval: w_n is not constant on cells when n >= 2^q");
    StepFunction<std::int64_t> w(grid);
    for (std::size_t k = 0; k < grid.cells(); ++k) w[k] = walsh_value(n, k, grid);
    return w;
}

HaarFunction haar(std::uint64_t j, const DyadicGrid& grid)
{
    if (j >= grid.cells()) throw std::out_of_range("haar: h_j is not constant on cells when j >= 2^q");
    HaarFunction h{0, StepFunction<std::int64_t>(grid)};
    if (j == 0) {
        for (std::size_t k = 0; k < grid.cells(); ++k) h.signs[k] = 1;
        return h;
    }
    const auto p = static_cast<unsigned>(std::bit_width(j));  // j = 2^{p-1} + m
    const std::uint64_t m = j - (std::uint64_t{1} << (p - 1));
    h.level = p;
    for (std::size_t k = 0; k < grid.cells(); ++k) {
        const auto block = grid.block_of(k, p);
        if (block == 2 * m) h.signs[k] = 1;
        else if (block == 2 * m + 1) h.signs[k] = -1;
    }
    return h;
}

StepFunction<double> HaarFunction::values() const
{
    StepFunction<double> v(signs.grid());
    const double s = scale();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = s * static_cast<double>(signs[k]);
    return v;
}

StepFunction<double> haar_eval(std::uint64_t j, const DyadicGrid& grid) { return haar(j, grid).values(); }

Rational haar_inner_product(const HaarFunction& a, const HaarFunction& b)
{
    a.signs.require_same_grid(b.signs);
    std::int64_t pairing = 0;
    for (std::size_t k = 0; k < a.signs.size(); ++k) pairing += a.signs[k] * b.signs[k];
    if (pairing == 0) return Rational(0);
    const unsigned total = (a.level == 0 ? 0 : a.level - 1) + (b.level == 0 ? 0 : b.level - 1);
    if (total % 2 != 0) throw std::domain_error("haar_inner_product: irrational pairing");
    const unsigned q = a.signs.grid().resolution();
    return Rational(pairing) * Rational(std::int64_t{1} << (total / 2)) * Rational(1, std::int64_t{1} << q);
}

namespace detail {

void hadamard_rows_parallel(std::span<double> data, std::size_t cells, std::size_t width)
{
    const auto pairs = static_cast<std::int64_t>(cells / 2);
    double* base = data.data();
    for (std::size_t h = 1; h < cells; h <<= 1) {
#pragma omp parallel for schedule(static)
        for (std::int64_t p = 0; p < pairs; ++p) {
            const auto up = static_cast<std::size_t>(p);
            const std::size_t i = (up / h) * 2 * h + up % h;
            double* a = base + i * width;
            double* b = base + (i + h) * width;
            for (std::size_t c = 0; c < width; ++c) {
                const double x = a[c];
                const double y = b[c];
                a[c] = x + y;
                b[c] = x - y;
            }
        }
    }
}

}  // namespace detail

WalshCoefficients<double> fwht_serial(const StepFunction<double>& f)
{
    std::vector<double> data(f.values().begin(), f.values().end());
    const unsigned q = f.grid().resolution();
    detail::bit_reverse_rows<double>(data, f.size(), 1, q);
    detail::hadamard_rows_serial<double>(data, f.size(), 1);
    detail::scale_rows<double>(data, q);
    return {f.grid(), std::move(data)};
}

WalshCoefficients<double> fwht_parallel(const StepFunction<double>& f)
{
    std::vector<double> data(f.values().begin(), f.values().end());
    const unsigned q = f.grid().resolution();
    detail::bit_reverse_rows<double>(data, f.size(), 1, q);
    detail::hadamard_rows_parallel(data, f.size(), 1);
    detail::scale_rows<double>(data, q);
    return {f.grid(), std::move(data)};
}

WalshOrder parse_walsh_order(std::string_view name)
{
    if (name == "paley") return WalshOrder::paley;
    if (name == "natural") return WalshOrder::natural;
    if (name == "sequency") return WalshOrder::sequency;
    throw std::invalid_argument("unknown Walsh order '" + std::string(name) + "'");
}

// Natural (Hadamard) row a is (-1)^{popcount(a & k)} = w_{bitrev(a)}.
// Sequency position s (number of sign changes) holds Paley index gray(s).
std::uint64_t paley_index(std::uint64_t pos, WalshOrder order, unsigned q)
{
    switch (order) {
    case WalshOrder::paley: return pos;
    case WalshOrder::natural: return bit_reverse(pos, q);
    case WalshOrder::sequency: return pos ^ (pos >> 1);
    }
    return pos;
}

std::vector<double> reorder_from_paley(std::span<const double> paley, WalshOrder order, unsigned q)
{
    std::vector<double> out(paley.size());
    for (std::size_t pos = 0; pos < out.size(); ++pos) out[pos] = paley[paley_index(pos, order, q)];
    return out;
}

std::vector<double> reorder_to_paley(std::span<const double> ordered, WalshOrder order, unsigned q)
{
    std::vector<double> out(ordered.size());
    for (std::size_t pos = 0; pos < out.size(); ++pos) out[paley_index(pos, order, q)] = ordered[pos];
    return out;
}

}  // namespace walsh
