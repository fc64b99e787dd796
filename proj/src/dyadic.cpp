#include "walsh/dyadic.hpp"

#include <algorithm>
#include <bit>

namespace walsh {

std::uint64_t BinaryDecomposition::value() const
{
    std::uint64_t n = 0;
    for (auto k : exponents) n |= std::uint64_t{1} << k;
    return n;
}

bool BinaryDecomposition::contains(unsigned k) const
{
    return std::binary_search(exponents.begin(), exponents.end(), k);
}

BinaryDecomposition bit_decompose(std::uint64_t n)
{
    BinaryDecomposition d;
    while (n != 0) {
        const auto k = static_cast<unsigned>(std::countr_zero(n));
        d.exponents.push_back(k);
        n &= n - 1;
    }
    return d;
}

std::size_t dyadic_add_cells(std::size_t j, std::size_t k, const DyadicGrid& grid)
{
    grid.require_cell(j);
    grid.require_cell(k);
    return j ^ k;
}

std::size_t bit_reverse(std::size_t k, unsigned q)
{
    std::size_t r = 0;
    for (unsigned b = 0; b < q; ++b) {
        r = (r << 1) | (k & 1);
        k >>= 1;
    }
    return r;
}

unsigned ceil_log2(std::uint64_t n)
{
    if (n <= 1) return 0;
    return static_cast<unsigned>(std::bit_width(n - 1));
}

}  // namespace walsh
