#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace walsh {

// Partition of [0,1) into 2^q half-open cells. Cell k (0-based) is
// [k 2^-q, (k+1) 2^-q); the 1-based dyadic interval of order q with index
// k+1 is the same set.
class DyadicGrid {
public:
    static constexpr unsigned max_resolution = 30;

    DyadicGrid() = default;
    explicit DyadicGrid(unsigned q) : q_(q)
    {
        if (q > max_resolution) throw std::invalid_argument("DyadicGrid: resolution too large");
    }

    unsigned resolution() const { return q_; }
    std::size_t cells() const { return std::size_t{1} << q_; }

    bool contains(std::size_t cell) const { return cell < cells(); }
    void require_cell(std::size_t cell) const
    {
        if (!contains(cell)) throw std::out_of_range("cell index outside dyadic grid");
    }

    // Index of the order-`order` dyadic interval containing `cell`.
    std::size_t block_of(std::size_t cell, unsigned order) const { return cell >> (q_ - order); }

    friend bool operator==(const DyadicGrid&, const DyadicGrid&) = default;

private:
    unsigned q_ = 0;
};

// Strictly ascending exponents k_1 < ... < k_s with n = sum 2^{k_l}.
struct BinaryDecomposition {
    std::vector<unsigned> exponents;

    std::uint64_t value() const;
    bool empty() const { return exponents.empty(); }
    unsigned highest() const { return exponents.back(); }
    bool contains(unsigned k) const;
};

BinaryDecomposition bit_decompose(std::uint64_t n);

// Dyadic sum of two cells: digitwise |t_j - s_j| of the binary expansions,
// which on cell indices is exclusive-or.
std::size_t dyadic_add_cells(std::size_t j, std::size_t k, const DyadicGrid& grid);

// Reverses the low q bits of k.
std::size_t bit_reverse(std::size_t k, unsigned q);

inline bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Smallest q with n <= 2^q.
unsigned ceil_log2(std::uint64_t n);

}  // namespace walsh
