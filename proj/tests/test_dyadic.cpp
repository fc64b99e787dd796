#include <doctest.h>

#include "walsh/dyadic.hpp"
#include "walsh/rational.hpp"

using namespace walsh;

TEST_SUITE("dyadic")
{
    TEST_CASE("grid geometry")
    {
        const DyadicGrid g(3);
        CHECK(g.cells() == 8);
        CHECK(g.contains(7));
        CHECK_FALSE(g.contains(8));
        CHECK_THROWS_AS(g.require_cell(8), std::out_of_range);
        CHECK(g.block_of(5, 1) == 1);
        CHECK(g.block_of(5, 2) == 2);
        CHECK_THROWS_AS(DyadicGrid(31), std::invalid_argument);
    }

    TEST_CASE("binary decomposition")
    {
        const auto d = bit_decompose(11);
        CHECK(d.exponents == std::vector<unsigned>{0, 1, 3});
        CHECK(d.highest() == 3);
        CHECK(d.contains(1));
        CHECK_FALSE(d.contains(2));
        CHECK(bit_decompose(0).empty());
        for (std::uint64_t n = 0; n < 4096; ++n) CHECK(bit_decompose(n).value() == n);
    }

    TEST_CASE("dyadic sum of cells is xor")
    {
        const DyadicGrid g(2);
        // [1/4,1/2) + [1/2,3/4): 0.01 + 0.10 = 0.11
        CHECK(dyadic_add_cells(1, 2, g) == 3);
        CHECK(dyadic_add_cells(3, 3, g) == 0);
        CHECK_THROWS_AS(dyadic_add_cells(4, 0, g), std::out_of_range);
        const DyadicGrid h(5);
        for (std::size_t a = 0; a < h.cells(); ++a)
            for (std::size_t b = 0; b < h.cells(); ++b) {
                CHECK(dyadic_add_cells(a, b, h) == dyadic_add_cells(b, a, h));
                CHECK(dyadic_add_cells(dyadic_add_cells(a, b, h), b, h) == a);
            }
    }

    TEST_CASE("bit reversal")
    {
        CHECK(bit_reverse(1, 3) == 4);
        CHECK(bit_reverse(6, 3) == 3);
        for (std::size_t k = 0; k < 1024; ++k) CHECK(bit_reverse(bit_reverse(k, 10), 10) == k);
        CHECK(ceil_log2(1) == 0);
        CHECK(ceil_log2(5) == 3);
        CHECK(is_power_of_two(64));
        CHECK_FALSE(is_power_of_two(0));
        CHECK_FALSE(is_power_of_two(12));
    }

    TEST_CASE("rational arithmetic")
    {
        CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
        CHECK(Rational(2, 4) == Rational(1, 2));
        CHECK(Rational(3, -6) == Rational(-1, 2));
        CHECK(Rational(7, 4).to_string() == "7/4");
        CHECK(Rational(4, 2).to_string() == "2");
        CHECK(Rational(1, 3) < Rational(1, 2));
        CHECK(abs(Rational(-3, 5)) == Rational(3, 5));
        CHECK_THROWS(Rational(1, 0));
        const Rational big(std::int64_t{1} << 62);
        CHECK_THROWS_AS(big * big, std::overflow_error);
    }
}
