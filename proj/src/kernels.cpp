#include "walsh/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace walsh {

namespace {

// Coefficient vector 1_{i<n} pushed through the inverse transform.
std::vector<std::int64_t> kernel_values(std::uint64_t n, const DyadicGrid& grid)
{
    std::vector<std::int64_t> data(grid.cells(), 0);
    std::fill(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n), 1);
    detail::hadamard_rows_serial<std::int64_t>(data, data.size(), 1);
    detail::bit_reverse_rows<std::int64_t>(data, data.size(), 1, grid.resolution());
    return data;
}

std::int64_t abs_sum(const std::vector<std::int64_t>& d)
{
    std::int64_t acc = 0;
    for (auto v : d) acc += v < 0 ? -v : v;
    return acc;
}

Rational to_measure(std::int64_t abs_total, unsigned q) { return Rational(abs_total, std::int64_t{1} << q); }

void require_table_depth(unsigned p)
{
    if (p == 0 || p > 20) throw std::out_of_range("Lebesgue table depth must satisfy 1 <= p <= 20");
}

LebesgueTable finish_table(unsigned p, std::vector<Rational> values)
{
    LebesgueTable t{p, std::move(values), {}};
    t.running_max.reserve(t.values.size());
    Rational best(0);
    for (const auto& v : t.values) {
        best = std::max(best, v);
        t.running_max.push_back(best);
    }
    return t;
}

}  // namespace

IntStepFunction dirichlet(std::uint64_t n, const DyadicGrid& grid)
{
    require_kernel_order(n, grid);
    return IntStepFunction(grid, kernel_values(n, grid));
}

IntStepFunction dirichlet_factored(std::uint64_t n, const DyadicGrid& grid)
{
    if (n == 0 || n >= grid.cells()) throw std::out_of_range("dirichlet_factored requires 1 <= n < 2^q");
    const auto w = walsh_eval(n, grid);
    IntStepFunction sum(grid);
    for (unsigned k : bit_decompose(n).exponents) {
        const auto upper = dirichlet(std::uint64_t{1} << (k + 1), grid);
        const auto lower = dirichlet(std::uint64_t{1} << k, grid);
        sum += upper - lower;
    }
    return w * sum;
}

Rational lebesgue_constant(std::uint64_t n, const DyadicGrid& grid)
{
    require_kernel_order(n, grid);
    return to_measure(abs_sum(kernel_values(n, grid)), grid.resolution());
}

Rational lebesgue_constant(std::uint64_t n)
{
    if (n == 0) throw std::out_of_range("Lebesgue constant order must be >= 1");
    return lebesgue_constant(n, DyadicGrid(ceil_log2(n)));
}

LebesgueTable lebesgue_table_serial(unsigned p)
{
    require_table_depth(p);
    const DyadicGrid grid(p);
    const std::size_t N = grid.cells();
    std::vector<std::size_t> rev(N);
    for (std::size_t k = 0; k < N; ++k) rev[k] = bit_reverse(k, p);

    std::vector<std::int64_t> d(N, 0);
    std::vector<Rational> values;
    values.reserve(N);
    for (std::uint64_t n = 0; n < N; ++n) {
        std::int64_t total = 0;
        for (std::size_t k = 0; k < N; ++k) {
            d[k] += (std::popcount(n & rev[k]) & 1) ? -1 : 1;
            total += d[k] < 0 ? -d[k] : d[k];
        }
        values.push_back(to_measure(total, p));
    }
    return finish_table(p, std::move(values));
}

LebesgueTable lebesgue_table(unsigned p)
{
    require_table_depth(p);
    const DyadicGrid grid(p);
    const std::size_t N = grid.cells();
    std::vector<std::size_t> rev(N);
    for (std::size_t k = 0; k < N; ++k) rev[k] = bit_reverse(k, p);

    std::vector<std::int64_t> totals(N, 0);
    const auto chunk = static_cast<std::int64_t>(std::max<std::size_t>(N / 64, 16));
    const auto chunks = (static_cast<std::int64_t>(N) + chunk - 1) / chunk;

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) {
        const auto first = static_cast<std::uint64_t>(c * chunk) + 1;
        const auto last = std::min<std::uint64_t>(first + static_cast<std::uint64_t>(chunk), N + 1);
        auto d = kernel_values(first, grid);
        totals[first - 1] = abs_sum(d);
        for (std::uint64_t n = first; n + 1 < last; ++n) {
            std::int64_t total = 0;
            for (std::size_t k = 0; k < N; ++k) {
                d[k] += (std::popcount(n & rev[k]) & 1) ? -1 : 1;
                total += d[k] < 0 ? -d[k] : d[k];
            }
            totals[n] = total;
        }
    }

    std::vector<Rational> values;
    values.reserve(N);
    for (auto t : totals) values.push_back(to_measure(t, p));
    return finish_table(p, std::move(values));
}

LebesgueMax lebesgue_max(const LebesgueTable& table)
{
    LebesgueMax m;
    m.p = table.p;
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        if (table.values[i] > m.value) {
            m.value = table.values[i];
            m.argmax = i + 1;
        }
    }
    m.lower_bound = Rational(table.p, 8);
    m.upper_bound = Rational(table.p);
    m.within_bounds = m.lower_bound <= m.value && m.value <= m.upper_bound;
    return m;
}

LebesgueMax lebesgue_max(unsigned p) { return lebesgue_max(lebesgue_table(p)); }

}  // namespace walsh
