#include <chrono>
#include <random>

#include <fmt/format.h>
#include <omp.h>

#include "walsh/kernels.hpp"
#include "walsh/martingale.hpp"
#include "walsh/walsh.hpp"

using namespace walsh;

namespace {

template <class Fn>
double best_of(int reps, Fn&& fn)
{
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial, double parallel)
{
    fmt::print("{:<28} {:>12.6f} {:>12.6f} {:>8.2f}x\n", name, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv)
{
    const unsigned q = argc > 1 ? static_cast<unsigned>(std::stoul(argv[1])) : 20;
    const unsigned p = argc > 2 ? static_cast<unsigned>(std::stoul(argv[2])) : 12;
    fmt::print("threads: {}\n", omp_get_max_threads());
    fmt::print("{:<28} {:>12} {:>12} {:>9}\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    const DyadicGrid grid(q);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    StepFunction<double> f(grid);
    for (auto& v : f.values()) v = normal(rng);
    row(fmt::format("fwht q={}", q), best_of(5, [&] { (void)fwht_serial(f); }), best_of(5, [&] { (void)fwht_parallel(f); }));

    row(fmt::format("lebesgue table p={}", p), best_of(3, [&] { (void)lebesgue_table_serial(p); }),
        best_of(3, [&] { (void)lebesgue_table(p); }));

    Eigen::MatrixXd m(3, 3);
    m << 2, 1, 0, 0, 1, 0, 1, 0, 3;
    const OperatorSpec T(NormedSpace::euclidean(3), NormedSpace::euclidean(3), m);
    const int threads = omp_get_max_threads();
    omp_set_num_threads(1);
    const double mu_serial = best_of(2, [&] { (void)mu_exact_euclidean(T, 8); });
    omp_set_num_threads(threads);
    row("mu sign enumeration p=8", mu_serial, best_of(2, [&] { (void)mu_exact_euclidean(T, 8); }));
}
