#include <doctest.h>

#include <omp.h>

#include "oracles.hpp"
#include "walsh/l1_embedding.hpp"
#include "walsh/operators.hpp"

using namespace walsh;

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// sqrt of the top eigenvalue of (T (x) S_n)^T (T (x) S_n) on the dense
// product space, cells outer and coordinates inner.
double dense_delta(const OperatorSpec& T, std::uint64_t n, unsigned q)
{
    const Eigen::MatrixXd S = oracle::partial_sum_matrix(n, q);
    Eigen::MatrixXd K(S.rows() * T.matrix().rows(), S.cols() * T.matrix().cols());
    for (Eigen::Index a = 0; a < S.rows(); ++a)
        for (Eigen::Index b = 0; b < S.cols(); ++b)
            K.block(a * T.matrix().rows(), b * T.matrix().cols(), T.matrix().rows(), T.matrix().cols()) = S(a, b) * T.matrix();
    return oracle::spectral_norm(K);
}

}  // namespace

TEST_SUITE("operators_norms")
{
    TEST_CASE("norms and duality")
    {
        const std::vector<double> x{3, 4};
        CHECK(NormedSpace::euclidean(2).norm(x) == 5.0);
        CHECK(NormedSpace::linf(2).norm(x) == 4.0);
        CHECK(NormedSpace::l1_weighted({0.5, 2.0}).norm(x) == 9.5);
        CHECK(NormedSpace::l1_weighted({0.5, 2.0}).dual_norm(x) == doctest::Approx(6.0));
        CHECK(NormedSpace::linf(2).dual_norm(x) == 7.0);
        CHECK_THROWS(NormedSpace::l1_weighted({1.0, -1.0}));
        CHECK(parse_norm_kind("l1_weighted") == NormKind::l1_weighted);
        CHECK_THROWS(parse_norm_kind("l2"));

        std::mt19937_64 rng(1);
        std::normal_distribution<double> g;
        for (auto kind : {NormKind::euclidean, NormKind::l1_weighted, NormKind::linf}) {
            const auto X = oracle::random_space(kind, 4, rng);
            for (int t = 0; t < 50; ++t) {
                std::vector<double> v(4), a(4), out(4);
                for (auto& c : v) c = g(rng);
                X.norming_functional(v, out);
                CHECK(X.dual_norm(out) == doctest::Approx(1.0));
                CHECK(dot(out, v) == doctest::Approx(X.norm(v)));
                X.norming_vector(v, out);
                CHECK(X.norm(out) == doctest::Approx(1.0));
                CHECK(dot(out, v) == doctest::Approx(X.dual_norm(v)));
                for (auto& c : a) c = g(rng);
                std::vector<double> s(4);
                for (std::size_t i = 0; i < 4; ++i) s[i] = v[i] + a[i];
                CHECK(X.norm(s) <= X.norm(v) + X.norm(a) + 1e-12);
            }
        }
    }

    TEST_CASE("exact rational norms")
    {
        const std::vector<Rational> x{Rational(1, 2), Rational(-3, 4)};
        CHECK(NormedSpace::linf(2).norm(x) == Rational(3, 4));
        CHECK(NormedSpace::uniform_l1(2).norm(x) == Rational(5, 8));
        CHECK(NormedSpace::euclidean(2).norm_squared(x) == Rational(13, 16));
        CHECK_THROWS_AS(NormedSpace::euclidean(2).norm(x), std::domain_error);
    }

    TEST_CASE("L_2^X norm")
    {
        const DyadicGrid g(2);
        VectorStepFunction<double> f(g, NormedSpace::euclidean(2));
        f.cell(0)[0] = 1.0;
        CHECK(l2x_norm(f) == 0.5);
    }

    TEST_CASE("operator norms against brute force")
    {
        std::mt19937_64 rng(4);
        const NormKind kinds[] = {NormKind::euclidean, NormKind::l1_weighted, NormKind::linf};
        for (auto dk : kinds)
            for (auto ck : kinds)
                for (int t = 0; t < 3; ++t) {
                    const OperatorSpec T(oracle::random_space(dk, 3, rng), oracle::random_space(ck, 2, rng),
                                         oracle::random_matrix(2, 3, rng));
                    const auto n = operator_norm(T);
                    const double brute = oracle::operator_norm(T);
                    CHECK(n.value >= brute * (1 - 1e-12));
                    CHECK(n.value <= brute * (1 + 1e-4));
                    CHECK(T.domain().norm(n.norming_vector) == doctest::Approx(1.0));
                    Eigen::VectorXd y = T.matrix() * Eigen::Map<const Eigen::VectorXd>(n.norming_vector.data(), 3);
                    CHECK(T.codomain().norm(std::span<const double>(y.data(), 2)) == doctest::Approx(n.value));
                }
    }

    TEST_CASE("delta is exact for euclidean pairs")
    {
        Eigen::MatrixXd d(2, 2);
        d << 2, 0, 0, 1;
        const OperatorSpec T(NormedSpace::euclidean(2), NormedSpace::euclidean(2), d);
        const auto e = delta_norm(T, 3, DyadicGrid(3));
        CHECK(e.lower == 2.0);
        CHECK(e.upper == 2.0);
        CHECK(dense_delta(T, 3, 3) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(delta_quotient(T, *e.witness, 3) == doctest::Approx(2.0).epsilon(1e-12));

        std::mt19937_64 rng(8);
        for (int t = 0; t < 5; ++t) {
            const OperatorSpec R(NormedSpace::euclidean(3), NormedSpace::euclidean(2), oracle::random_matrix(2, 3, rng));
            for (std::uint64_t n : {1, 3, 5, 8}) {
                const auto est = delta_norm(R, n, DyadicGrid(3));
                CHECK(est.exact());
                CHECK(est.lower == doctest::Approx(dense_delta(R, n, 3)).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("delta bounds for polytope norms")
    {
        std::mt19937_64 rng(12);
        const DyadicGrid g(3);
        for (int t = 0; t < 4; ++t) {
            const OperatorSpec T(oracle::random_space(NormKind::l1_weighted, 3, rng), oracle::random_space(NormKind::linf, 3, rng),
                                 oracle::random_matrix(3, 3, rng));
            const double tn = operator_norm(T).value;
            AscentOptions a;
            a.restarts = 8;
            for (std::uint64_t n = 1; n <= g.cells(); ++n) {
                const auto e = delta_norm(T, n, g, DeltaOptions{a, {}});
                CHECK(e.lower <= e.upper);
                CHECK(e.lower >= tn * (1 - 1e-12));  // constants are fixed by S_n
                CHECK(e.upper <= tn * lebesgue_constant(n).to_double() * (1 + 1e-12));
                CHECK(delta_quotient(T, *e.witness, n) == doctest::Approx(e.lower).epsilon(1e-12));
                for (int s = 0; s < 20; ++s) CHECK(delta_quotient(T, oracle::random_function(g, T.domain(), rng), n) <= e.upper * (1 + 1e-12));
                if (is_power_of_two(n)) CHECK(e.upper == doctest::Approx(tn).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("embedded indicator certifies L_n for the l1 identity")
    {
        const DyadicGrid g(4);
        const auto T = OperatorSpec::identity(l1_space(4));
        DeltaOptions opts{AscentOptions{.restarts = 2}, embedding_seeds(T, g)};
        const auto e = delta_norm(T, 5, g, opts);
        CHECK(e.lower == doctest::Approx(1.75).epsilon(1e-14));
        CHECK(e.upper == doctest::Approx(1.75).epsilon(1e-14));
    }

    TEST_CASE("delta_max takes the largest ends")
    {
        std::vector<NormEstimate> prof(3);
        prof[0].lower = 1, prof[0].upper = 2;
        prof[1].lower = 1.5, prof[1].upper = 1.6;
        prof[2].lower = 0.5, prof[2].upper = 3;
        prof[1].order = 2;
        const auto m = delta_max(prof);
        CHECK(m.lower == 1.5);
        CHECK(m.upper == 3);
        CHECK(m.order == 2);
        CHECK_THROWS(delta_max(std::vector<NormEstimate>{}));
    }

    TEST_CASE("ascent results do not depend on the thread count")
    {
        std::mt19937_64 rng(21);
        const OperatorSpec T(oracle::random_space(NormKind::linf, 3, rng), oracle::random_space(NormKind::l1_weighted, 3, rng),
                             oracle::random_matrix(3, 3, rng));
        const DyadicGrid g(3);
        AscentOptions a;
        a.restarts = 6;
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const auto ref = delta_norm(T, 5, g, DeltaOptions{a, {}});
        for (int th : {2, 4}) {
            omp_set_num_threads(th);
            const auto e = delta_norm(T, 5, g, DeltaOptions{a, {}});
            CHECK(e.lower == ref.lower);
            CHECK(e.witness->data()[0] == ref.witness->data()[0]);
        }
        omp_set_num_threads(saved);
    }

    TEST_CASE("argument checks")
    {
        const auto T = OperatorSpec::identity(NormedSpace::euclidean(2));
        CHECK_THROWS(delta_norm(T, 0, DyadicGrid(2)));
        CHECK_THROWS(delta_norm(T, 5, DyadicGrid(2)));
        CHECK_THROWS(OperatorSpec(NormedSpace::euclidean(2), NormedSpace::euclidean(3), Eigen::MatrixXd::Zero(2, 2)));
    }
}
