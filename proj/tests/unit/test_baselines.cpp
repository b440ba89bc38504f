#include <doctest.h>

#include <random>

#include "hilbert_ot/baselines.hpp"
#include "hilbert_ot/error.hpp"
#include "hilbert_ot/ot1d.hpp"
#include "oracles.hpp"

using namespace hilbert_ot;

namespace {

PointMatrix uniform_points(std::size_t n, unsigned d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PointMatrix pts(n, d);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = u(rng);
    return pts;
}

Eigen::VectorXd random_weights(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    Eigen::VectorXd w(n);
    for (auto& v : w) v = e(rng);
    return w / w.sum();
}

}  // namespace

TEST_CASE("exact solver matches the permutation oracle") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        const unsigned d = 1 + static_cast<unsigned>(rng() % 3);
        const WeightedPointCloud x(uniform_points(n, d, rng));
        const WeightedPointCloud y(uniform_points(n, d, rng));
        const double p = trial % 3 == 0 ? 1.0 : 2.0;
        const auto problem = LpTransportProblem::from_clouds(x, y, p);
        const double best = oracle::best_permutation_cost(problem.cost);
        CHECK(std::pow(exact_wasserstein(x, y, p).value, p) == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("exact solver matches the simplex oracle with a dual certificate") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t m = 1 + rng() % 9, n = 1 + rng() % 9;
        const WeightedPointCloud x(uniform_points(m, 2, rng), random_weights(m, rng));
        const WeightedPointCloud y(uniform_points(n, 2, rng), random_weights(n, rng));
        const auto problem = LpTransportProblem::from_clouds(x, y, 2.0);
        const auto solution = solve_transport(problem);
        CHECK(solution.primal == doctest::Approx(oracle::transport_lp(problem.cost, problem.a, problem.b)).epsilon(1e-9));
        CHECK(solution.duality_gap() <= 1e-9);
        CHECK(solution.dual_infeasibility <= 1e-9);
        CHECK(solution.coupling.marginal_error(problem.a, problem.b) <= 1e-12);
        CHECK(solution.coupling.entries.size() <= m + n - 1);
        for (const auto& e : solution.coupling.entries) CHECK(e.mass > 0.0);
    }
}

TEST_CASE("degenerate problems keep a forest support") {
    // Equal weights on a regular grid produce many zero-cost alternatives.
    PointMatrix grid(9, 2);
    for (int i = 0; i < 9; ++i) grid.row(i) << i % 3, i / 3;
    const auto solution = solve_transport(LpTransportProblem::from_clouds(WeightedPointCloud(grid),
                                                                          WeightedPointCloud(grid), 2.0));
    CHECK(solution.primal == doctest::Approx(0.0));
    CHECK(solution.coupling.entries.size() <= 17);
}

TEST_CASE("exact Wasserstein edge cases") {
    PointMatrix a(1, 2), b(1, 2);
    a << 0, 0;
    b << 3, 4;
    CHECK(exact_wasserstein(WeightedPointCloud(a), WeightedPointCloud(b)).value == doctest::Approx(5.0));

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng() % 10, n = 1 + rng() % 10;
        const WeightedPointCloud x(uniform_points(m, 1, rng), random_weights(m, rng));
        const WeightedPointCloud y(uniform_points(n, 1, rng), random_weights(n, rng));
        const auto xs = SortedWeightedLine::from_unsorted({x.points().data(), m}, {x.weights().data(), m});
        const auto ys = SortedWeightedLine::from_unsorted({y.points().data(), n}, {y.weights().data(), n});
        CHECK(exact_wasserstein(x, y).value == doctest::Approx(wasserstein_1d(xs, ys, 2.0)).epsilon(1e-9));
    }

    const WeightedPointCloud big(uniform_points(1001, 2, rng));
    const WeightedPointCloud other(uniform_points(1000, 2, rng));
    CHECK_THROWS_AS(exact_wasserstein(big, other), InvalidInput);
    CHECK_THROWS_AS(exact_wasserstein(big, big, 0.5), ParameterError);
}

TEST_CASE("sliced Wasserstein moments") {
    std::mt19937_64 rng(4);
    constexpr unsigned d = 4;
    constexpr std::size_t kProjections = 2000;
    const PointMatrix base = uniform_points(80, d, rng);
    const WeightedPointCloud x(base);
    CHECK(sliced_wasserstein(x, x, {2.0, 50, 1, 0}).value == 0.0);

    SUBCASE("translation") {
        Eigen::RowVectorXd c(d);
        c << 1.0, -2.0, 0.5, 2.0;
        const WeightedPointCloud y(PointMatrix(base.rowwise() + c));
        const auto report = sliced_wasserstein(x, y, {2.0, kProjections, 99, 0});
        const double se = *report.projection_stddev / std::sqrt(static_cast<double>(kProjections));
        CHECK(std::abs(report.value * report.value - c.squaredNorm() / d) <= 3.0 * se);
    }
    SUBCASE("variation along one axis") {
        PointMatrix xa = PointMatrix::Zero(80, d), ya = PointMatrix::Zero(60, d);
        xa.col(0) = base.col(0);
        ya.col(0) = uniform_points(60, 1, rng).col(0) * 3.0;
        const WeightedPointCloud xs(xa), ys(ya);
        const double w1d = exact_wasserstein(xs, ys).value;
        const auto report = sliced_wasserstein(xs, ys, {2.0, kProjections, 7, 0});
        const double se = *report.projection_stddev / std::sqrt(static_cast<double>(kProjections));
        CHECK(std::abs(report.value * report.value - w1d * w1d / d) <= 3.0 * se);
    }
    SUBCASE("determinism and symmetry") {
        const WeightedPointCloud y(uniform_points(70, d, rng));
        const double one = sliced_wasserstein(x, y, {2.0, 64, 5, 1}).value;
        CHECK(sliced_wasserstein(x, y, {2.0, 64, 5, 8}).value == one);
        CHECK(sliced_wasserstein(y, x, {2.0, 64, 5, 1}).value == doctest::Approx(one).epsilon(1e-12));
    }
}

TEST_CASE("Gaussian closed form") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(5, 5);
    CHECK(gaussian_w2(zero, identity, zero, identity) == doctest::Approx(0.0));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(5);
    c << 1, 2, 2, 0, 0;
    CHECK(gaussian_w2(zero, identity, c, identity) == doctest::Approx(3.0));
    for (double theta : {3.0, 4.5, 9.0}) {
        Eigen::MatrixXd s1 = identity, s2 = identity;
        s1(0, 0) = s1(1, 1) = 3.0;
        s2(0, 0) = s2(1, 1) = theta;
        const double expected = std::sqrt(2.0 * std::pow(std::sqrt(3.0) - std::sqrt(theta), 2));
        CHECK(gaussian_w2(zero, s1, zero, s2) == doctest::Approx(expected).epsilon(1e-10));
    }
    // Non-commuting case against the 2D formula tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2).
    Eigen::Matrix2d s1, s2;
    s1 << 2.0, 0.5, 0.5, 1.0;
    s2 << 1.0, -0.3, -0.3, 0.5;
    const Eigen::Matrix2d root = psd_sqrt(s1);
    const Eigen::Matrix2d cross = root * s2 * root;
    const double tr_sqrt_cross = std::sqrt(cross.trace() + 2.0 * std::sqrt(cross.determinant()));
    const double expected = std::sqrt(s1.trace() + s2.trace() - 2.0 * tr_sqrt_cross);
    CHECK(gaussian_w2(Eigen::Vector2d::Zero(), s1, Eigen::Vector2d::Zero(), s2) ==
          doctest::Approx(expected).epsilon(1e-10));

    Eigen::Matrix2d bad;
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(psd_sqrt(bad), InvalidInput);
    Eigen::Matrix2d asym;
    asym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(psd_sqrt(asym), InvalidInput);
    CHECK((psd_sqrt(s1) * psd_sqrt(s1) - s1).norm() < 1e-12);
}
