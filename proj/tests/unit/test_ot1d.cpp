#include <doctest.h>

#include <random>

#include "hilbert_ot/error.hpp"
#include "hilbert_ot/ot1d.hpp"
#include "oracles.hpp"

using namespace hilbert_ot;

namespace {

std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& v : w) s += (v = e(rng));
    for (auto& v : w) v /= s;
    return w;
}

}  // namespace

TEST_CASE("north-west corner examples") {
    const std::vector<double> one{1.0};
    CHECK(northwest_coupling(one, one).entries == std::vector<CouplingEntry>{{0, 0, 1.0}});

    const std::vector<double> a{0.5, 0.5}, b{0.3, 0.7};
    const auto plan = northwest_coupling(a, b);
    REQUIRE(plan.entries.size() == 3);
    CHECK(plan.entries[0].source == 0);
    CHECK(plan.entries[0].target == 0);
    CHECK(plan.entries[0].mass == doctest::Approx(0.3));
    CHECK(plan.entries[1].source == 0);
    CHECK(plan.entries[1].target == 1);
    CHECK(plan.entries[1].mass == doctest::Approx(0.2));
    CHECK(plan.entries[2].source == 1);
    CHECK(plan.entries[2].target == 1);
    CHECK(plan.entries[2].mass == doctest::Approx(0.5));

    const std::vector<double> third(3, 1.0 / 3.0);
    const auto identity = northwest_coupling(third, third);
    REQUIRE(identity.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(identity.entries[i].source == i);
        CHECK(identity.entries[i].target == i);
        CHECK(identity.entries[i].mass == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("north-west plan on the 2x2 example is LP optimal") {
    Eigen::MatrixXd cost(2, 2);
    cost << 0.0, 1.0, 1.0, 0.0;  // positions 0 < 1 on both sides, squared gap
    Eigen::VectorXd a(2), b(2);
    a << 0.5, 0.5;
    b << 0.3, 0.7;
    CHECK(oracle::transport_lp(cost, a, b) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("north-west invariants on random weights") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = random_simplex(1 + rng() % 12, rng);
        const auto b = random_simplex(1 + rng() % 12, rng);
        const auto plan = northwest_coupling(a, b);
        CHECK(plan.entries.size() <= a.size() + b.size() - 1);
        CHECK(plan.marginal_error(Eigen::Map<const Eigen::VectorXd>(a.data(), a.size()),
                                  Eigen::Map<const Eigen::VectorXd>(b.data(), b.size())) < 1e-12);
        for (std::size_t e = 0; e < plan.entries.size(); ++e) {
            CHECK(plan.entries[e].mass > 0.0);
            if (e) {
                CHECK(plan.entries[e].source >= plan.entries[e - 1].source);
                CHECK(plan.entries[e].target >= plan.entries[e - 1].target);
            }
        }
        const auto swapped = northwest_coupling(b, a).transposed();
        REQUIRE(swapped.entries.size() == plan.entries.size());
        for (std::size_t e = 0; e < plan.entries.size(); ++e) {
            CHECK(swapped.entries[e].source == plan.entries[e].source);
            CHECK(swapped.entries[e].target == plan.entries[e].target);
            CHECK(swapped.entries[e].mass == doctest::Approx(plan.entries[e].mass).epsilon(1e-12));
        }
    }
}

TEST_CASE("north-west coupling rejects off-simplex weights") {
    const std::vector<double> ok{0.5, 0.5}, heavy{0.6, 0.6}, negative{1.5, -0.5}, empty{};
    CHECK_THROWS_AS(northwest_coupling(ok, heavy), InvalidInput);
    CHECK_THROWS_AS(northwest_coupling(negative, ok), InvalidInput);
    CHECK_THROWS_AS(northwest_coupling(empty, ok), InvalidInput);
}

TEST_CASE("sorted lines keep provenance and break ties stably") {
    const std::vector<double> values{3.0, 1.0, 3.0, 2.0}, weights{0.1, 0.2, 0.3, 0.4};
    const auto line = SortedWeightedLine::from_unsorted(values, weights);
    CHECK(line.values == std::vector<double>{1.0, 2.0, 3.0, 3.0});
    CHECK(line.provenance == std::vector<std::size_t>{1, 3, 0, 2});
    CHECK(line.weights == std::vector<double>{0.2, 0.4, 0.1, 0.3});
}

TEST_CASE("1D Wasserstein closed form") {
    const std::vector<double> zero{0.0}, one{1.0}, unit{1.0};
    const auto x0 = SortedWeightedLine::from_unsorted(zero, unit);
    const auto y1 = SortedWeightedLine::from_unsorted(one, unit);
    for (double p : {1.0, 1.5, 2.0, 3.0}) CHECK(wasserstein_1d(x0, y1, p) == doctest::Approx(1.0));

    const std::vector<double> xs{1.0, 0.0}, ys{1.5, 0.5}, half{0.5, 0.5};
    const auto x = SortedWeightedLine::from_unsorted(xs, half);
    const auto y = SortedWeightedLine::from_unsorted(ys, half);
    CHECK(wasserstein_1d(x, y, 2.0) == doctest::Approx(0.5));
    CHECK(wasserstein_1d(x, x, 2.0) == 0.0);

    const auto plan = quantile_coupling(x, y);
    REQUIRE(plan.entries.size() == 2);
    CHECK(plan.entries[0].source == 1);
    CHECK(plan.entries[0].target == 1);
}

TEST_CASE("1D monotone plan matches the LP oracle") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + rng() % 7, n = 1 + rng() % 7;
        std::vector<double> xs(m), ys(n);
        for (auto& v : xs) v = g(rng);
        for (auto& v : ys) v = g(rng);
        const auto a = random_simplex(m, rng);
        const auto b = random_simplex(n, rng);
        const double p = trial % 2 ? 1.0 : 2.0;
        Eigen::MatrixXd cost(m, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) cost(i, j) = std::pow(std::abs(xs[i] - ys[j]), p);
        const double lp = oracle::transport_lp(cost, Eigen::Map<const Eigen::VectorXd>(a.data(), m),
                                               Eigen::Map<const Eigen::VectorXd>(b.data(), n));
        const double w = wasserstein_1d(SortedWeightedLine::from_unsorted(xs, a),
                                        SortedWeightedLine::from_unsorted(ys, b), p);
        CHECK(std::pow(w, p) == doctest::Approx(lp).epsilon(1e-9));
    }
}
