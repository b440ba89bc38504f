#include <doctest.h>

#include <filesystem>
#include <random>

#include "hilbert_ot/error.hpp"
#include "hilbert_ot/flows.hpp"

using namespace hilbert_ot;

namespace {

PointMatrix gaussian_points(std::size_t n, unsigned d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    PointMatrix pts(n, d);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = g(rng);
    return pts;
}

double plan_cost(const PointMatrix& x, const PointMatrix& y, const SparseCoupling& plan) {
    return coupling_cost(plan, x, y, 2.0);
}

}  // namespace

TEST_CASE("fixed-plan gradient matches central differences") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 16;
        const PointMatrix x = gaussian_points(n, 2, rng);
        const WeightedPointCloud target(gaussian_points(n, 2, rng));
        const auto plan = flow_step(x, target, HcpStep{BoundingBox::merge(bounding_box(x), bounding_box(target)), 8},
                                    0.01)
                              .coupling;
        const PointMatrix grad = transport_gradient(x, target.points(), plan);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index c = 0; c < 2; ++c) {
                PointMatrix up = x, down = x;
                up(i, c) += h;
                down(i, c) -= h;
                const double fd = (plan_cost(up, target.points(), plan) - plan_cost(down, target.points(), plan)) / (2 * h);
                CHECK(grad(i, c) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
            }
    }
}

TEST_CASE("matched particles do not move") {
    std::mt19937_64 rng(2);
    const PointMatrix x = gaussian_points(30, 2, rng);
    const WeightedPointCloud target(x);
    const auto result = flow_step(x, target, HcpStep{bounding_box(x), 0}, 0.1);
    CHECK(result.loss == 0.0);
    CHECK(result.particles == x);
    for (const auto& e : result.coupling.entries) CHECK(e.source == e.target);
}

TEST_CASE("single particle step") {
    PointMatrix x(1, 1), y(1, 1);
    x << 0.0;
    y << 1.0;
    const WeightedPointCloud target(y);
    const auto hcp = flow_step(x, target, HcpStep{bounding_box(target), 0}, 0.25);
    CHECK(hcp.particles(0, 0) == doctest::Approx(0.5));
    const auto sliced = flow_step(x, target, SlicedStep{Eigen::VectorXd::Ones(1)}, 0.25);
    CHECK(sliced.particles(0, 0) == doctest::Approx(0.5));

    PointMatrix x2(1, 2), y2(1, 2);
    x2 << 0.0, 0.0;
    y2 << 1.0, 2.0;
    const WeightedPointCloud target2(y2);
    const auto step2 = flow_step(x2, target2, SlicedStep{Eigen::Vector2d(1.0, 0.0)}, 0.25);
    CHECK(step2.particles(0, 0) == doctest::Approx(0.5));
    CHECK(step2.particles(0, 1) == 0.0);
    CHECK(step2.loss == doctest::Approx(1.0));
}

TEST_CASE("trajectory logging and determinism") {
    FlowConfig cfg;
    cfg.particles = 60;
    cfg.target_size = 60;
    cfg.iters = 0;
    cfg.seed = 3;
    CHECK(run_flow(cfg, "gauss25").snapshots.size() == 1);

    cfg.iters = 25;
    for (FlowMetric metric : {FlowMetric::Hcp, FlowMetric::Sliced}) {
        cfg.metric = metric;
        const auto a = run_flow(cfg, "circle");
        const auto b = run_flow(cfg, "circle");
        REQUIRE(a.snapshots.size() == 4);  // 0, 10, 20, 25
        CHECK(a.snapshots.back().iter == 25);
        for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
            CHECK(a.snapshots[s].particles == b.snapshots[s].particles);
            CHECK(a.snapshots[s].loss == b.snapshots[s].loss);
            CHECK(a.snapshots[s].exact_w2 == b.snapshots[s].exact_w2);
        }
        CHECK(*a.snapshots.back().exact_w2 < *a.snapshots.front().exact_w2);
    }
}

TEST_CASE("flow targets and outputs") {
    CHECK(flow_target("swissroll", 100, 1).size() == 100);
    CHECK(flow_target("gauss25", 100, 1).points() == flow_target("gauss25", 100, 1).points());
    CHECK_THROWS_AS(flow_target("no-such-target", 10, 1), InvalidInput);

    FlowConfig cfg;
    cfg.particles = 20;
    cfg.target_size = 20;
    cfg.iters = 3;
    const auto traj = run_flow(cfg, "gauss25");
    const auto dir = std::filesystem::temp_directory_path() / "hilbert_ot_flow_out";
    std::filesystem::remove_all(dir);
    write_trajectory(dir, traj);
    CHECK(std::filesystem::exists(dir / "trajectory.csv"));
    CHECK(std::filesystem::exists(dir / "snapshot_3.csv"));

    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg.lr = 0.01;
    cfg.particles = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
