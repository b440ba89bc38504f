#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hilbert_ot/coupling.hpp"
#include "hilbert_ot/pointcloud.hpp"

namespace hilbert_ot {

enum class FlowMetric { Hcp, Sliced };

/// HCP step: coupling from Hilbert orderings against one frozen box.
struct HcpStep {
    BoundingBox box;
    unsigned order = 0;
};
/// Sliced step: quantile coupling along one direction, gradient restricted
/// to that direction.
struct SlicedStep {
    Eigen::VectorXd direction;
};
using StepMetric = std::variant<HcpStep, SlicedStep>;

struct FlowStepResult {
    PointMatrix particles;
    /// sum_ij P_ij c(x_i, y_j) before the update (squared Euclidean for HCP,
    /// squared projected gap for the sliced step).
    double loss = 0.0;
    SparseCoupling coupling;
};

/// Gradient of sum_ij P_ij ||x_i - y_j||^2 with respect to each x_i, for a
/// fixed plan: 2 sum_j P_ij (x_i - y_j).
PointMatrix transport_gradient(const PointMatrix& x, const PointMatrix& y, const SparseCoupling& coupling);

/// One explicit Euler step x_i <- x_i - lr * n * grad_i with the plan held
/// fixed at the current iterate. Particles carry uniform weight 1/n.
FlowStepResult flow_step(const PointMatrix& x, const WeightedPointCloud& target, const StepMetric& metric, double lr);

struct FlowConfig {
    FlowMetric metric = FlowMetric::Hcp;
    double lr = 0.01;
    std::size_t iters = 150;
    std::size_t particles = 500;
    std::size_t target_size = 500;
    std::uint64_t seed = 0;
    std::size_t log_every = 10;
    /// Exact W2 to the target at logged iterations when n * N <= 1e6.
    bool eval_exact = true;
    unsigned order = 0;
    double box_margin = 0.05;

    void validate() const;
};

struct FlowSnapshot {
    std::size_t iter = 0;
    double loss = 0.0;
    std::optional<double> exact_w2;
    double elapsed_seconds = 0.0;
    PointMatrix particles;
};

struct FlowTrajectory {
    std::vector<FlowSnapshot> snapshots;
    WeightedPointCloud target;
};

/// Bundled targets: gauss25, swissroll, circle. Anything else is read as a
/// point-cloud CSV. Throws InvalidInput for unknown names that are not files.
WeightedPointCloud flow_target(const std::string& name, std::size_t n, std::uint64_t seed);

/// Runs `iters` steps from N(0, I) particles, logging the initial state,
/// every `log_every`-th iterate, and the final state.
FlowTrajectory run_flow(const FlowConfig& config, const WeightedPointCloud& target);
FlowTrajectory run_flow(const FlowConfig& config, const std::string& target_name);

/// Writes trajectory.csv (iter, loss, exact_w2, elapsed_s) and one
/// snapshot_<iter>.csv per logged iteration into `dir`.
void write_trajectory(const std::filesystem::path& dir, const FlowTrajectory& trajectory);

}  // namespace hilbert_ot
