#include "hilbert_ot/flows.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "hilbert_ot/baselines.hpp"
#include "hilbert_ot/error.hpp"
#include "hilbert_ot/hcp.hpp"
#include "hilbert_ot/ot1d.hpp"
#include "hilbert_ot/random.hpp"
#include "hilbert_ot/subspace.hpp"
#include "hilbert_ot/synthetic.hpp"

namespace hilbert_ot {

namespace {

using Clock = std::chrono::steady_clock;

// Stream ids under the flow seed.
constexpr std::uint64_t kParticleStream = 0;
constexpr std::uint64_t kTargetStream = 1;
constexpr std::uint64_t kDirectionSeedSalt = 0x5eed'd1ec'7104'0000ULL;

SparseCoupling step_coupling(const PointMatrix& x, const WeightedPointCloud& target, const SlicedStep& step) {
    const Eigen::VectorXd px = x * step.direction;
    const Eigen::VectorXd py = target.points() * step.direction;
    const std::vector<double> a(static_cast<std::size_t>(x.rows()), 1.0 / static_cast<double>(x.rows()));
    const auto lx = SortedWeightedLine::from_unsorted(std::span<const double>(px.data(), a.size()), a);
    const auto ly = SortedWeightedLine::from_unsorted(
        std::span<const double>(py.data(), target.size()),
        std::span<const double>(target.weights().data(), target.size()));
    return quantile_coupling(lx, ly);
}

SparseCoupling step_coupling(const PointMatrix& x, const WeightedPointCloud& target, const HcpStep& step) {
    const auto n = static_cast<std::size_t>(x.rows());
    const unsigned d = static_cast<unsigned>(x.cols());
    if (d == 1) return step_coupling(x, target, SlicedStep{Eigen::VectorXd::Ones(1)});
    const unsigned order = step.order != 0 ? step.order : default_order(n, target.size(), d);
    const auto ox = hilbert_order(x, step.box, order);
    const auto oy = hilbert_order(target.points(), step.box, order);
    std::vector<double> a(n, 1.0 / static_cast<double>(n));
    std::vector<double> b(oy.size());
    for (std::size_t s = 0; s < oy.size(); ++s) b[s] = target.weights()[static_cast<Eigen::Index>(oy[s])];
    SparseCoupling plan = northwest_coupling_unchecked(a, b);
    for (auto& e : plan.entries) {
        e.source = ox[e.source];
        e.target = oy[e.target];
    }
    return plan;
}

}  // namespace

PointMatrix transport_gradient(const PointMatrix& x, const PointMatrix& y, const SparseCoupling& coupling) {
    if (x.cols() != y.cols()) throw InvalidInput("dimension mismatch in transport gradient");
    PointMatrix grad = PointMatrix::Zero(x.rows(), x.cols());
    for (const auto& e : coupling.entries) {
        const auto i = static_cast<Eigen::Index>(e.source);
        const auto j = static_cast<Eigen::Index>(e.target);
        grad.row(i) += 2.0 * e.mass * (x.row(i) - y.row(j));
    }
    return grad;
}

FlowStepResult flow_step(const PointMatrix& x, const WeightedPointCloud& target, const StepMetric& metric, double lr) {
    if (x.rows() < 1) throw InvalidInput("flow needs at least one particle");
    if (x.cols() != target.dim()) throw InvalidInput("particles and target differ in dimension");
    if (!(lr > 0)) throw ParameterError("learning rate must be > 0");
    const double n = static_cast<double>(x.rows());

    FlowStepResult result;
    result.coupling = std::visit([&](const auto& m) { return step_coupling(x, target, m); }, metric);
    PointMatrix grad = transport_gradient(x, target.points(), result.coupling);

    if (const auto* sliced = std::get_if<SlicedStep>(&metric)) {
        const Eigen::VectorXd& theta = sliced->direction;
        const Eigen::VectorXd along = grad * theta;
        grad = along * theta.transpose();
        double loss = 0.0;
        for (const auto& e : result.coupling.entries) {
            const double gap = (x.row(static_cast<Eigen::Index>(e.source)) -
                                target.points().row(static_cast<Eigen::Index>(e.target))).dot(theta);
            loss += e.mass * gap * gap;
        }
        result.loss = loss;
    } else {
        result.loss = coupling_cost(result.coupling, x, target.points(), 2.0);
    }
    result.particles = x - (lr * n) * grad;
    return result;
}

void FlowConfig::validate() const {
    if (!(lr > 0) || !std::isfinite(lr)) throw ParameterError("learning rate must be a positive number");
    if (particles < 1) throw ParameterError("particle count must be >= 1");
    if (target_size < 1) throw ParameterError("target size must be >= 1");
    if (log_every < 1) throw ParameterError("log_every must be >= 1");
    if (!(box_margin >= 0)) throw ParameterError("box margin must be >= 0");
}

WeightedPointCloud flow_target(const std::string& name, std::size_t n, std::uint64_t seed) {
    Rng rng = substream(seed, kTargetStream);
    if (name == "gauss25") return WeightedPointCloud(sample(Gauss25{}, n, rng));
    if (name == "swissroll") return WeightedPointCloud(sample(SwissRoll{}, n, rng));
    if (name == "circle") return WeightedPointCloud(sample(Circle{}, n, rng));
    if (std::filesystem::is_regular_file(name)) return read_point_cloud_csv(name);
    throw InvalidInput("unknown flow target '" + name + "' (expected gauss25, swissroll, circle or a CSV file)");
}

FlowTrajectory run_flow(const FlowConfig& config, const WeightedPointCloud& target) {
    config.validate();
    const auto start = Clock::now();
    const unsigned d = target.dim();
    Rng rng = substream(config.seed, kParticleStream);
    PointMatrix x = sample_standard_normal(config.particles, d, rng);

    StepMetric metric;
    if (config.metric == FlowMetric::Hcp) {
        BoundingBox box = BoundingBox::merge(bounding_box(target), bounding_box(x)).inflated(config.box_margin);
        metric = HcpStep{std::move(box), config.order};
    }
    const ProjectionSampler directions{d, 1, config.seed ^ kDirectionSeedSalt, 0};
    const bool exact = config.eval_exact && config.particles * target.size() <= kExactSizeLimit;

    FlowTrajectory trajectory{{}, target};
    auto log = [&](std::size_t iter, double loss) {
        FlowSnapshot snap;
        snap.iter = iter;
        snap.loss = loss;
        if (exact) snap.exact_w2 = exact_wasserstein(WeightedPointCloud(x), target, 2.0).value;
        snap.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        snap.particles = x;
        trajectory.snapshots.push_back(std::move(snap));
    };

    double loss = 0.0;
    for (std::size_t t = 0; t <= config.iters; ++t) {
        if (config.metric == FlowMetric::Sliced) metric = SlicedStep{directions.draw(t).matrix().col(0)};
        // The loss at iterate t is evaluated from the coupling used for step t.
        FlowStepResult step;
        if (t < config.iters) {
            step = flow_step(x, target, metric, config.lr);
            loss = step.loss;
        } else {
            loss = flow_step(x, target, metric, config.lr).loss;
        }
        if (t == 0 || t == config.iters || t % config.log_every == 0) log(t, loss);
        if (t < config.iters) x = std::move(step.particles);
        if (!x.allFinite()) throw InvalidInput("flow diverged (non-finite particles) at iteration " + std::to_string(t));
    }
    return trajectory;
}

FlowTrajectory run_flow(const FlowConfig& config, const std::string& target_name) {
    config.validate();
    return run_flow(config, flow_target(target_name, config.target_size, config.seed));
}

void write_trajectory(const std::filesystem::path& dir, const FlowTrajectory& trajectory) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto log_path = dir / "trajectory.csv";
    std::ofstream out(log_path);
    if (!out) throw IoError("cannot write '" + log_path.string() + "'");
    out.precision(17);
    out << "iter,loss,exact_w2,elapsed_s\n";
    for (const auto& s : trajectory.snapshots) {
        out << s.iter << ',' << s.loss << ',';
        if (s.exact_w2) out << *s.exact_w2;
        out << ',' << s.elapsed_seconds << '\n';
        write_point_cloud_csv(dir / ("snapshot_" + std::to_string(s.iter) + ".csv"), s.particles);
    }
    if (!out) throw IoError("failed while writing '" + log_path.string() + "'");
}

}  // namespace hilbert_ot
