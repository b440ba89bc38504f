#include "hilbert_ot/subspace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hilbert_ot/error.hpp"
#include "hilbert_ot/parallel.hpp"
#include "hilbert_ot/random.hpp"

namespace hilbert_ot {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

void check_pair(const WeightedPointCloud& x, const WeightedPointCloud& y) {
    if (x.dim() != y.dim())
        throw InvalidInput("dimension mismatch: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
}

void check_subdims(unsigned d, unsigned q) {
    if (q < 1) throw ParameterError("subspace dimension q must be >= 1");
    if (q > d) throw ParameterError("subspace dimension q = " + std::to_string(q) + " exceeds d = " + std::to_string(d));
}

/// Index of the largest-magnitude entry (first one on ties).
Eigen::Index pivot_row(const Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < v.size(); ++r)
        if (std::abs(v[r]) > std::abs(v[best])) best = r;
    return best;
}

double projected_hcp_power(const WeightedPointCloud& x, const WeightedPointCloud& y, const Eigen::MatrixXd& frame,
                           double p, unsigned order, SparseCoupling* coupling_out = nullptr) {
    const WeightedPointCloud px(project(x.points(), frame), x.weights());
    const WeightedPointCloud py(project(y.points(), frame), y.weights());
    HcpParams hp;
    hp.p = p;
    hp.order = order;
    SparseCoupling plan = hcp_coupling(px, py, hp);
    const double cost = coupling_cost(plan, px.points(), py.points(), p);
    if (coupling_out) *coupling_out = std::move(plan);
    return cost;
}

unsigned projected_order(unsigned order, std::size_t m, std::size_t n, unsigned q) {
    if (q < 2) return 0;
    return order != 0 ? order : default_order(m, n, q);
}

}  // namespace

ProjectionMatrix::ProjectionMatrix(Eigen::MatrixXd e) : e_(std::move(e)) {
    if (e_.cols() < 1 || e_.cols() > e_.rows())
        throw ParameterError("projection frame must be d x q with 1 <= q <= d");
    if (orthonormality_error(e_) > kOrthonormalTolerance)
        throw InvalidInput("projection frame columns are not orthonormal");
}

double ProjectionMatrix::orthonormality_error(const Eigen::MatrixXd& e) {
    return (e.transpose() * e - Eigen::MatrixXd::Identity(e.cols(), e.cols())).norm();
}

ProjectionMatrix ProjectionSampler::draw(std::uint64_t index) const {
    check_subdims(dims, subdims);
    Rng rng = substream(seed, index);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(dims, subdims);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
        for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(rng);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dims, subdims);
    const auto& r = qr.matrixQR();
    for (Eigen::Index c = 0; c < q.cols(); ++c)
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    return ProjectionMatrix(std::move(q));
}

ProjectionMatrix sample_stiefel(const ProjectionSampler& sampler) { return sampler.draw(sampler.counter); }

PointMatrix project(const PointMatrix& points, const Eigen::MatrixXd& frame) {
    if (points.cols() != frame.rows()) throw InvalidInput("projection frame does not match point dimension");
    return points * frame;
}

DistanceReport iprhcp_over_frames(const WeightedPointCloud& x, const WeightedPointCloud& y, double p, unsigned order,
                                  std::span<const Eigen::MatrixXd> frames, std::size_t threads) {
    const auto start = Clock::now();
    check_pair(x, y);
    if (!(p >= 1.0)) throw ParameterError("cost order p must be >= 1");
    if (frames.empty()) throw ParameterError("at least one projection is required");
    const auto q = static_cast<unsigned>(frames.front().cols());
    for (const auto& f : frames) {
        if (f.rows() != x.dim() || f.cols() != q) throw InvalidInput("projection frames must all be d x q");
    }
    const unsigned k = projected_order(order, x.size(), y.size(), q);

    std::vector<double> powers(frames.size());
    parallel_for(frames.size(), threads,
                 [&](std::size_t l) { powers[l] = projected_hcp_power(x, y, frames[l], p, k); });

    double sum = 0.0;
    for (double v : powers) sum += v;
    const double mean = sum / static_cast<double>(powers.size());
    double ss = 0.0;
    for (double v : powers) ss += (v - mean) * (v - mean);

    DistanceReport report;
    report.metric = "iprhcp";
    report.value = std::pow(mean, 1.0 / p);
    report.projection_stddev = powers.size() > 1 ? std::sqrt(ss / static_cast<double>(powers.size() - 1)) : 0.0;
    report.params = {{"p", fmt(p)}, {"q", std::to_string(q)}, {"k", std::to_string(k)},
                     {"projections", std::to_string(frames.size())}};
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

DistanceReport iprhcp(const WeightedPointCloud& x, const WeightedPointCloud& y, const IprhcpParams& params) {
    const auto start = Clock::now();
    check_pair(x, y);
    check_subdims(x.dim(), params.subdims);
    if (params.projections < 1) throw ParameterError("number of projections must be >= 1");

    ProjectionSampler sampler{x.dim(), params.subdims, params.seed, 0};
    std::vector<Eigen::MatrixXd> frames(params.projections);
    parallel_for(frames.size(), params.threads, [&](std::size_t l) { frames[l] = sampler.draw(l).matrix(); });

    DistanceReport report = iprhcp_over_frames(x, y, params.p, params.order, frames, params.threads);
    report.params.emplace_back("seed", std::to_string(params.seed));
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& symmetric, unsigned q) {
    if (symmetric.rows() != symmetric.cols()) throw InvalidInput("top_eigenvectors needs a square matrix");
    if (q > symmetric.rows()) throw ParameterError("more eigenvectors requested than the matrix dimension");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();
    Eigen::MatrixXd vectors = solver.eigenvectors();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::vector<Eigen::Index> pivots(order.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (std::size_t i = 0; i < order.size(); ++i) pivots[i] = pivot_row(vectors.col(static_cast<Eigen::Index>(i)));
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return pivots[static_cast<std::size_t>(a)] < pivots[static_cast<std::size_t>(b)];
    });

    Eigen::MatrixXd top(symmetric.rows(), q);
    for (unsigned c = 0; c < q; ++c) {
        Eigen::VectorXd v = vectors.col(order[c]);
        if (v[pivot_row(v)] < 0) v = -v;
        top.col(c) = v;
    }
    return top;
}

DistanceReport prhcp(const WeightedPointCloud& x, const WeightedPointCloud& y, const PrhcpParams& params) {
    const auto start = Clock::now();
    check_pair(x, y);
    const unsigned d = x.dim();
    const unsigned q = params.subdims;
    check_subdims(d, q);
    if (!(params.p >= 1.0)) throw ParameterError("cost order p must be >= 1");
    if (params.max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(params.tol >= 0.0)) throw ParameterError("tolerance must be >= 0");
    const unsigned k = projected_order(params.order, x.size(), y.size(), q);

    const PointMatrix& xs = x.points();
    const PointMatrix& ys = y.points();

    PrhcpState state;
    state.omega = Eigen::MatrixXd::Identity(d, d);
    state.u = state.omega.leftCols(q);
    state.t = 0;
    state.tau = 1.0;

    double best = -1.0;
    Eigen::MatrixXd best_u;
    SparseCoupling best_plan;
    double previous = 0.0;
    bool converged = false;
    std::size_t iterations = 0;

    for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
        SparseCoupling plan;
        state.objective = std::pow(projected_hcp_power(x, y, state.u, params.p, k, &plan), 1.0 / params.p);
        ++iterations;
        if (params.on_iteration) params.on_iteration(state);
        if (state.objective > best) {
            best = state.objective;
            best_u = state.u;
            best_plan = plan;
        }
        if (iter > 0 && std::abs(state.objective - previous) <= params.tol * std::max(std::abs(previous), 1e-300)) {
            converged = true;
            break;
        }
        if (iter + 1 == params.max_iters) break;
        previous = state.objective;

        // Rows of diag(a) X - P Y: sum_j P_ij (x_i - y_j).
        Eigen::MatrixXd v = x.weights().asDiagonal() * xs;
        for (const auto& e : plan.entries)
            v.row(static_cast<Eigen::Index>(e.source)) -= e.mass * ys.row(static_cast<Eigen::Index>(e.target));
        state.u = top_eigenvectors(v.transpose() * v, q);

        if (params.momentum) {
            state.omega = (1.0 - state.tau) * state.omega + state.tau * state.u * state.u.transpose();
            state.omega = 0.5 * (state.omega + state.omega.transpose()).eval();
            state.u = top_eigenvectors(state.omega, q);
        }
        state.t += 1;
        state.tau = 2.0 / (2.0 + static_cast<double>(state.t));
    }

    DistanceReport report;
    report.metric = "prhcp";
    report.value = std::max(best, 0.0);
    report.subspace = best_u;
    report.coupling = std::move(best_plan);
    report.converged = converged;
    report.iterations = iterations;
    report.params = {{"p", fmt(params.p)}, {"q", std::to_string(q)}, {"k", std::to_string(k)},
                     {"max_iters", std::to_string(params.max_iters)}, {"tol", fmt(params.tol)},
                     {"momentum", params.momentum ? "true" : "false"}};
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

}  // namespace hilbert_ot
