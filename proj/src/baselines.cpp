#include "hilbert_ot/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "hilbert_ot/error.hpp"
#include "hilbert_ot/ot1d.hpp"
#include "hilbert_ot/parallel.hpp"
#include "hilbert_ot/subspace.hpp"

namespace hilbert_ot {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();
/// Residual supply/demand below this is considered exhausted.
constexpr double kMassEps = 1e-14;

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

/// Removes cycles from the support of an optimal plan. Every support edge
/// has zero reduced cost, so pushing mass around a cycle keeps the cost.
void cancel_cycles(Eigen::MatrixXd& flow, std::size_t m, std::size_t n) {
    for (;;) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0) edges.emplace_back(i, j);
        UnionFind uf(m + n);
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(m + n);  // (neighbor, edge index)
        std::size_t closing = edges.size();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [i, j] = edges[e];
            if (!uf.unite(i, m + j)) {
                closing = e;
                break;
            }
            adj[i].emplace_back(m + j, e);
            adj[m + j].emplace_back(i, e);
        }
        if (closing == edges.size()) return;

        // Path from sink node back to source node inside the forest.
        const auto [ci, cj] = edges[closing];
        const std::size_t from = m + cj;
        const std::size_t to = ci;
        std::vector<std::size_t> via(m + n, edges.size());
        std::vector<std::size_t> prev(m + n, m + n);
        std::queue<std::size_t> bfs;
        bfs.push(from);
        prev[from] = from;
        while (!bfs.empty()) {
            const std::size_t v = bfs.front();
            bfs.pop();
            if (v == to) break;
            for (const auto& [w, e] : adj[v]) {
                if (prev[w] != m + n) continue;
                prev[w] = v;
                via[w] = e;
                bfs.push(w);
            }
        }
        // Cycle: closing edge (+), then path edges alternate (-, +, -, ...).
        std::vector<std::size_t> cycle{closing};
        for (std::size_t v = to; v != from; v = prev[v]) cycle.push_back(via[v]);
        // cycle[0] is (ci, cj); walking from `to` (= ci) back to `from` gives
        // edges adjacent in order, so signs alternate along the vector.
        double theta = kInf;
        for (std::size_t s = 0; s < cycle.size(); s += 2) {
            const auto [i, j] = edges[cycle[s]];
            theta = std::min(theta, flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        for (std::size_t s = 0; s < cycle.size(); ++s) {
            const auto [i, j] = edges[cycle[s]];
            double& f = flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            f += (s % 2 == 0) ? -theta : theta;
            if (f <= kMassEps * 1e-3) f = 0.0;
        }
        // Exactly zero the edge that achieved the minimum.
        for (std::size_t s = 0; s < cycle.size(); s += 2) {
            const auto [i, j] = edges[cycle[s]];
            double& f = flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (f <= std::abs(theta) * 1e-15) {
                f = 0.0;
                break;
            }
        }
    }
}

void check_weights(const Eigen::VectorXd& w, const char* name) {
    if (w.size() == 0) throw InvalidInput(std::string(name) + " weights are empty");
    if (!w.allFinite() || (w.array() < 0).any()) throw InvalidInput(std::string(name) + " weights must be finite and >= 0");
    if (std::abs(w.sum() - 1.0) > 1e-9) throw InvalidInput(std::string(name) + " weights do not sum to 1");
}

bool constant_weights(const Eigen::VectorXd& w) { return (w.array() == w[0]).all(); }

/// Duals shifted so min alpha = 0, plus the primal/dual values and the
/// largest violation of alpha_i + beta_j <= C_ij.
void finish_certificate(const LpTransportProblem& problem, TransportSolution& sol) {
    const double shift = sol.alpha.minCoeff();
    sol.alpha.array() -= shift;
    sol.beta.array() += shift;
    sol.primal = 0.0;
    for (const auto& e : sol.coupling.entries)
        sol.primal += e.mass * problem.cost(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target));
    const Eigen::MatrixXd slack = (sol.alpha.replicate(1, problem.cost.cols()) +
                                   sol.beta.transpose().replicate(problem.cost.rows(), 1)) -
                                  problem.cost;
    sol.dual_infeasibility = std::max(0.0, slack.maxCoeff());
    sol.dual = problem.a.dot(sol.alpha) + problem.b.dot(sol.beta);
}

/// Equal sizes and uniform weights: an optimal permutation found by shortest
/// augmenting paths over columns with row and column potentials.
TransportSolution solve_assignment(const LpTransportProblem& problem) {
    const auto n = static_cast<std::size_t>(problem.a.size());
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor cost = problem.cost;

    // 1-based columns; column 0 is the virtual start of each search.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        row_of[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of[j0];
            const double* crow = cost.data() + (i0 - 1) * n;
            const double ui = u[i0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = crow[j - 1] - ui - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    TransportSolution sol;
    std::vector<std::size_t> col_of(n);
    for (std::size_t j = 1; j <= n; ++j) col_of[row_of[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) sol.coupling.entries.push_back({i, col_of[i], problem.a[0]});
    sol.alpha = Eigen::Map<const Eigen::VectorXd>(u.data() + 1, static_cast<Eigen::Index>(n));
    sol.beta = Eigen::Map<const Eigen::VectorXd>(v.data() + 1, static_cast<Eigen::Index>(n));
    finish_certificate(problem, sol);
    return sol;
}

}  // namespace

LpTransportProblem LpTransportProblem::from_clouds(const WeightedPointCloud& x, const WeightedPointCloud& y, double p) {
    if (x.dim() != y.dim()) throw InvalidInput("dimension mismatch between point clouds");
    if (!(p >= 1.0)) throw ParameterError("cost order p must be >= 1");
    if (x.size() * y.size() > kExactSizeLimit)
        throw InvalidInput("exact Wasserstein limited to m*n <= 1e6 (got " + std::to_string(x.size()) + " x " +
                           std::to_string(y.size()) + "); use hcp, iprhcp, prhcp or sw instead");
    LpTransportProblem problem;
    problem.cost.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            problem.cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                pth_power_distance(x.point(i), y.point(j), p);
    problem.a = x.weights();
    problem.b = y.weights();
    return problem;
}

TransportSolution solve_transport(const LpTransportProblem& problem) {
    const auto m = static_cast<std::size_t>(problem.a.size());
    const auto n = static_cast<std::size_t>(problem.b.size());
    check_weights(problem.a, "source");
    check_weights(problem.b, "target");
    if (static_cast<std::size_t>(problem.cost.rows()) != m || static_cast<std::size_t>(problem.cost.cols()) != n)
        throw InvalidInput("cost matrix shape does not match the weight vectors");
    if (!problem.cost.allFinite() || (problem.cost.array() < 0).any())
        throw InvalidInput("transport costs must be finite and >= 0");
    if (m == n && constant_weights(problem.a) && constant_weights(problem.b)) return solve_assignment(problem);
    const Eigen::MatrixXd& c = problem.cost;

    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    std::vector<double> supply(problem.a.data(), problem.a.data() + m);
    std::vector<double> demand(problem.b.data(), problem.b.data() + n);
    // Reduced cost of arc u -> v is cost + pot(u) - pot(v) >= 0.
    std::vector<double> pot_src(m, 0.0);
    std::vector<double> pot_snk(n, 0.0);

    std::vector<double> dist_src(m);
    std::vector<double> dist_snk(n);
    std::vector<char> done_src(m);
    std::vector<char> done_snk(n);
    std::vector<std::size_t> parent_snk(n);  // source preceding each sink
    std::vector<std::size_t> parent_src(m);  // sink preceding each source (m + n: path start)

    auto remaining = [](const std::vector<double>& v) {
        for (double r : v)
            if (r > kMassEps) return true;
        return false;
    };

    while (remaining(supply) && remaining(demand)) {
        std::fill(dist_src.begin(), dist_src.end(), kInf);
        std::fill(dist_snk.begin(), dist_snk.end(), kInf);
        std::fill(done_src.begin(), done_src.end(), 0);
        std::fill(done_snk.begin(), done_snk.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (supply[i] > kMassEps) {
                dist_src[i] = 0.0;
                parent_src[i] = m + n;
            }
        }

        std::size_t target = n;
        double reach = kInf;
        for (;;) {
            // Dense Dijkstra: pick the closest unsettled node.
            double best = kInf;
            std::size_t node = m + n;
            for (std::size_t i = 0; i < m; ++i)
                if (!done_src[i] && dist_src[i] < best) best = dist_src[i], node = i;
            for (std::size_t j = 0; j < n; ++j)
                if (!done_snk[j] && dist_snk[j] < best) best = dist_snk[j], node = m + j;
            if (node == m + n) break;

            if (node < m) {
                const std::size_t i = node;
                done_src[i] = 1;
                const double base = best + pot_src[i];
                for (std::size_t j = 0; j < n; ++j) {
                    if (done_snk[j]) continue;
                    const double nd = base + c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - pot_snk[j];
                    if (nd < dist_snk[j]) {
                        dist_snk[j] = nd;
                        parent_snk[j] = i;
                    }
                }
            } else {
                const std::size_t j = node - m;
                done_snk[j] = 1;
                if (demand[j] > kMassEps) {
                    target = j;
                    reach = best;
                    break;
                }
                const double base = best + pot_snk[j];
                for (std::size_t i = 0; i < m; ++i) {
                    if (done_src[i] || flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <= 0) continue;
                    const double nd = base - c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - pot_src[i];
                    if (nd < dist_src[i]) {
                        dist_src[i] = nd;
                        parent_src[i] = j;
                    }
                }
            }
        }
        if (target == n) throw InvalidInput("transport problem has no feasible augmenting path");

        for (std::size_t i = 0; i < m; ++i) pot_src[i] += std::min(done_src[i] ? dist_src[i] : kInf, reach);
        for (std::size_t j = 0; j < n; ++j) pot_snk[j] += std::min(done_snk[j] ? dist_snk[j] : kInf, reach);

        // Bottleneck along the path.
        double delta = demand[target];
        std::size_t j = target;
        std::size_t i = parent_snk[j];
        for (;;) {
            if (parent_src[i] == m + n) {
                delta = std::min(delta, supply[i]);
                break;
            }
            const std::size_t back = parent_src[i];
            delta = std::min(delta, flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(back)));
            j = back;
            i = parent_snk[j];
        }

        j = target;
        i = parent_snk[j];
        demand[target] -= delta;
        for (;;) {
            flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += delta;
            if (parent_src[i] == m + n) {
                supply[i] -= delta;
                break;
            }
            const std::size_t back = parent_src[i];
            double& f = flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(back));
            f -= delta;
            if (f <= kMassEps * 1e-3) f = 0.0;
            j = back;
            i = parent_snk[j];
        }
    }

    cancel_cycles(flow, m, n);

    TransportSolution sol;
    sol.alpha.resize(static_cast<Eigen::Index>(m));
    sol.beta.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) sol.alpha[static_cast<Eigen::Index>(i)] = -pot_src[i];
    for (std::size_t j = 0; j < n; ++j) sol.beta[static_cast<Eigen::Index>(j)] = pot_snk[j];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double f = flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (f > 0) sol.coupling.entries.push_back({i, j, f});
        }
    finish_certificate(problem, sol);
    return sol;
}

DistanceReport exact_wasserstein(const WeightedPointCloud& x, const WeightedPointCloud& y, double p) {
    const auto start = Clock::now();
    const LpTransportProblem problem = LpTransportProblem::from_clouds(x, y, p);
    TransportSolution sol = solve_transport(problem);
    DistanceReport report;
    report.metric = "wass";
    report.value = std::pow(std::max(sol.primal, 0.0), 1.0 / p);
    report.coupling = std::move(sol.coupling);
    report.params = {{"p", fmt(p)},
                     {"m", std::to_string(x.size())},
                     {"n", std::to_string(y.size())},
                     {"duality_gap", fmt(sol.duality_gap())}};
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

DistanceReport sliced_wasserstein(const WeightedPointCloud& x, const WeightedPointCloud& y, const SlicedParams& params) {
    const auto start = Clock::now();
    if (x.dim() != y.dim()) throw InvalidInput("dimension mismatch between point clouds");
    if (!(params.p >= 1.0)) throw ParameterError("cost order p must be >= 1");
    if (params.projections < 1) throw ParameterError("number of projections must be >= 1");

    const ProjectionSampler sampler{x.dim(), 1, params.seed, 0};
    std::vector<double> powers(params.projections);
    parallel_for(powers.size(), params.threads, [&](std::size_t l) {
        const Eigen::VectorXd theta = sampler.draw(l).matrix().col(0);
        const Eigen::VectorXd px = x.points() * theta;
        const Eigen::VectorXd py = y.points() * theta;
        const auto lx = SortedWeightedLine::from_unsorted(std::span<const double>(px.data(), x.size()),
                                                          std::span<const double>(x.weights().data(), x.size()));
        const auto ly = SortedWeightedLine::from_unsorted(std::span<const double>(py.data(), y.size()),
                                                          std::span<const double>(y.weights().data(), y.size()));
        powers[l] = std::pow(wasserstein_1d(lx, ly, params.p), params.p);
    });

    double sum = 0.0;
    for (double v : powers) sum += v;
    const double mean = sum / static_cast<double>(powers.size());
    double ss = 0.0;
    for (double v : powers) ss += (v - mean) * (v - mean);

    DistanceReport report;
    report.metric = "sw";
    report.value = std::pow(mean, 1.0 / params.p);
    report.projection_stddev = powers.size() > 1 ? std::sqrt(ss / static_cast<double>(powers.size() - 1)) : 0.0;
    report.params = {{"p", fmt(params.p)}, {"projections", std::to_string(params.projections)},
                     {"seed", std::to_string(params.seed)}};
    report.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols()) throw InvalidInput("covariance must be square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw InvalidInput("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (s + s.transpose()));
    if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
    Eigen::VectorXd values = solver.eigenvalues();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] < -1e-12 * scale) throw InvalidInput("covariance is not positive semidefinite");
        values[i] = std::sqrt(std::max(values[i], 0.0));
    }
    return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

double gaussian_w2(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                   const Eigen::MatrixXd& cov2) {
    const Eigen::Index d = mean1.size();
    if (mean2.size() != d || cov1.rows() != d || cov2.rows() != d)
        throw InvalidInput("Gaussian parameters have inconsistent dimensions");
    const Eigen::MatrixXd root1 = psd_sqrt(cov1);
    psd_sqrt(cov2);  // validates cov2
    const Eigen::MatrixXd inner = root1 * cov2 * root1;
    const Eigen::MatrixXd cross = psd_sqrt(0.5 * (inner + inner.transpose()));
    const double trace = cov1.trace() + cov2.trace() - 2.0 * cross.trace();
    return std::sqrt(std::max((mean1 - mean2).squaredNorm() + trace, 0.0));
}

}  // namespace hilbert_ot
