#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "hilbert_ot/hcp.hpp"

namespace hilbert_ot {

/// Dense discrete transport problem: cost(i, j) = ||x_i - y_j||_p^p.
struct LpTransportProblem {
    Eigen::MatrixXd cost;
    Eigen::VectorXd a;
    Eigen::VectorXd b;

    static LpTransportProblem from_clouds(const WeightedPointCloud& x, const WeightedPointCloud& y, double p);
};

/// Optimal plan with a dual certificate.
struct TransportSolution {
    SparseCoupling coupling;
    /// sum P_ij C_ij (not rooted).
    double primal = 0.0;
    /// sum a_i alpha_i + sum b_j beta_j.
    double dual = 0.0;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    /// max over (i, j) of alpha_i + beta_j - C_ij, clamped at 0.
    double dual_infeasibility = 0.0;

    double duality_gap() const { return std::abs(primal - dual); }
};

/// Largest m * n accepted by the exact solver.
inline constexpr std::size_t kExactSizeLimit = 1'000'000;

/// Exact solver: successive shortest augmenting paths with Johnson
/// potentials on the dense bipartite graph, followed by zero-cost cycle
/// cancellation so the support is a forest (at most m + n - 1 entries).
TransportSolution solve_transport(const LpTransportProblem& problem);

/// Exact p-Wasserstein distance, (optimal cost)^(1/p). Throws InvalidInput
/// when m * n exceeds kExactSizeLimit.
DistanceReport exact_wasserstein(const WeightedPointCloud& x, const WeightedPointCloud& y, double p = 2.0);

struct SlicedParams {
    double p = 2.0;
    std::size_t projections = 64;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

/// ((1/L) sum_l W_p^p(theta_l^T X, theta_l^T Y))^(1/p), theta_l the
/// q = 1 Stiefel stream of the subspace module. projection_stddev holds the
/// sample standard deviation of the per-direction W_p^p values.
DistanceReport sliced_wasserstein(const WeightedPointCloud& x, const WeightedPointCloud& y, const SlicedParams& params);

/// Closed-form W2 between N(mean1, cov1) and N(mean2, cov2).
/// Throws InvalidInput for non-symmetric or non-PSD covariances.
double gaussian_w2(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1, const Eigen::VectorXd& mean2,
                   const Eigen::MatrixXd& cov2);

/// Symmetric PSD square root via eigendecomposition; eigenvalues in
/// [-1e-12 * scale, 0) are clamped to 0, anything more negative throws.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s);

}  // namespace hilbert_ot
