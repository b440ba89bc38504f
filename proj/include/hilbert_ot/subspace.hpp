#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>

#include "hilbert_ot/hcp.hpp"

namespace hilbert_ot {

/// d x q matrix with orthonormal columns (E^T E = I_q to 1e-10).
class ProjectionMatrix {
public:
    static constexpr double kOrthonormalTolerance = 1e-10;

    explicit ProjectionMatrix(Eigen::MatrixXd e);

    const Eigen::MatrixXd& matrix() const { return e_; }
    unsigned dims() const { return static_cast<unsigned>(e_.rows()); }
    unsigned subdims() const { return static_cast<unsigned>(e_.cols()); }
    /// ||E^T E - I||_F
    static double orthonormality_error(const Eigen::MatrixXd& e);

private:
    Eigen::MatrixXd e_;
};

/// Deterministic stream of Haar-distributed frames on the Stiefel set.
/// Draw i depends only on (seed, i).
struct ProjectionSampler {
    unsigned dims = 2;
    unsigned subdims = 1;
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    ProjectionMatrix next() { return draw(counter++); }
    ProjectionMatrix draw(std::uint64_t index) const;
};

/// Frame number `sampler.counter`: Gaussian d x q matrix, thin QR, column
/// signs flipped so the R diagonal is positive.
ProjectionMatrix sample_stiefel(const ProjectionSampler& sampler);

/// Rows of `points` mapped through E (n x d times d x q).
PointMatrix project(const PointMatrix& points, const Eigen::MatrixXd& frame);

struct IprhcpParams {
    double p = 2.0;
    unsigned subdims = 2;
    std::size_t projections = 64;
    std::uint64_t seed = 0;
    /// Curve order in the projected space; 0 selects the default rule.
    unsigned order = 0;
    /// 0 means default_threads().
    std::size_t threads = 0;
};

/// Monte-Carlo integral projection robust HCP:
/// ((1/L) sum_l HCP_p^p(E_l^T X, E_l^T Y))^(1/p), E_l Haar on the Stiefel set,
/// PerCloud boxes recomputed in each projected space. projection_stddev holds
/// the sample standard deviation of the per-projection HCP_p^p values.
DistanceReport iprhcp(const WeightedPointCloud& x, const WeightedPointCloud& y, const IprhcpParams& params);

/// Same estimator over caller-supplied d x q frames (not necessarily
/// orthonormal). Used for the duplicated-column identity.
DistanceReport iprhcp_over_frames(const WeightedPointCloud& x, const WeightedPointCloud& y, double p, unsigned order,
                                  std::span<const Eigen::MatrixXd> frames, std::size_t threads = 0);

/// Iterate of the alternating PRHCP scheme, exposed for tracing.
struct PrhcpState {
    Eigen::MatrixXd u;
    Eigen::MatrixXd omega;
    std::size_t t = 0;
    double tau = 1.0;
    double objective = 0.0;
};

struct PrhcpParams {
    double p = 2.0;
    unsigned subdims = 2;
    unsigned order = 0;
    std::size_t max_iters = 30;
    double tol = 1e-5;
    /// Averaging of U U^T into Omega; disabling it uses the raw SVD frame.
    bool momentum = true;
    std::function<void(const PrhcpState&)> on_iteration;
};

/// Projection robust HCP by alternating HCP couplings of the projected
/// clouds with subspace updates from the top singular vectors of
/// diag(a) X - P Y. Reports the largest objective seen, its frame
/// (subspace) and coupling.
DistanceReport prhcp(const WeightedPointCloud& x, const WeightedPointCloud& y, const PrhcpParams& params);

/// Top-q eigenvectors of a symmetric matrix, ordered by eigenvalue
/// descending then by the row of each vector's largest-magnitude entry;
/// each vector is signed so that entry is positive.
Eigen::MatrixXd top_eigenvectors(const Eigen::MatrixXd& symmetric, unsigned q);

}  // namespace hilbert_ot
