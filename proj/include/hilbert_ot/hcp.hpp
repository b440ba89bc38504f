#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hilbert_ot/coupling.hpp"
#include "hilbert_ot/hilbert_index.hpp"
#include "hilbert_ot/pointcloud.hpp"

namespace hilbert_ot {

struct HcpParams {
    double p = 2.0;
    /// Curve order; 0 selects default_order(m, n, d).
    unsigned order = 0;
    DomainMode domain = PerCloud{};

    void validate(unsigned dims) const;
};

/// Result of any distance computation, echoed back by the CLI.
struct DistanceReport {
    std::string metric;
    double value = 0.0;
    std::optional<SparseCoupling> coupling;
    std::optional<Eigen::MatrixXd> subspace;
    /// Parameter echo in insertion order (name, value).
    std::vector<std::pair<std::string, std::string>> params;
    double elapsed_seconds = 0.0;
    /// Extras reported by some metrics: per-projection standard deviation
    /// (iprhcp, sw), convergence flag and iteration count (prhcp).
    std::optional<double> projection_stddev;
    std::optional<bool> converged;
    std::optional<std::size_t> iterations;
};

/// Hilbert keys of every point after quantizing against `box`.
std::vector<HilbertKey> hilbert_keys(const PointMatrix& points, const BoundingBox& box, unsigned order);

/// Point indices ordered by Hilbert key; equal keys keep index order.
std::vector<std::size_t> hilbert_order(const PointMatrix& points, const BoundingBox& box, unsigned order);

/// Empirical Hilbert curve projection distance: both clouds are ordered
/// along their order-k Hilbert curves, coupled by the north-west corner
/// rule, and the cost is evaluated on the original coordinates.
/// d = 1 falls back to the closed-form 1D distance.
DistanceReport hcp_distance(const WeightedPointCloud& x, const WeightedPointCloud& y, const HcpParams& params = {});

/// Coupling only (no timing, no parameter echo); shared with subspace and flows.
SparseCoupling hcp_coupling(const WeightedPointCloud& x, const WeightedPointCloud& y, const HcpParams& params);

/// Equal-size, uniform-weight fast path: sort both clouds by key and match
/// position-wise. Same value as hcp_distance on uniform weights.
DistanceReport hcp_matched(const PointMatrix& x, const PointMatrix& y, const HcpParams& params = {});

std::string domain_name(const DomainMode& mode);

}  // namespace hilbert_ot
