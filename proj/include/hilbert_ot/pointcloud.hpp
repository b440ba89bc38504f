#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>

#include "hilbert_ot/hilbert_index.hpp"

namespace hilbert_ot {

/// n x d, one point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Empirical measure: n points in R^d with weights on the simplex.
/// Immutable after construction.
class WeightedPointCloud {
public:
    static constexpr double kWeightTolerance = 1e-9;

    /// Validates finiteness and weights (non-negative, sum within 1e-9 of 1),
    /// then renormalizes the weights to sum exactly as close to 1 as
    /// floating point allows.
    WeightedPointCloud(PointMatrix points, Eigen::VectorXd weights);

    /// Uniform weights 1/n.
    explicit WeightedPointCloud(PointMatrix points);

    const PointMatrix& points() const { return points_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
    unsigned dim() const { return static_cast<unsigned>(points_.cols()); }
    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * points_.cols(), static_cast<std::size_t>(points_.cols())};
    }
    bool uniform() const { return uniform_; }

private:
    PointMatrix points_;
    Eigen::VectorXd weights_;
    bool uniform_ = false;
};

struct BoundingBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    unsigned dim() const { return static_cast<unsigned>(lower.size()); }
    bool contains(std::span<const double> x, double slack = 1e-12) const;
    /// Grow every side by `fraction` of its extent (zero-extent axes grow by `fraction`).
    BoundingBox inflated(double fraction) const;
    static BoundingBox unit_cube(unsigned d);
    static BoundingBox merge(const BoundingBox& a, const BoundingBox& b);
};

/// Which box each cloud is normalized against before quantization.
struct PerCloud {};
struct Shared {
    BoundingBox box;
};
struct UnitCube {};
using DomainMode = std::variant<PerCloud, Shared, UnitCube>;

BoundingBox bounding_box(const WeightedPointCloud& cloud);
BoundingBox bounding_box(const PointMatrix& points);

/// Cell index per axis: floor((x - a) / (b - a) * 2^k), clamped to
/// [0, 2^k - 1]; a zero-extent axis maps to 0.
GridCell quantize(std::span<const double> point, const BoundingBox& box, unsigned order);

/// Hot-loop variant writing into `cell` (size d); no containment check.
void quantize_into(std::span<const double> point, const BoundingBox& box, unsigned order,
                   std::span<std::uint64_t> cell);

/// max(2, ceil(log2(max(m, n)))) capped so that d*k <= 128.
unsigned default_order(std::size_t m, std::size_t n, unsigned dims);

/// CSV, one row per point. A non-numeric first row is a header. With
/// `weighted`, or a header whose last column is `weight`, the final column
/// holds weights; otherwise weights are uniform.
WeightedPointCloud read_point_cloud_csv(const std::filesystem::path& path, bool weighted = false);
void write_point_cloud_csv(const std::filesystem::path& path, const PointMatrix& points,
                           const Eigen::VectorXd* weights = nullptr);

}  // namespace hilbert_ot
