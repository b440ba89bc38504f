#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "hilbert_ot/pointcloud.hpp"

namespace hilbert_ot {

struct CouplingEntry {
    std::size_t source = 0;
    std::size_t target = 0;
    double mass = 0.0;

    friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

/// Sparse transport plan between a source and a target weight vector.
struct SparseCoupling {
    std::vector<CouplingEntry> entries;

    /// Largest absolute deviation of either marginal from (a, b).
    double marginal_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    SparseCoupling transposed() const;
    double total_mass() const;
};

/// sum_ij |t|^p over the coordinates of t = x - y.
inline double pth_power_distance(std::span<const double> x, std::span<const double> y, double p) {
    double s = 0.0;
    if (p == 2.0) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double t = x[c] - y[c];
            s += t * t;
        }
    } else if (p == 1.0) {
        for (std::size_t c = 0; c < x.size(); ++c) s += std::abs(x[c] - y[c]);
    } else {
        for (std::size_t c = 0; c < x.size(); ++c) s += std::pow(std::abs(x[c] - y[c]), p);
    }
    return s;
}

/// sum over entries of mass * ||x_i - y_j||_p^p, accumulated in entry order.
double coupling_cost(const SparseCoupling& coupling, const PointMatrix& x, const PointMatrix& y, double p);

void write_coupling_csv(const std::filesystem::path& path, const SparseCoupling& coupling);

}  // namespace hilbert_ot
