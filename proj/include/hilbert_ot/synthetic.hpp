#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>

#include "hilbert_ot/pointcloud.hpp"
#include "hilbert_ot/random.hpp"

namespace hilbert_ot {

/// Three-component 2D mixture, variance 0.1 per axis, means (-2,0), (0,alpha),
/// (2,0), equal weights. alpha = 0 is the reference (source) mixture.
struct GmmOffset {
    double alpha = 0.0;
};
/// 5 x 5 grid of means on {-4,-2,0,2,4}^2, component std 0.05.
struct Gauss25 {};
/// Planar spiral t (cos t, sin t), t = 1.5 pi (1 + 2u), scaled by 1/7.5
/// after adding N(0, 0.1^2) noise per axis.
struct SwissRoll {};
/// Radius 2, radial noise std 0.05.
struct Circle {};
/// Uniform on [lower, upper]^d.
struct UniformCube {
    unsigned dims = 2;
    double lower = 0.0;
    double upper = 1.0;
};
struct Gaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};
/// Pushforward of U([-1,1]^d) by x -> x + 2 sign(x) (.) sum_{i<qstar} e_i.
struct FragmentedHypercube {
    unsigned dims = 2;
    unsigned qstar = 2;
};

using TargetFamily = std::variant<GmmOffset, Gauss25, SwissRoll, Circle, UniformCube, Gaussian, FragmentedHypercube>;

struct SyntheticTarget {
    TargetFamily family;
    std::size_t n = 500;
    std::uint64_t seed = 0;
};

/// n i.i.d. samples with uniform weights; deterministic per seed.
WeightedPointCloud generate(const SyntheticTarget& target);

/// Draws from the family using the caller's generator.
PointMatrix sample(const TargetFamily& family, std::size_t n, Rng& rng);

/// Standard normal n x d matrix.
PointMatrix sample_standard_normal(std::size_t n, unsigned d, Rng& rng);

std::string family_name(const TargetFamily& family);

}  // namespace hilbert_ot
