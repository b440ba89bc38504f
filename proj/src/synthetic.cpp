#include "hilbert_ot/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "hilbert_ot/baselines.hpp"
#include "hilbert_ot/error.hpp"

namespace hilbert_ot {

namespace {

struct Sampler {
    std::size_t n;
    Rng& rng;

    PointMatrix operator()(const GmmOffset& f) const {
        if (!std::isfinite(f.alpha)) throw InvalidInput("gmm_offset alpha must be finite");
        const double stddev = std::sqrt(0.1);
        std::normal_distribution<double> normal(0.0, stddev);
        std::uniform_int_distribution<int> component(0, 2);
        const double means[3][2] = {{-2.0, 0.0}, {0.0, f.alpha}, {2.0, 0.0}};
        PointMatrix out(static_cast<Eigen::Index>(n), 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const int c = component(rng);
            out(i, 0) = means[c][0] + normal(rng);
            out(i, 1) = means[c][1] + normal(rng);
        }
        return out;
    }

    PointMatrix operator()(const Gauss25&) const {
        std::normal_distribution<double> normal(0.0, 0.05);
        std::uniform_int_distribution<int> cell(0, 4);
        PointMatrix out(static_cast<Eigen::Index>(n), 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const int cx = cell(rng);
            const int cy = cell(rng);
            out(i, 0) = -4.0 + 2.0 * cx + normal(rng);
            out(i, 1) = -4.0 + 2.0 * cy + normal(rng);
        }
        return out;
    }

    PointMatrix operator()(const SwissRoll&) const {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, 0.1);
        PointMatrix out(static_cast<Eigen::Index>(n), 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * unit(rng));
            out(i, 0) = (t * std::cos(t) + noise(rng)) / 7.5;
            out(i, 1) = (t * std::sin(t) + noise(rng)) / 7.5;
        }
        return out;
    }

    PointMatrix operator()(const Circle&) const {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        std::normal_distribution<double> noise(0.0, 0.05);
        PointMatrix out(static_cast<Eigen::Index>(n), 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double a = angle(rng);
            const double r = 2.0 + noise(rng);
            out(i, 0) = r * std::cos(a);
            out(i, 1) = r * std::sin(a);
        }
        return out;
    }

    PointMatrix operator()(const UniformCube& f) const {
        if (f.dims < 1) throw InvalidInput("uniform_cube needs d >= 1");
        if (!(f.upper > f.lower)) throw InvalidInput("uniform_cube needs lower < upper");
        std::uniform_real_distribution<double> unit(f.lower, f.upper);
        PointMatrix out(static_cast<Eigen::Index>(n), f.dims);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = unit(rng);
        return out;
    }

    PointMatrix operator()(const Gaussian& f) const {
        const Eigen::Index d = f.mean.size();
        if (d < 1 || f.cov.rows() != d || f.cov.cols() != d) throw InvalidInput("gaussian parameters are inconsistent");
        const Eigen::MatrixXd root = psd_sqrt(f.cov);
        PointMatrix z = sample_standard_normal(n, static_cast<unsigned>(d), rng);
        PointMatrix out = z * root;  // root is symmetric
        out.rowwise() += f.mean.transpose();
        return out;
    }

    PointMatrix operator()(const FragmentedHypercube& f) const {
        if (f.dims < 1 || f.qstar > f.dims) throw InvalidInput("fragmented_hypercube needs 0 <= q* <= d");
        PointMatrix out = (*this)(UniformCube{f.dims, -1.0, 1.0});
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (unsigned c = 0; c < f.qstar; ++c) {
                const double v = out(i, c);
                out(i, c) = v + 2.0 * ((v > 0) - (v < 0));
            }
        return out;
    }
};

}  // namespace

PointMatrix sample_standard_normal(std::size_t n, unsigned d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    PointMatrix out(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = normal(rng);
    return out;
}

PointMatrix sample(const TargetFamily& family, std::size_t n, Rng& rng) {
    if (n < 1) throw InvalidInput("sample size must be >= 1");
    return std::visit(Sampler{n, rng}, family);
}

WeightedPointCloud generate(const SyntheticTarget& target) {
    Rng rng = substream(target.seed, 0);
    return WeightedPointCloud(sample(target.family, target.n, rng));
}

std::string family_name(const TargetFamily& family) {
    struct Namer {
        std::string operator()(const GmmOffset&) const { return "gmm_offset"; }
        std::string operator()(const Gauss25&) const { return "gauss25"; }
        std::string operator()(const SwissRoll&) const { return "swissroll"; }
        std::string operator()(const Circle&) const { return "circle"; }
        std::string operator()(const UniformCube&) const { return "uniform_cube"; }
        std::string operator()(const Gaussian&) const { return "gaussian"; }
        std::string operator()(const FragmentedHypercube&) const { return "fragmented_hypercube"; }
    };
    return std::visit(Namer{}, family);
}

}  // namespace hilbert_ot
