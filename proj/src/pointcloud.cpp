#include "hilbert_ot/pointcloud.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hilbert_ot/error.hpp"

namespace hilbert_ot {

WeightedPointCloud::WeightedPointCloud(PointMatrix points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.rows() < 1) throw InvalidInput("point cloud must contain at least one point");
    if (points_.cols() < 1) throw InvalidInput("point cloud must have dimension >= 1");
    if (weights_.size() != points_.rows())
        throw InvalidInput("weight vector has " + std::to_string(weights_.size()) + " entries for " +
                           std::to_string(points_.rows()) + " points");
    if (!points_.allFinite()) throw InvalidInput("point cloud contains NaN or infinite coordinates");
    if (!weights_.allFinite()) throw InvalidInput("weights contain NaN or infinite values");
    if ((weights_.array() < 0.0).any()) throw InvalidInput("weights must be non-negative");
    const double total = weights_.sum();
    if (std::abs(total - 1.0) > kWeightTolerance)
        throw InvalidInput("weights sum to " + std::to_string(total) + ", expected 1");
    weights_ /= total;
    const double first = weights_[0];
    uniform_ = (weights_.array() == first).all();
}

WeightedPointCloud::WeightedPointCloud(PointMatrix points)
    : WeightedPointCloud(points, Eigen::VectorXd::Constant(std::max<Eigen::Index>(points.rows(), 1),
                                                            1.0 / static_cast<double>(std::max<Eigen::Index>(points.rows(), 1)))) {}

bool BoundingBox::contains(std::span<const double> x, double slack) const {
    for (unsigned i = 0; i < dim(); ++i) {
        const double scale = std::max({1.0, std::abs(lower[i]), std::abs(upper[i])});
        if (x[i] < lower[i] - slack * scale || x[i] > upper[i] + slack * scale) return false;
    }
    return true;
}

BoundingBox BoundingBox::inflated(double fraction) const {
    BoundingBox out = *this;
    for (unsigned i = 0; i < dim(); ++i) {
        const double extent = upper[i] - lower[i];
        const double pad = extent > 0 ? fraction * extent : fraction;
        out.lower[i] -= pad;
        out.upper[i] += pad;
    }
    return out;
}

BoundingBox BoundingBox::unit_cube(unsigned d) {
    return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
}

BoundingBox BoundingBox::merge(const BoundingBox& a, const BoundingBox& b) {
    if (a.dim() != b.dim()) throw InvalidInput("cannot merge boxes of different dimension");
    return {a.lower.cwiseMin(b.lower), a.upper.cwiseMax(b.upper)};
}

BoundingBox bounding_box(const PointMatrix& points) {
    if (points.rows() == 0) throw InvalidInput("bounding box of an empty point set");
    return {points.colwise().minCoeff().transpose(), points.colwise().maxCoeff().transpose()};
}

BoundingBox bounding_box(const WeightedPointCloud& cloud) { return bounding_box(cloud.points()); }

void quantize_into(std::span<const double> point, const BoundingBox& box, unsigned order,
                   std::span<std::uint64_t> cell) {
    const double side = std::ldexp(1.0, static_cast<int>(order));
    const std::uint64_t last = (std::uint64_t{1} << order) - 1;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        const double extent = box.upper[i] - box.lower[i];
        if (!(extent > 0)) {
            cell[i] = 0;
            continue;
        }
        const double u = std::floor((point[i] - box.lower[i]) / extent * side);
        if (u <= 0) {
            cell[i] = 0;
        } else if (u >= static_cast<double>(last)) {
            cell[i] = last;
        } else {
            cell[i] = static_cast<std::uint64_t>(u);
        }
    }
}

GridCell quantize(std::span<const double> point, const BoundingBox& box, unsigned order) {
    if (point.size() != box.dim())
        throw InvalidInput("point dimension " + std::to_string(point.size()) + " does not match box dimension " +
                           std::to_string(box.dim()));
    if (order < 1 || order > 63) throw ParameterError("curve order must lie in [1, 63]");
    if (!box.contains(point)) throw InvalidInput("point lies outside the bounding box");
    GridCell cell{std::vector<std::uint64_t>(point.size())};
    quantize_into(point, box, order, cell.coords);
    return cell;
}

unsigned default_order(std::size_t m, std::size_t n, unsigned dims) {
    const std::size_t largest = std::max<std::size_t>({m, n, 1});
    unsigned k = 0;
    while ((std::size_t{1} << k) < largest && k < 63) ++k;
    k = std::max(k, 2u);
    const unsigned cap = std::min(63u, CurveParams::kMaxKeyBits / std::max(dims, 1u));
    return std::max(1u, std::min(k, cap));
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

WeightedPointCloud read_point_cloud_csv(const std::filesystem::path& path, bool weighted) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open point cloud file '" + path.string() + "'");

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_row(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_double(fields[i], row[i]);
        if (!numeric) {
            if (rows.empty() && width == 0) {
                width = fields.size();
                if (!fields.empty() && fields.back() == "weight") weighted = true;
                continue;
            }
            throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                               " columns, found " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInput("point cloud file '" + path.string() + "' contains no points");

    const std::size_t d = weighted ? width - 1 : width;
    if (d < 1) throw InvalidInput("point cloud file '" + path.string() + "' has no coordinate columns");
    PointMatrix points(rows.size(), d);
    Eigen::VectorXd weights(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) points(i, j) = rows[i][j];
        weights[i] = weighted ? rows[i][d] : 1.0 / static_cast<double>(rows.size());
    }
    try {
        return WeightedPointCloud(std::move(points), std::move(weights));
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void write_point_cloud_csv(const std::filesystem::path& path, const PointMatrix& points,
                           const Eigen::VectorXd* weights) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write point cloud file '" + path.string() + "'");
    out.precision(17);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            if (j) out << ',';
            out << points(i, j);
        }
        if (weights) out << ',' << (*weights)[i];
        out << '\n';
    }
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace hilbert_ot
