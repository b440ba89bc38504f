#include "hilbert_ot/hcp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hilbert_ot/error.hpp"
#include "hilbert_ot/ot1d.hpp"

namespace hilbert_ot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

unsigned resolve_order(const HcpParams& params, std::size_t m, std::size_t n, unsigned dims) {
    return params.order != 0 ? params.order : default_order(m, n, dims);
}

std::pair<BoundingBox, BoundingBox> domain_boxes(const DomainMode& mode, const PointMatrix& x, const PointMatrix& y) {
    const auto d = static_cast<unsigned>(x.cols());
    if (std::holds_alternative<PerCloud>(mode)) return {bounding_box(x), bounding_box(y)};

    BoundingBox box = std::holds_alternative<Shared>(mode) ? std::get<Shared>(mode).box : BoundingBox::unit_cube(d);
    if (box.dim() != d) throw InvalidInput("shared box dimension does not match the point clouds");
    for (const PointMatrix* cloud : {&x, &y}) {
        for (Eigen::Index i = 0; i < cloud->rows(); ++i) {
            std::span<const double> pt(cloud->data() + i * d, d);
            if (!box.contains(pt)) throw InvalidInput("a point lies outside the shared domain box");
        }
    }
    return {box, box};
}

SortedWeightedLine line_of(const PointMatrix& points, const Eigen::VectorXd& weights) {
    return SortedWeightedLine::from_unsorted(std::span<const double>(points.data(), static_cast<std::size_t>(points.rows())),
                                             std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size())));
}

void check_pair(const PointMatrix& x, const PointMatrix& y) {
    if (x.cols() != y.cols())
        throw InvalidInput("dimension mismatch: " + std::to_string(x.cols()) + " vs " + std::to_string(y.cols()));
}

}  // namespace

void HcpParams::validate(unsigned dims) const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("cost order p must be a finite number >= 1");
    if (dims >= 2 && order != 0) CurveParams{dims, order}.validate();
}

std::string domain_name(const DomainMode& mode) {
    if (std::holds_alternative<PerCloud>(mode)) return "percloud";
    if (std::holds_alternative<Shared>(mode)) return "shared";
    return "unitcube";
}

std::vector<HilbertKey> hilbert_keys(const PointMatrix& points, const BoundingBox& box, unsigned order) {
    const auto d = static_cast<std::size_t>(points.cols());
    CurveParams{static_cast<unsigned>(d), order}.validate();
    std::vector<HilbertKey> keys(static_cast<std::size_t>(points.rows()));
    std::vector<std::uint64_t> cell(d);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        quantize_into(std::span<const double>(points.data() + i * d, d), box, order, cell);
        keys[i] = encode_in_place(cell, order);
    }
    return keys;
}

std::vector<std::size_t> hilbert_order(const PointMatrix& points, const BoundingBox& box, unsigned order) {
    const std::vector<HilbertKey> keys = hilbert_keys(points, box, order);
    std::vector<std::size_t> idx(keys.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // (key, index) pairs are distinct, so an unstable sort is deterministic.
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return keys[i] != keys[j] ? keys[i] < keys[j] : i < j;
    });
    return idx;
}

SparseCoupling hcp_coupling(const WeightedPointCloud& x, const WeightedPointCloud& y, const HcpParams& params) {
    check_pair(x.points(), y.points());
    const unsigned d = x.dim();
    params.validate(d);
    if (d == 1) return quantile_coupling(line_of(x.points(), x.weights()), line_of(y.points(), y.weights()));

    const unsigned order = resolve_order(params, x.size(), y.size(), d);
    CurveParams{d, order}.validate();
    const auto [box_x, box_y] = domain_boxes(params.domain, x.points(), y.points());
    const std::vector<std::size_t> ox = hilbert_order(x.points(), box_x, order);
    const std::vector<std::size_t> oy = hilbert_order(y.points(), box_y, order);

    std::vector<double> a(ox.size());
    std::vector<double> b(oy.size());
    for (std::size_t s = 0; s < ox.size(); ++s) a[s] = x.weights()[static_cast<Eigen::Index>(ox[s])];
    for (std::size_t s = 0; s < oy.size(); ++s) b[s] = y.weights()[static_cast<Eigen::Index>(oy[s])];

    SparseCoupling plan = northwest_coupling_unchecked(a, b);
    for (auto& e : plan.entries) {
        e.source = ox[e.source];
        e.target = oy[e.target];
    }
    return plan;
}

DistanceReport hcp_distance(const WeightedPointCloud& x, const WeightedPointCloud& y, const HcpParams& params) {
    const auto start = Clock::now();
    DistanceReport report;
    report.metric = "hcp";
    report.coupling = hcp_coupling(x, y, params);
    report.value = std::pow(coupling_cost(*report.coupling, x.points(), y.points(), params.p), 1.0 / params.p);
    report.params = {{"p", format_double(params.p)},
                     {"k", std::to_string(x.dim() >= 2 ? resolve_order(params, x.size(), y.size(), x.dim()) : 0)},
                     {"domain", domain_name(params.domain)},
                     {"m", std::to_string(x.size())},
                     {"n", std::to_string(y.size())},
                     {"d", std::to_string(x.dim())}};
    report.elapsed_seconds = seconds_since(start);
    return report;
}

DistanceReport hcp_matched(const PointMatrix& x, const PointMatrix& y, const HcpParams& params) {
    const auto start = Clock::now();
    check_pair(x, y);
    if (x.rows() != y.rows())
        throw InvalidInput("matched HCP needs equal sizes, got " + std::to_string(x.rows()) + " and " +
                           std::to_string(y.rows()));
    if (x.rows() == 0) throw InvalidInput("empty point cloud");
    const auto d = static_cast<unsigned>(x.cols());
    params.validate(d);
    const auto n = static_cast<std::size_t>(x.rows());

    std::vector<std::size_t> ox;
    std::vector<std::size_t> oy;
    unsigned order = 0;
    if (d == 1) {
        const Eigen::VectorXd w = Eigen::VectorXd::Constant(x.rows(), 1.0 / static_cast<double>(n));
        ox = line_of(x, w).provenance;
        oy = line_of(y, w).provenance;
    } else {
        order = resolve_order(params, n, n, d);
        CurveParams{d, order}.validate();
        const auto [box_x, box_y] = domain_boxes(params.domain, x, y);
        ox = hilbert_order(x, box_x, order);
        oy = hilbert_order(y, box_y, order);
    }

    const double mass = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        std::span<const double> xi(x.data() + ox[s] * d, d);
        std::span<const double> yj(y.data() + oy[s] * d, d);
        total += mass * pth_power_distance(xi, yj, params.p);
    }

    DistanceReport report;
    report.metric = "hcp";
    report.value = std::pow(total, 1.0 / params.p);
    report.params = {{"p", format_double(params.p)}, {"k", std::to_string(order)},
                     {"domain", domain_name(params.domain)}, {"m", std::to_string(n)},
                     {"n", std::to_string(n)}, {"d", std::to_string(d)}};
    report.elapsed_seconds = seconds_since(start);
    return report;
}

}  // namespace hilbert_ot
