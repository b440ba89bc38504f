#include "hilbert_ot/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hilbert_ot/error.hpp"

namespace hilbert_ot {

double SparseCoupling::marginal_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(a.size());
    Eigen::VectorXd col = Eigen::VectorXd::Zero(b.size());
    for (const auto& e : entries) {
        if (e.source >= static_cast<std::size_t>(a.size()) || e.target >= static_cast<std::size_t>(b.size()))
            return std::numeric_limits<double>::infinity();
        row[static_cast<Eigen::Index>(e.source)] += e.mass;
        col[static_cast<Eigen::Index>(e.target)] += e.mass;
    }
    return std::max((row - a).cwiseAbs().maxCoeff(), (col - b).cwiseAbs().maxCoeff());
}

SparseCoupling SparseCoupling::transposed() const {
    SparseCoupling t;
    t.entries.reserve(entries.size());
    for (const auto& e : entries) t.entries.push_back({e.target, e.source, e.mass});
    return t;
}

double SparseCoupling::total_mass() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.mass;
    return s;
}

double coupling_cost(const SparseCoupling& coupling, const PointMatrix& x, const PointMatrix& y, double p) {
    const auto d = static_cast<std::size_t>(x.cols());
    double total = 0.0;
    for (const auto& e : coupling.entries) {
        std::span<const double> xi(x.data() + e.source * d, d);
        std::span<const double> yj(y.data() + e.target * d, d);
        total += e.mass * pth_power_distance(xi, yj, p);
    }
    return total;
}

void write_coupling_csv(const std::filesystem::path& path, const SparseCoupling& coupling) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write coupling file '" + path.string() + "'");
    out.precision(17);
    out << "source,target,mass\n";
    for (const auto& e : coupling.entries) out << e.source << ',' << e.target << ',' << e.mass << '\n';
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

SortedWeightedLine SortedWeightedLine::from_unsorted(std::span<const double> values,
                                                     std::span<const double> weights) {
    if (values.size() != weights.size()) throw InvalidInput("values and weights differ in length");
    SortedWeightedLine line;
    line.provenance.resize(values.size());
    std::iota(line.provenance.begin(), line.provenance.end(), std::size_t{0});
    std::stable_sort(line.provenance.begin(), line.provenance.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    line.values.reserve(values.size());
    line.weights.reserve(values.size());
    for (std::size_t s : line.provenance) {
        line.values.push_back(values[s]);
        line.weights.push_back(weights[s]);
    }
    return line;
}

namespace {

void check_simplex(std::span<const double> w, const char* name) {
    if (w.empty()) throw InvalidInput(std::string(name) + " weight vector is empty");
    double total = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0) throw InvalidInput(std::string(name) + " weights must be finite and >= 0");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidInput(std::string(name) + " weights sum to " + std::to_string(total) + ", expected 1");
}

}  // namespace

SparseCoupling northwest_coupling_unchecked(std::span<const double> a, std::span<const double> b) {
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    SparseCoupling plan;
    plan.entries.reserve(m + n - 1);

    auto emit = [&](std::size_t i, std::size_t j, double mass) {
        if (mass > 0) plan.entries.push_back({i, j, mass});
    };

    std::size_t i = 0;
    std::size_t j = 0;
    double ra = a[0];
    double rb = b[0];
    while (i < m && j < n) {
        const bool last_a = i + 1 == m;
        const bool last_b = j + 1 == n;
        if (last_a && last_b) {
            // Terminal residuals differ by round-off only; split the difference
            // so the plan stays symmetric under swapping the two sides.
            emit(i, j, ra == rb ? ra : 0.5 * (ra + rb));
            break;
        }
        if (last_a) {
            emit(i, j, rb);
            ra -= rb;
            rb = b[++j];
            continue;
        }
        if (last_b) {
            emit(i, j, ra);
            rb -= ra;
            ra = a[++i];
            continue;
        }
        if (std::abs(ra - rb) <= kResidualTie) {
            emit(i, j, std::min(ra, rb));
            ra = a[++i];
            rb = b[++j];
        } else if (ra < rb) {
            emit(i, j, ra);
            rb -= ra;
            ra = a[++i];
        } else {
            emit(i, j, rb);
            ra -= rb;
            rb = b[++j];
        }
    }
    return plan;
}

SparseCoupling northwest_coupling(std::span<const double> a, std::span<const double> b) {
    check_simplex(a, "source");
    check_simplex(b, "target");
    return northwest_coupling_unchecked(a, b);
}

SparseCoupling quantile_coupling(const SortedWeightedLine& x, const SortedWeightedLine& y) {
    SparseCoupling plan = northwest_coupling_unchecked(x.weights, y.weights);
    for (auto& e : plan.entries) {
        e.source = x.provenance[e.source];
        e.target = y.provenance[e.target];
    }
    return plan;
}

double wasserstein_1d(const SortedWeightedLine& x, const SortedWeightedLine& y, double p) {
    if (!(p >= 1.0)) throw ParameterError("Wasserstein order p must be >= 1");
    if (x.size() == 0 || y.size() == 0) throw InvalidInput("empty line measure");
    check_simplex(x.weights, "source");
    check_simplex(y.weights, "target");
    const SparseCoupling plan = northwest_coupling_unchecked(x.weights, y.weights);
    double total = 0.0;
    for (const auto& e : plan.entries) {
        const double gap = std::abs(x.values[e.source] - y.values[e.target]);
        total += e.mass * (p == 2.0 ? gap * gap : p == 1.0 ? gap : std::pow(gap, p));
    }
    return std::pow(total, 1.0 / p);
}

}  // namespace hilbert_ot
