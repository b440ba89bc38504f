#include "hilbert_ot/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "hilbert_ot/baselines.hpp"
#include "hilbert_ot/error.hpp"
#include "hilbert_ot/flows.hpp"
#include "hilbert_ot/hcp.hpp"
#include "hilbert_ot/parallel.hpp"
#include "hilbert_ot/random.hpp"
#include "hilbert_ot/subspace.hpp"
#include "hilbert_ot/synthetic.hpp"

namespace hilbert_ot {

namespace {

using Clock = std::chrono::steady_clock;

/// Typed access to --set key=value overrides.
class Overrides {
public:
    explicit Overrides(const std::map<std::string, std::string>& values) : values_(values) {}

    double number(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return parse(key, it->second);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        const double v = number(key, static_cast<double>(fallback));
        if (v < 0 || v != std::floor(v)) throw ParameterError("override '" + key + "' must be a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::istringstream in(it->second);
        std::string item;
        while (std::getline(in, item, ',')) out.push_back(parse(key, item));
        if (out.empty()) throw ParameterError("override '" + key + "' is an empty list");
        return out;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    void reject_unknown(const std::string& experiment, const std::vector<std::string>& known) const {
        for (const auto& [key, value] : values_)
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw ParameterError("experiment '" + experiment + "' has no parameter '" + key + "'");
    }

private:
    static double parse(const std::string& key, const std::string& text) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw ParameterError("override '" + key + "' has non-numeric value '" + text + "'");
        }
    }

    const std::map<std::string, std::string>& values_;
};

struct Context {
    std::uint64_t seed;
    std::size_t replications;
    std::size_t threads;
};

/// Seed of task (parameter index, replication, stream) under the experiment seed.
std::uint64_t task_seed(std::uint64_t seed, std::size_t param, std::size_t rep, std::size_t stream = 0) {
    return splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(param) << 40) ^
                                        (static_cast<std::uint64_t>(rep) << 8) ^ stream));
}

ExperimentRow raw(const std::string& parameter, double pv, std::size_t rep, const std::string& metric, double v) {
    return {"raw", parameter, pv, static_cast<long>(rep), metric, v};
}

ExperimentRow fit(const std::string& metric, double v) { return {"fit", "", std::nan(""), -1, metric, v}; }

/// Runs task(p, r) over the parameter x replication grid in parallel and
/// concatenates the per-task rows in (p, r) order.
std::vector<ExperimentRow> grid(std::size_t params, const Context& ctx,
                                const std::function<std::vector<ExperimentRow>(std::size_t, std::size_t)>& task) {
    std::vector<std::vector<ExperimentRow>> slots(params * ctx.replications);
    parallel_for(slots.size(), ctx.threads, [&](std::size_t idx) {
        slots[idx] = task(idx / ctx.replications, idx % ctx.replications);
    });
    std::vector<ExperimentRow> rows;
    for (auto& s : slots)
        for (auto& r : s) rows.push_back(std::move(r));
    return rows;
}

/// Means of aggregated rows for `metric`, in parameter order.
std::vector<double> means_of(const std::vector<ExperimentRow>& rows, const std::string& metric) {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.row_type == "mean" && r.metric == metric) out.push_back(r.value);
    return out;
}

std::vector<double> default_range(double first, double last, double step) {
    std::vector<double> out;
    for (double v = first; v <= last + 1e-9; v += step) out.push_back(std::round(v * 1e9) / 1e9);
    return out;
}

// --- experiments -----------------------------------------------------------

std::vector<ExperimentRow> fig1_offset(Overrides& o, const Context& ctx) {
    const auto alphas = o.list("alphas", default_range(0.0, 1.0, 0.1));
    const std::size_t n = o.count("n", 500);
    const std::size_t projections = o.count("sw_projections", 50);

    auto rows = grid(alphas.size(), ctx, [&](std::size_t a, std::size_t r) {
        const auto x = generate({GmmOffset{0.0}, n, task_seed(ctx.seed, a, r, 0)});
        const auto y = generate({GmmOffset{alphas[a]}, n, task_seed(ctx.seed, a, r, 1)});
        std::vector<ExperimentRow> out;
        out.push_back(raw("alpha", alphas[a], r, "exact_w2", exact_wasserstein(x, y, 2.0).value));
        out.push_back(raw("alpha", alphas[a], r, "hcp", hcp_distance(x, y).value));
        out.push_back(raw("alpha", alphas[a], r, "sw",
                          sliced_wasserstein(x, y, {2.0, projections, task_seed(ctx.seed, a, r, 2), 1}).value));
        return out;
    });
    append_aggregates(rows);
    const auto exact = means_of(rows, "exact_w2");
    if (exact.size() >= 2)
        for (const char* m : {"hcp", "sw"})
            rows.push_back(fit(std::string("spearman_") + m, spearman(means_of(rows, m), exact)));
    return rows;
}

std::vector<ExperimentRow> highdim_theta(Overrides& o, const Context& ctx) {
    const auto thetas = o.list("thetas", default_range(3.0, 9.0, 1.0));
    const std::size_t n = o.count("n", 200);
    const auto d = static_cast<unsigned>(o.count("d", 50));
    const auto q = static_cast<unsigned>(o.count("q", 2));
    const std::size_t projections = o.count("projections", 50);
    const bool with_exact = o.number("exact", 1.0) != 0.0;
    if (d < 3) throw ParameterError("highdim_theta needs d >= 3");

    auto covariance = [d](double lead) {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d, d);
        cov(0, 0) = cov(1, 1) = lead;
        return cov;
    };
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);

    auto rows = grid(thetas.size(), ctx, [&](std::size_t t, std::size_t r) {
        const auto x = generate({Gaussian{zero, covariance(3.0)}, n, task_seed(ctx.seed, t, r, 0)});
        const auto y = generate({Gaussian{zero, covariance(thetas[t])}, n, task_seed(ctx.seed, t, r, 1)});
        std::vector<ExperimentRow> out;
        PrhcpParams pp;
        pp.subdims = q;
        out.push_back(raw("theta", thetas[t], r, "prhcp", prhcp(x, y, pp).value));
        IprhcpParams ip;
        ip.subdims = q;
        ip.projections = projections;
        ip.seed = task_seed(ctx.seed, t, r, 2);
        ip.threads = 1;
        out.push_back(raw("theta", thetas[t], r, "iprhcp", iprhcp(x, y, ip).value));
        out.push_back(raw("theta", thetas[t], r, "sw",
                          sliced_wasserstein(x, y, {2.0, projections, task_seed(ctx.seed, t, r, 3), 1}).value));
        out.push_back(raw("theta", thetas[t], r, "hcp", hcp_distance(x, y).value));
        if (with_exact) out.push_back(raw("theta", thetas[t], r, "exact_w2", exact_wasserstein(x, y, 2.0).value));
        return out;
    });
    append_aggregates(rows);
    std::vector<double> truth;
    for (double theta : thetas) {
        truth.push_back(gaussian_w2(zero, covariance(3.0), zero, covariance(theta)));
        rows.push_back({"reference", "theta", theta, -1, "gaussian_w2", truth.back()});
    }
    std::vector<std::string> metrics{"prhcp", "iprhcp", "sw", "hcp"};
    if (with_exact) metrics.push_back("exact_w2");
    if (truth.size() >= 2)
        for (const auto& m : metrics) rows.push_back(fit("spearman_" + m, spearman(means_of(rows, m), truth)));
    return rows;
}

std::vector<ExperimentRow> rate_curve(Overrides& o, const Context& ctx) {
    const auto sizes = o.list("sizes", {64, 128, 256, 512, 1024, 2048, 4096});
    const std::size_t reference = o.count("reference", 32768);
    const auto d = static_cast<unsigned>(o.count("d", 2));

    auto rows = grid(sizes.size(), ctx, [&](std::size_t s, std::size_t r) {
        const auto n = static_cast<std::size_t>(sizes[s]);
        const auto x = generate({UniformCube{d}, n, task_seed(ctx.seed, s, r, 0)});
        const auto y = generate({UniformCube{d}, reference, task_seed(ctx.seed, s, r, 1)});
        return std::vector<ExperimentRow>{raw("n", sizes[s], r, "hcp", hcp_distance(x, y).value)};
    });
    append_aggregates(rows);
    if (sizes.size() >= 2) rows.push_back(fit("slope_hcp", loglog_slope(sizes, means_of(rows, "hcp"))));
    return rows;
}

std::vector<ExperimentRow> k_sensitivity(Overrides& o, const Context& ctx) {
    const auto orders = o.list("orders", {4, 6, 8, 10, 12});
    const auto compare = o.list("compare", {6, 8, 10});
    const std::size_t n = o.count("n", 1000);
    const auto d = static_cast<unsigned>(o.count("d", 2));

    // One pair of clouds per replication, shared by every order.
    std::vector<std::vector<ExperimentRow>> slots(ctx.replications);
    parallel_for(ctx.replications, ctx.threads, [&](std::size_t r) {
        const auto x = generate({UniformCube{d}, n, task_seed(ctx.seed, 0, r, 0)});
        const auto y = generate({UniformCube{d}, n, task_seed(ctx.seed, 0, r, 1)});
        for (double k : orders) {
            HcpParams hp;
            hp.order = static_cast<unsigned>(k);
            slots[r].push_back(raw("k", k, r, "hcp", hcp_distance(x, y, hp).value));
        }
    });
    std::vector<ExperimentRow> rows;
    for (std::size_t k = 0; k < orders.size(); ++k)
        for (std::size_t r = 0; r < ctx.replications; ++r) rows.push_back(slots[r][k]);
    append_aggregates(rows);

    double worst = 0.0;
    for (double a : compare)
        for (double b : compare) {
            const double va = ExperimentResult{"", rows, {}}.find("mean", "hcp", a);
            const double vb = ExperimentResult{"", rows, {}}.find("mean", "hcp", b);
            worst = std::max(worst, std::abs(va - vb) / std::min(va, vb));
        }
    rows.push_back(fit("max_pairwise_rel_diff", worst));
    return rows;
}

std::vector<ExperimentRow> subspace_recovery(Overrides& o, const Context& ctx) {
    const auto qs = o.list("qs", {1, 2, 3, 4, 5});
    const auto d = static_cast<unsigned>(o.count("d", 30));
    const auto qstar = static_cast<unsigned>(o.count("qstar", 2));
    const std::size_t n = o.count("n", 250);
    const std::size_t max_iters = o.count("max_iters", 30);

    // The same source/target pair feeds every q within a replication.
    std::vector<std::vector<ExperimentRow>> slots(ctx.replications);
    parallel_for(ctx.replications, ctx.threads, [&](std::size_t r) {
        const auto x = generate({UniformCube{d, -1.0, 1.0}, n, task_seed(ctx.seed, 0, r, 0)});
        const auto y = generate({FragmentedHypercube{d, qstar}, n, task_seed(ctx.seed, 0, r, 1)});
        for (double q : qs) {
            PrhcpParams pp;
            pp.subdims = static_cast<unsigned>(q);
            pp.max_iters = max_iters;
            slots[r].push_back(raw("q", q, r, "prhcp", prhcp(x, y, pp).value));
        }
    });
    std::vector<ExperimentRow> rows;
    for (std::size_t i = 0; i < qs.size(); ++i)
        for (std::size_t r = 0; r < ctx.replications; ++r) rows.push_back(slots[r][i]);
    append_aggregates(rows);

    const ExperimentResult view{"", rows, {}};
    const double q0 = static_cast<double>(qstar);
    if (std::count(qs.begin(), qs.end(), q0 - 1) && std::count(qs.begin(), qs.end(), q0) &&
        std::count(qs.begin(), qs.end(), q0 + 1)) {
        const double rise = view.find("mean", "prhcp", q0) - view.find("mean", "prhcp", q0 - 1);
        const double after = view.find("mean", "prhcp", q0 + 1) - view.find("mean", "prhcp", q0);
        rows.push_back(fit("gain_before_qstar", rise));
        rows.push_back(fit("gain_after_qstar", after));
        rows.push_back(fit("elbow_holds", rise >= 3.0 * after ? 1.0 : 0.0));
    }
    return rows;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<ExperimentRow> runtime_scaling(Overrides& o, const Context& ctx) {
    const auto sizes = o.list("sizes", {10000, 20000, 40000, 80000});
    const auto d = static_cast<unsigned>(o.count("d", 4));
    const auto k = static_cast<unsigned>(o.count("k", 16));
    const std::size_t runs = ctx.replications;
    const bool baselines = o.number("baselines", 1.0) != 0.0;
    const std::size_t projections = o.count("sw_projections", 50);

    // Timings run sequentially on the calling thread.
    std::vector<ExperimentRow> rows;
    std::vector<double> hcp_median;
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const auto n = static_cast<std::size_t>(sizes[s]);
        const auto x = generate({UniformCube{d}, n, task_seed(ctx.seed, s, 0, 0)});
        const auto y = generate({UniformCube{d}, n, task_seed(ctx.seed, s, 0, 1)});

        auto time_metric = [&](const std::string& metric, const std::function<void()>& call) {
            call();  // warm-up
            std::vector<double> t;
            for (std::size_t r = 0; r < runs; ++r) {
                const auto start = Clock::now();
                call();
                t.push_back(std::chrono::duration<double>(Clock::now() - start).count());
                rows.push_back(raw("n", sizes[s], r, metric + "_seconds", t.back()));
            }
            rows.push_back({"median", "n", sizes[s], -1, metric + "_seconds", median(t)});
            return median(t);
        };

        HcpParams hp;
        hp.order = k;
        hcp_median.push_back(time_metric("hcp", [&] { (void)hcp_distance(x, y, hp); }));
        if (baselines) {
            time_metric("sw", [&] { (void)sliced_wasserstein(x, y, {2.0, projections, ctx.seed, 1}); });
            IprhcpParams ip;
            ip.projections = 10;
            ip.seed = ctx.seed;
            ip.threads = 1;
            time_metric("iprhcp", [&] { (void)iprhcp(x, y, ip); });
            PrhcpParams pp;
            pp.max_iters = 10;
            time_metric("prhcp", [&] { (void)prhcp(x, y, pp); });
        }
    }
    std::vector<double> ratios;
    for (std::size_t s = 0; s + 1 < sizes.size(); ++s) {
        if (sizes[s + 1] != 2 * sizes[s]) continue;
        ratios.push_back(hcp_median[s + 1] / hcp_median[s]);
        rows.push_back({"fit", "n", sizes[s], -1, "hcp_time_ratio_2n_over_n", ratios.back()});
    }
    if (!ratios.empty()) rows.push_back(fit("median_hcp_time_ratio", median(ratios)));
    return rows;
}

std::vector<ExperimentRow> flow_experiment(Overrides& o, const Context& ctx) {
    FlowConfig base;
    base.particles = o.count("particles", 500);
    base.target_size = o.count("target_size", base.particles);
    base.iters = o.count("iters", 150);
    base.lr = o.number("lr", 0.01);
    base.log_every = o.count("log_every", 10);
    const std::string target = o.text("target", "gauss25");

    std::vector<std::vector<ExperimentRow>> slots(ctx.replications * 2);
    parallel_for(slots.size(), ctx.threads, [&](std::size_t idx) {
        const std::size_t r = idx / 2;
        FlowConfig cfg = base;
        cfg.metric = idx % 2 == 0 ? FlowMetric::Hcp : FlowMetric::Sliced;
        cfg.seed = task_seed(ctx.seed, 0, r, 0);
        const std::string prefix = idx % 2 == 0 ? "hcp_flow" : "sw_flow";
        const FlowTrajectory traj = run_flow(cfg, target);
        for (const auto& s : traj.snapshots) {
            const double it = static_cast<double>(s.iter);
            slots[idx].push_back(raw("iter", it, r, prefix + "_loss", s.loss));
            if (s.exact_w2) slots[idx].push_back(raw("iter", it, r, prefix + "_w2", *s.exact_w2));
        }
    });
    // Order rows by (iteration, metric, replication) so aggregates group naturally.
    std::vector<ExperimentRow> rows;
    for (auto& s : slots)
        for (auto& r : s) rows.push_back(std::move(r));
    std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
        if (a.param_value != b.param_value) return a.param_value < b.param_value;
        if (a.metric != b.metric) return a.metric < b.metric;
        return a.replication < b.replication;
    });
    append_aggregates(rows);
    return rows;
}

struct Entry {
    const char* name;
    std::size_t default_replications;
    std::vector<ExperimentRow> (*run)(Overrides&, const Context&);
    std::vector<std::string> keys;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {"fig1_offset", 5, fig1_offset, {"alphas", "n", "sw_projections"}},
        {"highdim_theta", 50, highdim_theta, {"thetas", "n", "d", "q", "projections", "exact"}},
        {"rate_curve", 30, rate_curve, {"sizes", "reference", "d"}},
        {"k_sensitivity", 20, k_sensitivity, {"orders", "compare", "n", "d"}},
        {"subspace_recovery", 20, subspace_recovery, {"qs", "d", "qstar", "n", "max_iters"}},
        {"runtime_scaling", 5, runtime_scaling, {"sizes", "d", "k", "baselines", "sw_projections"}},
        {"flow", 5, flow_experiment, {"particles", "target_size", "iters", "lr", "log_every", "target"}},
    };
    return entries;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

void write_gnuplot(const std::filesystem::path& path, const ExperimentResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    std::vector<std::string> metrics;
    std::string parameter;
    for (const auto& r : result.rows) {
        if (r.row_type != "mean" && r.row_type != "median") continue;
        parameter = r.parameter;
        if (std::find(metrics.begin(), metrics.end(), r.metric) == metrics.end()) metrics.push_back(r.metric);
    }
    out << "# gnuplot -persist " << path.filename().string() << "\n";
    out << "set datafile separator ','\n";
    out << "set key outside\n";
    out << "set xlabel '" << parameter << "'\n";
    out << "set ylabel 'value'\n";
    const std::string csv = result.csv_path.filename().string();
    out << "plot ";
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (i) out << ", \\\n     ";
        out << "'" << csv << "' using ((strcol(2) eq 'mean' || strcol(2) eq 'median') && strcol(6) eq '" << metrics[i]
            << "' ? $4 : 1/0):7 with linespoints title '" << metrics[i] << "'";
    }
    out << "\n";
}

}  // namespace

double ExperimentResult::find(const std::string& row_type, const std::string& metric, double param_value) const {
    for (const auto& r : rows) {
        if (r.row_type != row_type || r.metric != metric) continue;
        if (!std::isnan(param_value) && r.param_value != param_value) continue;
        return r.value;
    }
    throw InvalidInput("no '" + row_type + "' row for metric '" + metric + "'");
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& e : registry()) out.emplace_back(e.name);
        return out;
    }();
    return names;
}

void append_aggregates(std::vector<ExperimentRow>& rows) {
    struct Group {
        std::string parameter;
        double param_value;
        std::string metric;
        std::vector<double> values;
    };
    std::vector<Group> groups;
    for (const auto& r : rows) {
        if (r.row_type != "raw") continue;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
            return g.metric == r.metric && g.parameter == r.parameter &&
                   (g.param_value == r.param_value || (std::isnan(g.param_value) && std::isnan(r.param_value)));
        });
        if (it == groups.end()) {
            groups.push_back({r.parameter, r.param_value, r.metric, {}});
            it = std::prev(groups.end());
        }
        it->values.push_back(r.value);
    }
    for (const auto& g : groups) {
        double sum = 0.0;
        for (double v : g.values) sum += v;
        const double mean = sum / static_cast<double>(g.values.size());
        double ss = 0.0;
        for (double v : g.values) ss += (v - mean) * (v - mean);
        const double sd = g.values.size() > 1 ? std::sqrt(ss / static_cast<double>(g.values.size() - 1)) : 0.0;
        rows.push_back({"mean", g.parameter, g.param_value, -1, g.metric, mean});
        rows.push_back({"std", g.parameter, g.param_value, -1, g.metric, sd});
    }
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidInput("spearman needs two equal-length samples of size >= 2");
    auto ranks = [](std::span<const double> v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t s = 0; s < idx.size();) {
            std::size_t e = s;
            while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
            const double avg = 0.5 * static_cast<double>(s + e) + 1.0;
            for (std::size_t t = s; t <= e; ++t) r[idx[t]] = avg;
            s = e + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0 || sbb == 0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs two equal-length samples of size >= 2");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw InvalidInput("log-log fit needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]) - mx;
        sxy += lx * (std::log(y[i]) - my);
        sxx += lx * lx;
    }
    return sxy / sxx;
}

void write_experiment_csv(const std::filesystem::path& path, const ExperimentResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write experiment output '" + path.string() + "'");
    out << kExperimentCsvHeader << '\n';
    for (const auto& r : result.rows) {
        out << result.name << ',' << r.row_type << ',' << r.parameter << ',' << csv_number(r.param_value) << ','
            << (r.replication >= 0 ? std::to_string(r.replication) : std::string{}) << ',' << r.metric << ','
            << csv_number(r.value) << '\n';
    }
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    const auto& entries = registry();
    const auto entry = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return spec.name == e.name; });
    if (entry == entries.end()) throw ParameterError("unknown experiment '" + spec.name + "'");

    const Context ctx{spec.seed, spec.replications != 0 ? spec.replications : entry->default_replications, spec.threads};
    Overrides overrides(spec.overrides);
    overrides.reject_unknown(spec.name, entry->keys);
    ExperimentResult result;
    result.name = spec.name;
    result.rows = entry->run(overrides, ctx);

    if (!spec.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(spec.out_dir, ec);
        if (ec) throw IoError("cannot create output directory '" + spec.out_dir.string() + "': " + ec.message());
        result.csv_path = spec.out_dir / (spec.name + ".csv");
        write_experiment_csv(result.csv_path, result);
        if (spec.gnuplot_script) write_gnuplot(spec.out_dir / (spec.name + ".gp"), result);
    }
    return result;
}

}  // namespace hilbert_ot
