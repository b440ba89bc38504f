// hilbert-ot: command-line front end for the distance library, particle
// flows, experiment runners and the benchmark harness.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hilbert_ot/baselines.hpp"
#include "hilbert_ot/error.hpp"
#include "hilbert_ot/experiments.hpp"
#include "hilbert_ot/flows.hpp"
#include "hilbert_ot/hcp.hpp"
#include "hilbert_ot/parallel.hpp"
#include "hilbert_ot/subspace.hpp"
#include "hilbert_ot/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hilbert_ot;

namespace {

enum ExitCode : int { kOk = 0, kInvalidInput = 2, kParameterError = 3, kIoError = 4 };

std::uint64_t default_seed() {
    const char* env = std::getenv("HILBERT_OT_SEED");
    if (env == nullptr || *env == '\0') return 0;
    std::string text(env);
    std::size_t pos = 0;
    try {
        const auto v = std::stoull(text, &pos);
        if (pos == text.size() && text.find('-') == std::string::npos) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("HILBERT_OT_SEED must be a non-negative integer, got '" + text + "'");
}

struct DistOptions {
    std::string metric;
    std::string x, y;
    double p = 2.0;
    unsigned order = 0;
    unsigned subdim = 2;
    std::size_t projections = 64;
    std::optional<std::uint64_t> seed;
    std::string domain = "percloud";
    std::string coupling_out;
    bool json = false;
    bool weighted = false;
};

struct FlowOptions {
    std::string metric;
    std::string target;
    std::size_t particles = 500;
    double lr = 0.01;
    std::size_t iters = 150;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct ExperimentOptions {
    std::string name;
    std::optional<std::uint64_t> seed;
    std::size_t replications = 0;
    std::string out;
    std::size_t threads = 0;
    std::vector<std::string> sets;
    bool gnuplot = false;
};

struct BenchOptions {
    std::string sizes;
    unsigned dim = 2;
    std::optional<std::uint64_t> seed;
    std::string out;
};

json report_json(const DistanceReport& r) {
    json j;
    j["metric"] = r.metric;
    j["value"] = r.value;
    json params = json::object();
    for (const auto& [k, v] : r.params) params[k] = v;
    j["params"] = params;
    j["elapsed_seconds"] = r.elapsed_seconds;
    if (r.projection_stddev) j["projection_stddev"] = *r.projection_stddev;
    if (r.converged) j["converged"] = *r.converged;
    if (r.iterations) j["iterations"] = *r.iterations;
    if (r.subspace) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < r.subspace->rows(); ++i) {
            json row = json::array();
            for (Eigen::Index c = 0; c < r.subspace->cols(); ++c) row.push_back((*r.subspace)(i, c));
            rows.push_back(row);
        }
        j["subspace"] = rows;
    }
    if (r.coupling) {
        json entries = json::array();
        for (const auto& e : r.coupling->entries) entries.push_back({e.source, e.target, e.mass});
        j["coupling"] = entries;
    }
    return j;
}

DomainMode parse_domain(const std::string& name, const WeightedPointCloud& x, const WeightedPointCloud& y) {
    if (name == "percloud") return PerCloud{};
    if (name == "unitcube") return UnitCube{};
    return Shared{BoundingBox::merge(bounding_box(x), bounding_box(y))};
}

int run_dist(const DistOptions& o) {
    const auto x = read_point_cloud_csv(o.x, o.weighted);
    const auto y = read_point_cloud_csv(o.y, o.weighted);
    if (x.dim() != y.dim())
        throw InvalidInput("dimension mismatch: '" + o.x + "' has " + std::to_string(x.dim()) + " columns, '" + o.y +
                           "' has " + std::to_string(y.dim()));
    const std::uint64_t seed = o.seed.value_or(default_seed());
    if (o.domain != "percloud" && o.metric != "hcp")
        throw ParameterError("--domain applies to --metric hcp only");

    DistanceReport report;
    if (o.metric == "hcp") {
        HcpParams params;
        params.p = o.p;
        params.order = o.order;
        params.domain = parse_domain(o.domain, x, y);
        report = hcp_distance(x, y, params);
    } else if (o.metric == "iprhcp") {
        IprhcpParams params;
        params.p = o.p;
        params.subdims = o.subdim;
        params.projections = o.projections;
        params.seed = seed;
        params.order = o.order;
        report = iprhcp(x, y, params);
    } else if (o.metric == "prhcp") {
        PrhcpParams params;
        params.p = o.p;
        params.subdims = o.subdim;
        params.order = o.order;
        report = prhcp(x, y, params);
    } else if (o.metric == "sw") {
        report = sliced_wasserstein(x, y, {o.p, o.projections, seed, 0});
    } else {
        report = exact_wasserstein(x, y, o.p);
    }

    if (!o.coupling_out.empty()) {
        if (!report.coupling) throw ParameterError("--metric " + o.metric + " does not produce a coupling");
        write_coupling_csv(o.coupling_out, *report.coupling);
    }
    if (o.json) {
        std::cout << report_json(report).dump() << '\n';
    } else {
        std::cout.precision(17);
        std::cout << report.metric << ' ' << report.value << '\n';
    }
    return kOk;
}

int run_flow_cmd(const FlowOptions& o) {
    FlowConfig cfg;
    cfg.metric = o.metric == "hcp" ? FlowMetric::Hcp : FlowMetric::Sliced;
    cfg.particles = o.particles;
    cfg.target_size = o.particles;
    cfg.lr = o.lr;
    cfg.iters = o.iters;
    cfg.seed = o.seed.value_or(default_seed());
    cfg.validate();
    const auto trajectory = run_flow(cfg, o.target);
    if (!o.out.empty()) {
        write_trajectory(o.out, trajectory);
        std::cout << (fs::path(o.out) / "trajectory.csv").string() << '\n';
        return kOk;
    }
    std::cout.precision(17);
    std::cout << "iter,loss,exact_w2,elapsed_s\n";
    for (const auto& s : trajectory.snapshots) {
        std::cout << s.iter << ',' << s.loss << ',';
        if (s.exact_w2) std::cout << *s.exact_w2;
        std::cout << ',' << s.elapsed_seconds << '\n';
    }
    return kOk;
}

int run_experiment_cmd(const ExperimentOptions& o) {
    ExperimentSpec spec;
    spec.name = o.name;
    spec.seed = o.seed.value_or(default_seed());
    spec.replications = o.replications;
    spec.out_dir = o.out;
    spec.threads = o.threads;
    spec.gnuplot_script = o.gnuplot;
    if (o.gnuplot && o.out.empty()) throw ParameterError("--gnuplot-script requires --out");
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ParameterError("--set expects key=value, got '" + kv + "'");
        spec.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (o.threads != 0) set_default_threads(o.threads);
    const auto result = run_experiment(spec);
    if (!result.csv_path.empty()) {
        std::cout << result.csv_path.string() << '\n';
    } else {
        std::cout << kExperimentCsvHeader << '\n';
        std::cout.precision(17);
        for (const auto& r : result.rows) {
            std::cout << result.name << ',' << r.row_type << ',' << r.parameter << ',';
            if (!std::isnan(r.param_value)) std::cout << r.param_value;
            std::cout << ',';
            if (r.replication >= 0) std::cout << r.replication;
            std::cout << ',' << r.metric << ',' << r.value << '\n';
        }
    }
    return kOk;
}

std::vector<std::size_t> parse_sizes(const std::string& list) {
    std::vector<std::size_t> sizes;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size() || v == 0 || item.find('-') != std::string::npos)
            throw ParameterError("--sizes expects a comma-separated list of positive integers, got '" + list + "'");
        sizes.push_back(static_cast<std::size_t>(v));
    }
    if (sizes.empty()) throw ParameterError("--sizes is empty");
    return sizes;
}

int run_bench(const BenchOptions& o) {
    const auto sizes = parse_sizes(o.sizes);
    if (o.dim == 0) throw ParameterError("--dim must be positive");
    const std::uint64_t seed = o.seed.value_or(default_seed());
    constexpr int kRuns = 5;

    std::ostringstream csv;
    csv.precision(17);
    csv << "n,dim,metric,median_seconds,value\n";
    for (std::size_t s = 0; s < sizes.size(); ++s) {
        const std::size_t n = sizes[s];
        const auto x = generate({UniformCube{o.dim}, n, splitmix64(seed ^ (2 * s))});
        const auto y = generate({UniformCube{o.dim}, n, splitmix64(seed ^ (2 * s + 1))});

        auto bench = [&](const std::string& metric, const std::function<DistanceReport()>& call) {
            double value = call().value;  // warm-up
            std::vector<double> times;
            for (int r = 0; r < kRuns; ++r) {
                const auto start = std::chrono::steady_clock::now();
                value = call().value;
                times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
            }
            std::nth_element(times.begin(), times.begin() + kRuns / 2, times.end());
            csv << n << ',' << o.dim << ',' << metric << ',' << times[kRuns / 2] << ',' << value << '\n';
        };

        bench("hcp", [&] { return hcp_distance(x, y); });
        bench("sw", [&] { return sliced_wasserstein(x, y, {2.0, 64, seed, 1}); });
        if (o.dim >= 2) {
            IprhcpParams ip;
            ip.subdims = std::min(2u, o.dim);
            ip.projections = 16;
            ip.seed = seed;
            ip.threads = 1;
            bench("iprhcp", [&] { return iprhcp(x, y, ip); });
            PrhcpParams pp;
            pp.subdims = std::min(2u, o.dim);
            bench("prhcp", [&] { return prhcp(x, y, pp); });
        }
        if (n * n <= kExactSizeLimit && n <= 1000) bench("wass", [&] { return exact_wasserstein(x, y); });
    }

    if (o.out.empty()) {
        std::cout << csv.str();
        return kOk;
    }
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create output directory '" + o.out + "': " + ec.message());
    const fs::path path = fs::path(o.out) / "bench.csv";
    std::ofstream file(path);
    if (!file) throw IoError("cannot write '" + path.string() + "'");
    file << csv.str();
    if (!file) throw IoError("failed while writing '" + path.string() + "'");
    std::cout << path.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hilbert curve projection distances between point clouds"};
    app.require_subcommand(1);

    DistOptions dist;
    auto* d = app.add_subcommand("dist", "Distance between two point-cloud CSV files");
    d->add_option("--metric", dist.metric)->required()->check(CLI::IsMember({"hcp", "iprhcp", "prhcp", "sw", "wass"}));
    d->add_option("--x", dist.x, "Source point cloud CSV")->required();
    d->add_option("--y", dist.y, "Target point cloud CSV")->required();
    d->add_option("--p", dist.p, "Cost exponent (>= 1)");
    d->add_option("--order", dist.order, "Curve order k (0 = automatic)");
    d->add_option("--subdim", dist.subdim, "Subspace dimension q");
    d->add_option("--projections", dist.projections, "Number of random projections");
    d->add_option("--seed", dist.seed);
    d->add_option("--domain", dist.domain)->check(CLI::IsMember({"percloud", "shared", "unitcube"}));
    d->add_option("--coupling", dist.coupling_out, "Write the coupling as CSV");
    d->add_flag("--json", dist.json, "Print the report as JSON");
    d->add_flag("--weighted", dist.weighted, "Last CSV column holds weights");

    FlowOptions flow;
    auto* f = app.add_subcommand("flow", "Particle flow toward a target distribution");
    f->add_option("--metric", flow.metric)->required()->check(CLI::IsMember({"hcp", "sw"}));
    f->add_option("--target", flow.target, "gauss25, swissroll, circle or a CSV file")->required();
    f->add_option("--particles", flow.particles);
    f->add_option("--lr", flow.lr);
    f->add_option("--iters", flow.iters);
    f->add_option("--seed", flow.seed);
    f->add_option("--out", flow.out);

    ExperimentOptions exp;
    auto* e = app.add_subcommand("experiment", "Run a named experiment and write CSV");
    e->add_option("--name", exp.name)->required();
    e->add_option("--seed", exp.seed);
    e->add_option("--replications", exp.replications);
    e->add_option("--out", exp.out);
    e->add_option("--threads", exp.threads);
    e->add_option("--set", exp.sets, "Override an experiment parameter (key=value)");
    e->add_flag("--gnuplot-script", exp.gnuplot, "Also write a gnuplot script next to the CSV");

    BenchOptions bench;
    auto* b = app.add_subcommand("bench", "Time every metric on uniform clouds");
    b->add_option("--sizes", bench.sizes, "Comma-separated sample sizes")->required();
    b->add_option("--dim", bench.dim)->required();
    b->add_option("--seed", bench.seed);
    b->add_option("--out", bench.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kParameterError;
    }

    try {
        if (*d) return run_dist(dist);
        if (*f) return run_flow_cmd(flow);
        if (*e) {
            if (exp.replications == 0 && e->count("--replications"))
                throw ParameterError("--replications must be >= 1");
            return run_experiment_cmd(exp);
        }
        return run_bench(bench);
    } catch (const InvalidInput& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kInvalidInput;
    } catch (const ParameterError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kParameterError;
    } catch (const IoError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kIoError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kInvalidInput;
    }
}
