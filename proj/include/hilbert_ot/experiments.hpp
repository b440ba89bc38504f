#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace hilbert_ot {

/// One CSV row. row_type is "raw" (one replication), "mean"/"std"/"median"
/// (aggregates over replications), "reference" (closed-form values) or
/// "fit" (derived summary such as a slope or a rank correlation).
struct ExperimentRow {
    std::string row_type;
    std::string parameter;
    double param_value = std::numeric_limits<double>::quiet_NaN();
    long replication = -1;
    std::string metric;
    double value = 0.0;
};

struct ExperimentSpec {
    std::string name;
    std::map<std::string, std::string> overrides;
    std::uint64_t seed = 0;
    /// 0 selects the experiment's default.
    std::size_t replications = 0;
    std::filesystem::path out_dir;
    std::size_t threads = 0;
    bool gnuplot_script = false;
};

struct ExperimentResult {
    std::string name;
    std::vector<ExperimentRow> rows;
    std::filesystem::path csv_path;

    /// Value of the first row matching (row_type, metric[, param_value]).
    double find(const std::string& row_type, const std::string& metric,
                double param_value = std::numeric_limits<double>::quiet_NaN()) const;
};

/// fig1_offset, highdim_theta, rate_curve, k_sensitivity, subspace_recovery,
/// runtime_scaling, flow.
const std::vector<std::string>& experiment_names();

/// Runs the named experiment. Rows are identical for any thread count.
/// When out_dir is set, writes <out_dir>/<name>.csv (and <name>.gp when
/// requested). Unknown names or override keys throw InvalidInput.
ExperimentResult run_experiment(const ExperimentSpec& spec);

inline constexpr const char* kExperimentCsvHeader = "experiment,row_type,parameter,param_value,replication,metric,value";
void write_experiment_csv(const std::filesystem::path& path, const ExperimentResult& result);

/// Appends mean and std rows for every (parameter value, metric) group of
/// raw rows, in first-appearance order. std is the sample deviation (0 for
/// a single replication).
void append_aggregates(std::vector<ExperimentRow>& rows);

/// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> a, std::span<const double> b);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hilbert_ot
