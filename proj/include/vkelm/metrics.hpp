#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vkelm/data.hpp"
#include "vkelm/kernel_model.hpp"

namespace vkelm {

double rmse(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted);
double r2(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted);
/// Sample standard deviation of actual (n - 1) over RMSE. Throws MetricError
/// when RMSE is zero (infinite robustness) or actual is constant.
double rpd(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted);
double sample_sd(const Eigen::VectorXd& values);

/// Counts of |actual - predicted| in [0, 50], (50, 100], (100, inf) watts.
/// Boundary values fall in the lower bin.
using ErrorHistogram = std::array<std::size_t, 3>;
ErrorHistogram error_histogram(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted);

struct SplitMetrics {
    std::string name;
    std::size_t n = 0;
    std::optional<double> rmse;
    std::optional<double> r2;
    std::optional<double> rpd;
    bool rpd_infinite = false;
    std::optional<ErrorHistogram> histogram;
    // Why a metric is null, one entry per failed metric.
    std::vector<std::string> notes;

    // Plot data; not part of the JSON report.
    Eigen::VectorXd actual;
    Eigen::VectorXd predicted;
};

struct Timings {
    std::optional<double> grid_search_s;
    std::optional<double> vwaa_s;
    std::optional<double> train_s;
    std::optional<double> infer_ms_per_sample;
};

struct EvaluationReport {
    std::vector<SplitMetrics> splits;
    WeightVector feature_weights;
    KernelParams params;
    std::size_t window_len = 1;
    Timings timings;
    // Best penalized fitness per optimizer iteration; empty without weight search.
    std::vector<double> history;
    std::optional<std::string> stop_reason;
};

struct NamedDataset {
    std::string name;
    const Dataset* data;
};

EvaluationReport build_report(const KelmModel& model, const std::vector<NamedDataset>& splits,
                              const Timings& timings = {});

/// Canonical JSON. Timings are written only when include_timings is set so
/// that reports of identical runs are byte-identical.
std::string report_to_json(const EvaluationReport& report, bool include_timings = false);
std::string timings_to_json(const Timings& timings);

/// Writes scatter_<split>.csv, errors_<split>.csv, weights.csv and
/// history.csv (when a history exists) into dir.
void write_plot_files(const std::filesystem::path& dir, const EvaluationReport& report);

}  // namespace vkelm
