#include "vkelm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vkelm/error.hpp"
#include "vkelm/json_io.hpp"

namespace vkelm {

namespace {

void require_pair(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted,
                  Eigen::Index min_len, const char* fn) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument(std::string(fn) + ": length mismatch");
    if (actual.size() < min_len)
        throw std::invalid_argument(std::string(fn) + ": need at least " + std::to_string(min_len) +
                                    " values");
}

double total_sum_of_squares(const Eigen::VectorXd& actual) {
    const double mean = actual.mean();
    return (actual.array() - mean).square().sum();
}

}  // namespace

double rmse(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    require_pair(actual, predicted, 1, "rmse");
    return std::sqrt((actual - predicted).squaredNorm() / static_cast<double>(actual.size()));
}

double r2(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    require_pair(actual, predicted, 2, "r2");
    const double sst = total_sum_of_squares(actual);
    if (sst == 0.0) throw MetricError("r2 undefined: actual values are constant");
    return 1.0 - (actual - predicted).squaredNorm() / sst;
}

double sample_sd(const Eigen::VectorXd& values) {
    if (values.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
    return std::sqrt(total_sum_of_squares(values) / static_cast<double>(values.size() - 1));
}

double rpd(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    require_pair(actual, predicted, 2, "rpd");
    const double sd = sample_sd(actual);
    if (sd == 0.0) throw MetricError("rpd undefined: actual values are constant");
    const double err = rmse(actual, predicted);
    if (err == 0.0) throw MetricError("rpd undefined: rmse is zero (infinite robustness)");
    return sd / err;
}

ErrorHistogram error_histogram(const Eigen::VectorXd& actual, const Eigen::VectorXd& predicted) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("error_histogram: length mismatch");
    ErrorHistogram h{0, 0, 0};
    for (Eigen::Index i = 0; i < actual.size(); ++i) {
        const double e = std::abs(actual(i) - predicted(i));
        if (e <= 50.0)
            ++h[0];
        else if (e <= 100.0)
            ++h[1];
        else
            ++h[2];
    }
    return h;
}

EvaluationReport build_report(const KelmModel& model, const std::vector<NamedDataset>& splits,
                              const Timings& timings) {
    EvaluationReport report;
    report.feature_weights = model.feature_weights;
    report.params = model.params;
    report.window_len = model.schema.window_len;
    report.timings = timings;

    for (const auto& [name, data] : splits) {
        SplitMetrics m;
        m.name = name;
        m.n = data->rows();
        m.actual = data->targets;
        m.predicted = predict(model, data->features);

        if (!data->has_targets() || m.n == 0) {
            m.notes.push_back("split has no targets");
            report.splits.push_back(std::move(m));
            continue;
        }
        m.histogram = error_histogram(m.actual, m.predicted);
        m.rmse = rmse(m.actual, m.predicted);
        const auto guarded = [&m](const char* metric, auto&& fn) -> std::optional<double> {
            try {
                return fn();
            } catch (const MetricError& e) {
                m.notes.push_back(std::string(metric) + ": " + e.what());
            } catch (const std::invalid_argument& e) {
                m.notes.push_back(std::string(metric) + ": " + e.what());
            }
            return std::nullopt;
        };
        m.r2 = guarded("r2", [&] { return r2(m.actual, m.predicted); });
        m.rpd = guarded("rpd", [&] { return rpd(m.actual, m.predicted); });
        m.rpd_infinite = !m.rpd && *m.rmse == 0.0;
        report.splits.push_back(std::move(m));
    }
    return report;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson optional_number(const std::optional<double>& v) {
    return v ? ojson(*v) : ojson(nullptr);
}

ojson timings_json(const Timings& t) {
    ojson j;
    j["grid_search_s"] = optional_number(t.grid_search_s);
    j["vwaa_s"] = optional_number(t.vwaa_s);
    j["train_s"] = optional_number(t.train_s);
    j["infer_ms_per_sample"] = optional_number(t.infer_ms_per_sample);
    return j;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report, bool include_timings) {
    ojson j;
    j["params"] = {{"gamma", report.params.gamma}, {"c", report.params.c}};
    j["window_len"] = report.window_len;
    j["feature_weights"] = weights_to_json(report.feature_weights);

    ojson splits = ojson::array();
    for (const auto& m : report.splits) {
        ojson s;
        s["name"] = m.name;
        s["n"] = m.n;
        s["rmse"] = optional_number(m.rmse);
        s["r2"] = optional_number(m.r2);
        s["rpd"] = optional_number(m.rpd);
        s["rpd_infinite"] = m.rpd_infinite;
        if (m.histogram) {
            s["error_histogram"] = {{"le_50", (*m.histogram)[0]},
                                    {"50_to_100", (*m.histogram)[1]},
                                    {"gt_100", (*m.histogram)[2]}};
        } else {
            s["error_histogram"] = nullptr;
        }
        s["notes"] = m.notes;
        splits.push_back(std::move(s));
    }
    j["splits"] = std::move(splits);

    if (report.stop_reason) {
        j["optimizer"] = {{"stop_reason", *report.stop_reason},
                          {"iterations", report.history.empty() ? 0 : report.history.size() - 1},
                          {"best_fitness", report.history.empty() ? ojson(nullptr) : ojson(report.history.back())}};
    } else {
        j["optimizer"] = nullptr;
    }
    if (include_timings) j["timings"] = timings_json(report.timings);
    return j.dump(2) + "\n";
}

std::string timings_to_json(const Timings& timings) {
    return timings_json(timings).dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

}  // namespace

void write_plot_files(const std::filesystem::path& dir, const EvaluationReport& report) {
    std::filesystem::create_directories(dir);
    for (const auto& m : report.splits) {
        std::string scatter = "actual,predicted\n";
        std::string errors = "abs_error\n";
        for (Eigen::Index i = 0; i < m.predicted.size(); ++i) {
            const double a = m.actual(i);
            const double p = m.predicted(i);
            scatter += (std::isfinite(a) ? format_double(a) : std::string()) + "," + format_double(p) + "\n";
            if (std::isfinite(a)) errors += format_double(std::abs(a - p)) + "\n";
        }
        write_text(dir / ("scatter_" + m.name + ".csv"), scatter);
        write_text(dir / ("errors_" + m.name + ".csv"), errors);
    }

    std::string weights = "feature,weight\n";
    for (std::size_t i = 0; i < report.feature_weights.size(); ++i)
        weights += report.feature_weights.names[i] + "," + format_double(report.feature_weights.values[i]) + "\n";
    write_text(dir / "weights.csv", weights);

    if (!report.history.empty()) {
        std::string history = "iteration,fitness\n";
        for (std::size_t t = 0; t < report.history.size(); ++t)
            history += std::to_string(t) + "," + format_double(report.history[t]) + "\n";
        write_text(dir / "history.csv", history);
    }
}

}  // namespace vkelm
