#include "vkelm/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "vkelm/error.hpp"
#include "vkelm/metrics.hpp"
#include "vkelm/random.hpp"

namespace vkelm {

namespace {

Eigen::MatrixXd hidden_activations(const ElmModel& model, const Eigen::MatrixXd& X) {
    Eigen::MatrixXd H = X * model.input_weights.transpose();
    H.rowwise() += model.biases.transpose();
    return (1.0 / (1.0 + (-H.array()).exp())).matrix();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ElmModel train_elm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double c, std::uint64_t seed,
                   std::size_t hidden) {
    if (X.rows() < 1) throw std::invalid_argument("train_elm: need at least one sample");
    if (X.rows() != y.size()) throw std::invalid_argument("train_elm: X/y row mismatch");
    if (!(c > 0.0)) throw std::invalid_argument("train_elm: c must be positive");

    const auto d = X.cols();
    const auto h = static_cast<Eigen::Index>(hidden == 0 ? kElmHiddenPerInput * static_cast<std::size_t>(d) : hidden);

    ElmModel model;
    model.c = c;
    model.seed = seed;
    model.input_weights.resize(h, d);
    model.biases.resize(h);
    SplitMix64 rng(seed);
    for (Eigen::Index k = 0; k < h; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) model.input_weights(k, j) = rng.uniform(-1.0, 1.0);
        model.biases(k) = rng.uniform(-1.0, 1.0);
    }

    const Eigen::MatrixXd H = hidden_activations(model, X);
    Eigen::MatrixXd gram = H.transpose() * H;
    gram.diagonal().array() += 1.0 / c;
    model.output_weights = solve_spd(gram, H.transpose() * y);
    return model;
}

Eigen::VectorXd predict_elm(const ElmModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.input_weights.cols())
        throw std::invalid_argument("predict_elm: query has " + std::to_string(X.cols()) +
                                    " columns, model expects " + std::to_string(model.input_weights.cols()));
    return hidden_activations(model, X) * model.output_weights;
}

namespace {

void score_on(ModelScore& score, const Dataset& test, const Eigen::VectorXd& predicted) {
    score.rmse = rmse(test.targets, predicted);
    try {
        score.r2 = r2(test.targets, predicted);
        score.rpd = rpd(test.targets, predicted);
    } catch (const MetricError& e) {
        score.error = e.what();
    }
}

}  // namespace

ComparisonReport compare_models(const Dataset& train, const Dataset& val, const Dataset& test,
                                const KernelParams& params, const VwaaConfig& vwaa_config,
                                const CompareOptions& options) {
    ComparisonReport report;
    std::vector<std::string> names;
    for (const auto& o : train.origin_feature)
        if (std::find(names.begin(), names.end(), o) == names.end()) names.push_back(o);
    const auto uniform = WeightVector::uniform(names, vwaa_config.w_min);

    for (const auto& name : options.models) {
        ModelScore score;
        score.name = name;
        try {
            if (name == kModelVwaaKelm || name == kModelKelm) {
                const auto start = std::chrono::steady_clock::now();
                WeightVector weights = uniform;
                if (name == kModelVwaaKelm) {
                    const auto result = optimize(train, val, params, vwaa_config);
                    weights = result.best_weights;
                    report.vwaa_validation_fitness = result.best_fitness;
                }
                const auto model = train_kelm(train, params, weights);
                score.train_time_s = seconds_since(start);
                if (name == kModelKelm)
                    report.uniform_validation_fitness =
                        evaluate_weights(uniform, train, val, params, vwaa_config.lambda_kl).penalized;
                score_on(score, test, predict(model, test.features));
                score.infer_time_ms_per_sample = time_per_sample_ms(
                    test.features, options.min_timing_calls,
                    [&](const Eigen::MatrixXd& row) { return predict(model, row); });
            } else if (name == kModelElm) {
                const auto start = std::chrono::steady_clock::now();
                const auto model = train_elm(train.features, train.targets, params.c, options.elm_seed);
                score.train_time_s = seconds_since(start);
                score_on(score, test, predict_elm(model, test.features));
                score.infer_time_ms_per_sample = time_per_sample_ms(
                    test.features, options.min_timing_calls,
                    [&](const Eigen::MatrixXd& row) { return predict_elm(model, row); });
            } else {
                throw std::invalid_argument("unknown model '" + name + "'");
            }
        } catch (const NumericError& e) {
            score.error = e.what();
        }
        report.models.push_back(std::move(score));
    }
    return report;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::optional<double> opt_from(const ojson& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

}  // namespace

std::string comparison_to_json(const ComparisonReport& report) {
    ojson models = ojson::array();
    for (const auto& m : report.models) {
        ojson e;
        e["name"] = m.name;
        e["rmse"] = opt(m.rmse);
        e["r2"] = opt(m.r2);
        e["rpd"] = opt(m.rpd);
        e["train_time_s"] = opt(m.train_time_s);
        e["infer_time_ms_per_sample"] = opt(m.infer_time_ms_per_sample);
        e["error"] = m.error ? ojson(*m.error) : ojson(nullptr);
        models.push_back(std::move(e));
    }
    ojson j;
    j["models"] = std::move(models);
    j["validation_fitness"] = {{kModelVwaaKelm, opt(report.vwaa_validation_fitness)},
                               {kModelKelm, opt(report.uniform_validation_fitness)}};
    return j.dump(2) + "\n";
}

ComparisonReport comparison_from_json(const std::string& text) {
    try {
        const auto j = ojson::parse(text);
        ComparisonReport report;
        for (const auto& e : j.at("models")) {
            ModelScore m;
            m.name = e.at("name").get<std::string>();
            m.rmse = opt_from(e, "rmse");
            m.r2 = opt_from(e, "r2");
            m.rpd = opt_from(e, "rpd");
            m.train_time_s = opt_from(e, "train_time_s");
            m.infer_time_ms_per_sample = opt_from(e, "infer_time_ms_per_sample");
            if (!e.at("error").is_null()) m.error = e.at("error").get<std::string>();
            report.models.push_back(std::move(m));
        }
        const auto& v = j.at("validation_fitness");
        report.vwaa_validation_fitness = opt_from(v, kModelVwaaKelm);
        report.uniform_validation_fitness = opt_from(v, kModelKelm);
        return report;
    } catch (const ojson::exception& e) {
        throw FormatError(std::string("malformed comparison report: ") + e.what());
    }
}

}  // namespace vkelm
