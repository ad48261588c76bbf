#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vkelm/data.hpp"
#include "vkelm/kernel_model.hpp"
#include "vkelm/vwaa_optimizer.hpp"

namespace vkelm {

/// Extreme learning machine with a sigmoid hidden layer.
struct ElmModel {
    Eigen::MatrixXd input_weights;  // h x d_enc
    Eigen::VectorXd biases;         // h
    Eigen::VectorXd output_weights; // h
    double c = 180.0;
    std::uint64_t seed = 0;

    std::size_t hidden() const { return static_cast<std::size_t>(biases.size()); }
};

inline constexpr std::size_t kElmHiddenPerInput = 8;

/// Input weights and biases ~ Uniform[-1, 1] from SplitMix64(seed), drawn
/// row by row (a_k then b_k). Output weights solve (H^T H + I/c) v = H^T y.
/// hidden == 0 selects 8 * d_enc nodes.
ElmModel train_elm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double c, std::uint64_t seed,
                   std::size_t hidden = 0);

Eigen::VectorXd predict_elm(const ElmModel& model, const Eigen::MatrixXd& X);

inline constexpr const char* kModelVwaaKelm = "vwaa-kelm";
inline constexpr const char* kModelKelm = "kelm";
inline constexpr const char* kModelElm = "elm";

struct ModelScore {
    std::string name;
    std::optional<double> rmse;
    std::optional<double> r2;
    std::optional<double> rpd;
    std::optional<double> train_time_s;
    std::optional<double> infer_time_ms_per_sample;
    std::optional<std::string> error;

    bool operator==(const ModelScore&) const = default;
};

struct ComparisonReport {
    std::vector<ModelScore> models;
    // Penalized validation fitness of the optimized and the all-ones weights.
    std::optional<double> vwaa_validation_fitness;
    std::optional<double> uniform_validation_fitness;

    bool operator==(const ComparisonReport&) const = default;
};

struct CompareOptions {
    std::vector<std::string> models = {kModelVwaaKelm, kModelKelm, kModelElm};
    std::uint64_t elm_seed = 0;
    std::size_t min_timing_calls = 1000;
};

/// Trains each model on train (VWAA uses val), scores on test and times
/// training and single-sample inference over at least min_timing_calls calls.
/// A model failure is recorded in its entry; the others are still reported.
ComparisonReport compare_models(const Dataset& train, const Dataset& val, const Dataset& test,
                                const KernelParams& params, const VwaaConfig& vwaa_config,
                                const CompareOptions& options = {});

/// Mean wall-clock milliseconds per single-row predict call, cycling over
/// the rows of queries for at least min_calls calls.
template <typename PredictFn>
double time_per_sample_ms(const Eigen::MatrixXd& queries, std::size_t min_calls, PredictFn&& predict_row);

std::string comparison_to_json(const ComparisonReport& report);
ComparisonReport comparison_from_json(const std::string& text);

}  // namespace vkelm

#include "vkelm/detail/timing.hpp"
