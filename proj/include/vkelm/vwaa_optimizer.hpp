#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vkelm/data.hpp"
#include "vkelm/kernel_model.hpp"

namespace vkelm {

struct VwaaConfig {
    std::size_t population = 20;
    std::size_t max_iters = 100;
    double sigma0 = 0.3;  // initial perturbation scale, in weight units
    double decay = 0.95;
    std::size_t top_k = 5;
    double lambda_kl = 0.01;
    double w_min = 0.05;
    std::uint64_t seed = 0;
    std::size_t patience = 5;
    double rel_tol = 0.001;

    void validate() const;
};

struct FitnessValue {
    double penalized;
    double raw_val_rmse;
};

struct Candidate {
    std::vector<double> weights;
    double fitness;
    double raw_val_rmse;
};

enum class StopReason { converged, max_iters };
std::string to_string(StopReason reason);

struct TraceRow {
    std::size_t iteration;
    double best_penalized;
    double best_raw_rmse;
    double sigma;
};

struct VwaaResult {
    WeightVector best_weights;
    double best_fitness;
    double best_raw_rmse;
    std::vector<double> history;  // best penalized fitness, iteration 0 = initial population
    StopReason stop_reason;
    std::vector<TraceRow> trace;
};

/// sum p_j ln(p_j / q_j), with 0 ln(0/q) = 0. Throws std::domain_error when
/// some p_j > 0 has q_j == 0, std::invalid_argument on malformed inputs.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

/// KL of the normalized weights against the uniform distribution.
double weight_divergence(const std::vector<double>& weights);

/// raw * (1 + lambda_kl * KL(w / sum w || uniform)).
double penalized_fitness(double raw_val_rmse, const std::vector<double>& weights, double lambda_kl);

/// Trains on train with the candidate weights and scores validation RMSE.
/// A numeric training failure yields infinite fitness and a warning on stderr.
FitnessValue evaluate_weights(const WeightVector& weights, const Dataset& train, const Dataset& val,
                              const KernelParams& params, double lambda_kl);

/// Fitness-weighted mean of candidate weight vectors. Mixing coefficients
/// are exp(-(f_i - f_min) / (f_max - f_min + 1e-12)), normalized.
std::vector<double> weighted_mean(const std::vector<Candidate>& candidates);

/// Candidate evaluator. Called concurrently when OpenMP is enabled, so it
/// must be safe to invoke from several threads.
using FitnessFn = std::function<FitnessValue(const std::vector<double>& weights, std::size_t iteration)>;

struct VwaaState {
    std::vector<Candidate> population;
    Candidate best;
    std::size_t iteration = 0;
    std::size_t stalled = 0;  // consecutive iterations below rel_tol improvement
    std::vector<double> history;
    std::vector<TraceRow> trace;
};

/// All-ones vector plus population - 1 uniform draws in [max(w_min, 0.1), 1].
VwaaState initialize(std::size_t feature_count, const VwaaConfig& config, const FitnessFn& fitness);

/// One generation: mean of the top_k, population - 1 Gaussian perturbations
/// (sigma0 * decay^t, clamped to [w_min, 1]) and the best-so-far as elite.
VwaaState step(const VwaaState& state, const VwaaConfig& config, const FitnessFn& fitness);

VwaaResult optimize(const std::vector<std::string>& feature_names, const VwaaConfig& config,
                    const FitnessFn& fitness);

VwaaResult optimize(const Dataset& train, const Dataset& val, const KernelParams& params,
                    const VwaaConfig& config);

/// Optimizer trace CSV: iteration,best_penalized,best_raw_rmse,sigma_t.
std::string trace_to_csv(const VwaaResult& result);

}  // namespace vkelm
