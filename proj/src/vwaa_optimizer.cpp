#include "vkelm/vwaa_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vkelm/error.hpp"
#include "vkelm/metrics.hpp"
#include "vkelm/random.hpp"

namespace vkelm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void VwaaConfig::validate() const {
    if (population < 1) throw std::invalid_argument("vwaa: population must be >= 1");
    if (top_k < 1 || top_k > population) throw std::invalid_argument("vwaa: top_k must be in [1, population]");
    if (!(w_min > 0.0 && w_min < 1.0)) throw std::invalid_argument("vwaa: w_min must be in (0, 1)");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("vwaa: rel_tol must be > 0");
    if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("vwaa: decay must be in (0, 1)");
    if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) throw std::invalid_argument("vwaa: sigma0 must be >= 0");
    if (!(lambda_kl >= 0.0) || !std::isfinite(lambda_kl)) throw std::invalid_argument("vwaa: lambda_kl must be >= 0");
    if (patience < 1) throw std::invalid_argument("vwaa: patience must be >= 1");
}

std::string to_string(StopReason reason) {
    return reason == StopReason::converged ? "converged" : "max_iters";
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size() || p.empty()) throw std::invalid_argument("kl_divergence: length mismatch");
    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!(p[j] >= 0.0) || !(q[j] >= 0.0)) throw std::invalid_argument("kl_divergence: negative entry");
        sp += p[j];
        sq += q[j];
    }
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("kl_divergence: inputs must sum to 1");

    double kl = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] == 0.0) continue;
        if (q[j] == 0.0) throw std::domain_error("kl_divergence: p > 0 where q == 0");
        kl += p[j] * std::log(p[j] / q[j]);
    }
    return std::max(kl, 0.0);
}

double weight_divergence(const std::vector<double>& weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<double> p(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j) p[j] = weights[j] / total;
    const std::vector<double> u(weights.size(), 1.0 / static_cast<double>(weights.size()));
    return kl_divergence(p, u);
}

double penalized_fitness(double raw_val_rmse, const std::vector<double>& weights, double lambda_kl) {
    if (lambda_kl == 0.0) return raw_val_rmse;
    return raw_val_rmse * (1.0 + lambda_kl * weight_divergence(weights));
}

FitnessValue evaluate_weights(const WeightVector& weights, const Dataset& train, const Dataset& val,
                              const KernelParams& params, double lambda_kl) {
    try {
        const auto model = train_kelm(train, params, weights);
        const double raw = rmse(val.targets, predict(model, val.features));
        if (!std::isfinite(raw)) return {kInf, kInf};
        return {penalized_fitness(raw, weights.values, lambda_kl), raw};
    } catch (const NumericError& e) {
        std::cerr << "warning: candidate culled: " << e.what() << " (jitter " << e.last_jitter() << ")\n";
        return {kInf, kInf};
    }
}

std::vector<double> weighted_mean(const std::vector<Candidate>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("weighted_mean: no candidates");
    double f_min = kInf;
    double f_max = -kInf;
    for (const auto& c : candidates) {
        if (!std::isfinite(c.fitness)) throw std::invalid_argument("weighted_mean: non-finite fitness");
        f_min = std::min(f_min, c.fitness);
        f_max = std::max(f_max, c.fitness);
    }
    const double spread = f_max - f_min + 1e-12;

    std::vector<double> mix(candidates.size());
    double total = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        mix[i] = std::exp(-(candidates[i].fitness - f_min) / spread);
        total += mix[i];
    }

    const auto dim = candidates.front().weights.size();
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].weights.size() != dim) throw std::invalid_argument("weighted_mean: dimension mismatch");
        const double v = mix[i] / total;
        for (std::size_t j = 0; j < dim; ++j) mean[j] += v * candidates[i].weights[j];
    }
    return mean;
}

namespace {

// Evaluates candidates [first, last) in place.
void evaluate_population(std::vector<Candidate>& population, std::size_t first, std::size_t last,
                         std::size_t iteration, const FitnessFn& fitness) {
    const auto count = static_cast<long long>(last - first);
    std::exception_ptr failure;
#if defined(VKELM_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long k = 0; k < count; ++k) {
        auto& cand = population[first + static_cast<std::size_t>(k)];
        try {
            const auto value = fitness(cand.weights, iteration);
            cand.fitness = std::isnan(value.penalized) ? kInf : value.penalized;
            cand.raw_val_rmse = value.raw_val_rmse;
        } catch (...) {
#if defined(VKELM_HAVE_OPENMP)
#pragma omp critical(vkelm_vwaa_failure)
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

// Lowest fitness wins; ties go to the lower index.
std::size_t best_index(const std::vector<Candidate>& population) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i)
        if (population[i].fitness < population[best].fitness) best = i;
    return best;
}

double sigma_at(const VwaaConfig& config, std::size_t t) {
    return config.sigma0 * std::pow(config.decay, static_cast<double>(t));
}

}  // namespace

VwaaState initialize(std::size_t feature_count, const VwaaConfig& config, const FitnessFn& fitness) {
    config.validate();
    if (feature_count == 0) throw std::invalid_argument("vwaa: no features to weight");

    VwaaState state;
    state.population.resize(config.population);
    state.population[0].weights.assign(feature_count, 1.0);
    const double lo = std::max(config.w_min, 0.1);
    for (std::size_t i = 1; i < config.population; ++i) {
        SplitMix64 rng(substream_seed(config.seed, 0, i));
        auto& w = state.population[i].weights;
        w.resize(feature_count);
        for (auto& v : w) v = rng.uniform(lo, 1.0);
    }
    evaluate_population(state.population, 0, state.population.size(), 0, fitness);

    state.best = state.population[best_index(state.population)];
    state.history.push_back(state.best.fitness);
    state.trace.push_back({0, state.best.fitness, state.best.raw_val_rmse, 0.0});
    return state;
}

VwaaState step(const VwaaState& state, const VwaaConfig& config, const FitnessFn& fitness) {
    VwaaState next;
    next.iteration = state.iteration + 1;
    const double sigma = sigma_at(config, state.iteration);

    std::vector<Candidate> ranked;
    for (const auto& c : state.population)
        if (std::isfinite(c.fitness)) ranked.push_back(c);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Candidate& a, const Candidate& b) { return a.fitness < b.fitness; });
    if (ranked.size() > config.top_k) ranked.resize(config.top_k);
    const auto mean = ranked.empty() ? state.best.weights : weighted_mean(ranked);

    next.population.resize(config.population);
    for (std::size_t i = 0; i + 1 < config.population; ++i) {
        SplitMix64 rng(substream_seed(config.seed, next.iteration, i));
        auto& w = next.population[i].weights;
        w.resize(mean.size());
        for (std::size_t j = 0; j < mean.size(); ++j)
            w[j] = std::clamp(mean[j] + sigma * rng.normal(), config.w_min, 1.0);
    }
    // The elite keeps its carried fitness and is not re-scored.
    next.population.back() = state.best;
    evaluate_population(next.population, 0, config.population - 1, next.iteration, fitness);

    next.best = state.best;
    const auto challenger = best_index(next.population);
    if (next.population[challenger].fitness < next.best.fitness) next.best = next.population[challenger];

    const double prev = state.best.fitness;
    const double curr = next.best.fitness;
    double improvement = 0.0;
    if (std::isinf(prev))
        improvement = std::isinf(curr) ? 0.0 : kInf;
    else if (prev != 0.0)
        improvement = (prev - curr) / std::abs(prev);
    next.stalled = improvement < config.rel_tol ? state.stalled + 1 : 0;

    next.history = state.history;
    next.history.push_back(curr);
    next.trace = state.trace;
    next.trace.push_back({next.iteration, curr, next.best.raw_val_rmse, sigma});
    return next;
}

VwaaResult optimize(const std::vector<std::string>& feature_names, const VwaaConfig& config,
                    const FitnessFn& fitness) {
    auto state = initialize(feature_names.size(), config, fitness);
    auto reason = StopReason::max_iters;
    while (state.iteration < config.max_iters) {
        state = step(state, config, fitness);
        if (state.stalled >= config.patience) {
            reason = StopReason::converged;
            break;
        }
    }

    VwaaResult result;
    result.best_weights = WeightVector{feature_names, state.best.weights, config.w_min};
    result.best_fitness = state.best.fitness;
    result.best_raw_rmse = state.best.raw_val_rmse;
    result.history = std::move(state.history);
    result.stop_reason = reason;
    result.trace = std::move(state.trace);
    return result;
}

VwaaResult optimize(const Dataset& train, const Dataset& val, const KernelParams& params,
                    const VwaaConfig& config) {
    std::vector<std::string> names;
    for (const auto& origin : train.origin_feature)
        if (std::find(names.begin(), names.end(), origin) == names.end()) names.push_back(origin);

    return optimize(names, config, [&](const std::vector<double>& w, std::size_t) {
        return evaluate_weights(WeightVector{names, w, config.w_min}, train, val, params, config.lambda_kl);
    });
}

std::string trace_to_csv(const VwaaResult& result) {
    std::string out = "iteration,best_penalized,best_raw_rmse,sigma_t\n";
    for (const auto& row : result.trace)
        out += std::to_string(row.iteration) + "," + format_double(row.best_penalized) + "," +
               format_double(row.best_raw_rmse) + "," + format_double(row.sigma) + "\n";
    return out;
}

}  // namespace vkelm
