// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "vkelm/baselines.hpp"
#include "vkelm/cli.hpp"
#include "vkelm/metrics.hpp"
#include "vkelm/pipeline.hpp"
#include "vkelm/tuning.hpp"
#include "vkelm/vwaa_optimizer.hpp"

using namespace vkelm;

namespace {

// Tolerances and thresholds.
constexpr double kSolverTol = 1e-8;
constexpr double kInterpolationRmse = 1e-3;
constexpr double kPrescaleTol = 1e-12;
constexpr double kIdentityTol = 1e-9;
constexpr int kRelevanceMinSeeds = 4;
constexpr double kQualityR2 = 0.90;
constexpr double kQualityRpd = 3.0;
constexpr double kScalingLo = 2.0;
constexpr double kScalingHi = 10.0;
constexpr std::size_t kPatience = 5;

// Runtime budgets in seconds.
constexpr double kBudgetSolver = 1.0;
constexpr double kBudgetInterpolation = 5.0;
constexpr double kBudgetRelevance = 120.0;
constexpr double kBudgetQuality = 120.0;

struct Outcome {
    bool pass;
    std::string detail;
};

using clock_type = std::chrono::steady_clock;

double elapsed_s(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

KelmModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double gamma, double c,
              const std::vector<double>& w) {
    return train_kelm(X, y, {gamma, c}, WeightVector::per_column(w), anonymous_origin(static_cast<std::size_t>(X.cols())));
}

double train_rmse(const KelmModel& m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return rmse(y, predict(m, X));
}

Outcome solver_oracle() {
    const auto start = clock_type::now();
    SplitMix64 rng(1001);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + rng.bounded(10));
        const auto d = static_cast<Eigen::Index>(1 + rng.bounded(5));
        const auto X = oracle::random_matrix(rng, n, d);
        const auto y = oracle::random_vector(rng, n, -10.0, 10.0);
        std::vector<double> w(static_cast<std::size_t>(d));
        for (auto& v : w) v = rng.uniform(0.05, 1.0);
        const double gamma = rng.uniform(0.05, 2.0);
        const double c = rng.uniform(1.0, 1000.0);
        const auto beta = fit(X, y, gamma, c, w).beta;
        const auto expected =
            oracle::explicit_inverse_beta(X, y, gamma, c, Eigen::Map<const Eigen::VectorXd>(w.data(), d));
        worst = std::max(worst, (beta - expected).cwiseAbs().maxCoeff());
    }
    const double secs = elapsed_s(start);
    return {worst < kSolverTol && secs < kBudgetSolver, fmt("max |beta - oracle| = %.3g over 20 systems, %.3f s", worst, secs)};
}

Outcome interpolation_limit() {
    const auto start = clock_type::now();
    SplitMix64 rng(1002);
    const auto X = oracle::random_matrix(rng, 40, 4);
    const auto y = oracle::random_vector(rng, 40, 50.0, 400.0);
    const double tight = train_rmse(fit(X, y, 5.0, 1e9, {1, 1, 1, 1}), X, y);

    bool monotone = true;
    double previous = std::numeric_limits<double>::infinity();
    std::string path;
    for (double c : {1.0, 10.0, 100.0, 1000.0}) {
        const double e = train_rmse(fit(X, y, 1.0, c, {1, 1, 1, 1}), X, y);
        monotone = monotone && e <= previous;
        previous = e;
        path += fmt("%.4g ", e);
    }
    const double secs = elapsed_s(start);
    return {tight < kInterpolationRmse && monotone && secs < kBudgetInterpolation,
            fmt("rmse at c=1e9: %.3g; ", tight) + "rmse over c=1,10,100,1000: " + path + fmt("; %.3f s", secs)};
}

Outcome prescaling_equivalence() {
    SplitMix64 rng(1003);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto n = static_cast<Eigen::Index>(5 + rng.bounded(30));
        const auto d = static_cast<Eigen::Index>(1 + rng.bounded(6));
        const auto X = oracle::random_matrix(rng, n, d);
        const auto y = oracle::random_vector(rng, n, 50.0, 400.0);
        std::vector<double> w(static_cast<std::size_t>(d));
        for (auto& v : w) v = rng.uniform(0.05, 1.0);
        Eigen::MatrixXd scaled = X;
        for (Eigen::Index j = 0; j < d; ++j) scaled.col(j) *= w[static_cast<std::size_t>(j)];
        const auto Q = oracle::random_matrix(rng, 10, d);
        Eigen::MatrixXd Qs = Q;
        for (Eigen::Index j = 0; j < d; ++j) Qs.col(j) *= w[static_cast<std::size_t>(j)];
        const auto a = predict(fit(X, y, 0.5, 180, w), Q);
        const auto b = predict(fit(scaled, y, 0.5, 180, std::vector<double>(static_cast<std::size_t>(d), 1.0)), Qs);
        worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    return {worst <= kPrescaleTol, fmt("max |prediction difference| = %.3g over 10 cases", worst)};
}

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

bool same_to_printed(double value, double printed, int decimals) {
    return std::abs(value - printed) <= 0.5 * std::pow(10.0, -decimals);
}

Outcome metric_fixtures() {
    int failed = 0;
    const auto expect = [&](bool ok) { failed += ok ? 0 : 1; };
    expect(rmse(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
    expect(same_to_printed(rmse(vec({0, 0}), vec({3, 4})), 3.535534, 6));
    expect(same_to_printed(rmse(vec({1, 2, 3, 4}), vec({1.1, 1.9, 3.2, 3.8})), 0.158114, 6));
    expect(r2(vec({1, 2, 3}), vec({1, 2, 3})) == 1.0);
    expect(r2(vec({1, 2, 3}), vec({2, 2, 2})) == 0.0);
    expect(same_to_printed(r2(vec({1, 2, 3}), vec({1, 2, 4})), 0.5, 12));
    expect(same_to_printed(sample_sd(vec({1, 2, 3, 4})), 1.290994, 6));
    expect(same_to_printed(rpd(vec({1, 2, 3, 4}), vec({1.1, 1.9, 3.2, 3.8})), 8.16497, 5));
    const auto a = vec({1, 2, 3, 4});
    expect(same_to_printed(rpd(a, (a.array() + sample_sd(a)).matrix()), 1.0, 12));
    expect(error_histogram(vec({0, 0, 0}), vec({10, 60, 120})) == ErrorHistogram{1, 1, 1});
    expect(error_histogram(Eigen::VectorXd::Zero(7), Eigen::VectorXd::Zero(7)) == ErrorHistogram{7, 0, 0});
    expect(error_histogram(vec({0, 0}), vec({50, 100})) == ErrorHistogram{1, 1, 0});

    SplitMix64 rng(1004);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto n = static_cast<Eigen::Index>(2 + rng.bounded(100));
        const auto act = oracle::random_vector(rng, n, 50.0, 400.0);
        const Eigen::VectorXd pred = act + oracle::random_vector(rng, n, -60.0, 60.0);
        worst = std::max(worst, std::abs(rpd(act, pred) * rmse(act, pred) - sample_sd(act)));
    }
    return {failed == 0 && worst < kIdentityTol,
            fmt("%.0f of 12 fixtures off; max |rpd*rmse - sd| = %.3g over 100 vectors", failed, worst)};
}

Outcome vwaa_dominance() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto d = prepare_data(generate_synthetic(300, seed), {}, seed);
        VwaaConfig cfg;
        cfg.seed = seed;
        cfg.population = 10;
        cfg.top_k = 3;
        cfg.max_iters = 15;
        const KernelParams params{0.15, 180};
        const auto r = optimize(d.train, d.val, params, cfg);
        const auto uniform = evaluate_weights(WeightVector::uniform(r.best_weights.names, cfg.w_min), d.train, d.val,
                                              params, cfg.lambda_kl);
        bool monotone = true;
        for (std::size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i] <= r.history[i - 1];
        ok = ok && r.best_fitness <= uniform.penalized && monotone;
        detail += fmt("seed %.0f: best %.4f vs uniform %.4f; ", static_cast<double>(seed), r.best_fitness,
                      uniform.penalized);
        if (!monotone) detail += "history not monotone; ";
    }
    return {ok, detail};
}

Outcome relevance_recovery() {
    const auto start = clock_type::now();
    GeneratorCoefficients zeroed;
    zeroed.mem = 0.0;
    zeroed.eff_mix = 0.0;
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto d = prepare_data(generate_synthetic(1500, seed, kDefaultNoiseSd, zeroed), {}, seed);
        VwaaConfig cfg;
        cfg.seed = seed;
        const auto r = optimize(d.train, d.val, KernelParams{}, cfg);
        const double cpu = r.best_weights.at("cpu_usage");
        const double noise = 0.5 * (r.best_weights.at("memory_usage") + r.best_weights.at("energy_efficiency"));
        if (cpu > noise) ++wins;
        detail += fmt("seed %.0f cpu %.3f vs zeroed %.3f; ", static_cast<double>(seed), cpu, noise);
    }
    const double secs = elapsed_s(start);
    return {wins >= kRelevanceMinSeeds && secs < kBudgetRelevance,
            detail + fmt("%.0f/5 seeds, %.1f s", wins, secs)};
}

Outcome end_to_end_quality() {
    const auto start = clock_type::now();
    const auto d = prepare_data(generate_synthetic(2000, 1, kDefaultNoiseSd), {}, 1);
    TrainOptions opts;
    opts.tune = true;
    opts.vwaa.seed = 1;
    const auto outcome = run_training(d, opts);
    const double secs = elapsed_s(start);
    const auto& test = outcome.report.splits.at(2);
    const double r2v = test.r2.value_or(-1.0);
    const double rpdv = test.rpd.value_or(0.0);
    return {r2v >= kQualityR2 && rpdv >= kQualityRpd && secs < kBudgetQuality,
            fmt("test R2 %.4f, RPD %.3f, ", r2v, rpdv) +
                fmt("gamma %.3g, C %.4g, ", outcome.model.params.gamma, outcome.model.params.c) + fmt("%.1f s", secs)};
}

Outcome grid_search_correctness() {
    const auto d = prepare_data(generate_synthetic(400, 7), {}, 7);
    const auto w = WeightVector::uniform(d.preprocessor.schema.feature_names());
    const auto r = grid_search(d.train, d.val, {}, w);
    // Exhaustive oracle over an independently computed surface.
    const auto surface = sensitivity_surface(d.train, d.val, {}, w);
    const SurfaceRow* best = nullptr;
    for (const auto& row : surface) {
        if (!row.rmse_val) continue;
        if (!best || *row.rmse_val < *best->rmse_val ||
            (*row.rmse_val == *best->rmse_val && std::make_pair(row.gamma, row.c) < std::make_pair(best->gamma, best->c)))
            best = &row;
    }
    const bool argmin_ok = best && best->gamma == r.best.gamma && best->c == r.best.c && *best->rmse_val == r.best_rmse;

    const SearchGrid tie_grid{{0.1, 0.2}, {10, 100}};
    const auto tie = grid_search(tie_grid, [](double g, double c) {
        return CellScore{(g == 0.2 && c == 100) ? 5.0 : (g == 0.1 && c == 10) ? 6.0 : 5.0, std::nullopt};
    });
    const bool tie_ok = tie.best.gamma == 0.1 && tie.best.c == 100;
    return {argmin_ok && tie_ok, fmt("argmin (%.3g, %.4g) rmse %.4f; ", r.best.gamma, r.best.c, r.best_rmse) +
                                     (tie_ok ? "tie fixture resolved to (0.1, 100)" : "tie fixture wrong")};
}

Outcome cli_determinism() {
    namespace fs = std::filesystem;
    const auto root = fs::temp_directory_path() / "vkelm_acceptance_det";
    fs::remove_all(root);
    std::ostringstream sink;
    const auto run = [&](const std::vector<std::string>& args) { return run_cli(args, sink, sink); };
    const auto data = (root / "data.csv").string();
    bool ok = run({"gen-data", "--rows", "400", "--seed", "11", "--out", data}) == 0;
    for (const char* dir : {"a", "b"})
        ok = ok && run({"train", "--data", data, "--seed", "11", "--iters", "20", "--out-dir", (root / dir).string()}) == 0;
    std::string detail;
    for (const char* f : {"model.json", "report.json"}) {
        const bool same = ok && read_text_file(root / "a" / f) == read_text_file(root / "b" / f);
        ok = ok && same;
        detail += std::string(f) + (same ? " identical; " : " differs; ");
    }
    fs::remove_all(root);
    return {ok, detail};
}

double median_ms_per_sample(const KelmModel& model, const Eigen::MatrixXd& queries) {
    std::vector<double> samples;
    for (int rep = 0; rep < 7; ++rep)
        samples.push_back(time_per_sample_ms(queries, 4000, [&](const Eigen::MatrixXd& row) { return predict(model, row); }));
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

Outcome inference_scaling() {
    const auto small = prepare_data(generate_synthetic(286, 21), {}, 21);   // 200 training rows
    const auto large = prepare_data(generate_synthetic(1429, 21), {}, 21);  // 1000 training rows
    const auto w = WeightVector::uniform(small.preprocessor.schema.feature_names());
    const auto m200 = train_kelm(small.train, {}, w);
    const auto m1000 = train_kelm(large.train, {}, w);
    const double t200 = median_ms_per_sample(m200, large.test.features);
    const double t1000 = median_ms_per_sample(m1000, large.test.features);
    const double ratio = t1000 / t200;
    return {m200.support_size() == 200 && m1000.support_size() == 1000 && ratio >= kScalingLo && ratio <= kScalingHi,
            fmt("%.4f ms at n=200, %.4f ms at n=1000, ratio %.2f", t200, t1000, ratio)};
}

Outcome early_stop() {
    VwaaConfig cfg;
    cfg.sigma0 = 0.0;
    cfg.patience = kPatience;
    // Improves 10% per iteration through iteration 4, flat afterwards.
    const FitnessFn plateau = [](const std::vector<double>&, std::size_t it) {
        const double f = 100.0 * std::pow(0.9, static_cast<double>(std::min<std::size_t>(it, 4)));
        return FitnessValue{f, f};
    };
    const auto r = optimize({"a", "b", "c"}, cfg, plateau);
    const std::size_t last = r.trace.back().iteration;
    const std::size_t post_plateau = last - 4;
    return {r.stop_reason == StopReason::converged && post_plateau == kPatience,
            fmt("stopped at iteration %.0f, %.0f post-plateau iterations", static_cast<double>(last),
                static_cast<double>(post_plateau)) +
                ", reason " + to_string(r.stop_reason)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"solver matches explicit-inverse oracle", solver_oracle},
        {"interpolation limit and monotone regularization", interpolation_limit},
        {"feature weights equal column pre-scaling", prescaling_equivalence},
        {"metric fixtures and rpd identity", metric_fixtures},
        {"weight search dominates uniform weights", vwaa_dominance},
        {"relevant feature outweighs zeroed features", relevance_recovery},
        {"end-to-end test quality", end_to_end_quality},
        {"grid search argmin and tie rule", grid_search_correctness},
        {"train output is byte-identical across runs", cli_determinism},
        {"per-sample inference grows linearly with support size", inference_scaling},
        {"early stop after patience flat iterations", early_stop},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
        std::printf("%s  %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
