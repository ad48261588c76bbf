#include "vkelm/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <sstream>

#include "vkelm/baselines.hpp"
#include "vkelm/error.hpp"

namespace vkelm {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

namespace {

Dataset encode_split(const std::vector<RawRecord>& records, const std::vector<std::size_t>& index,
                     const FittedPreprocessor& prep, std::size_t window_len) {
    auto ds = preprocess_apply(records, prep.schema, prep.stats);
    for (auto& id : ds.row_ids) id = index[id];
    return make_windows(ds, window_len);
}

}  // namespace

PreparedData prepare_data(const std::vector<RawRecord>& records, const SplitRatios& ratios,
                          std::uint64_t seed, std::size_t window_len) {
    if (window_len == 0) throw InputError("window length must be >= 1");
    PreparedData out;
    for (const auto& r : records)
        if (r.power_w) out.records.push_back(r);

    out.split = split_dataset(out.records, ratios, seed, window_len == 1);
    out.preprocessor = preprocess_fit(out.split.train);
    out.preprocessor.schema.window_len = window_len;

    const auto& prep = out.preprocessor;
    out.train = encode_split(out.split.train, out.split.train_index, prep, window_len);
    out.val = encode_split(out.split.val, out.split.val_index, prep, window_len);
    out.test = encode_split(out.split.test, out.split.test_index, prep, window_len);
    return out;
}

Dataset encode_for_model(const std::vector<RawRecord>& records, const KelmModel& model) {
    const auto ds = preprocess_apply(records, model.schema, model.stats);
    return make_windows(ds, model.schema.window_len);
}

TrainOutcome run_training(const PreparedData& data, const TrainOptions& options) {
    using clock = std::chrono::steady_clock;
    const auto seconds = [](clock::time_point start) {
        return std::chrono::duration<double>(clock::now() - start).count();
    };

    TrainOutcome outcome;
    Timings timings;
    const auto names = data.preprocessor.schema.feature_names();
    KernelParams params = options.params;
    params.validate();

    if (options.tune) {
        const auto start = clock::now();
        outcome.grid = grid_search(data.train, data.val, options.grid,
                                   WeightVector::uniform(names, options.vwaa.w_min));
        params = outcome.grid->best;
        timings.grid_search_s = seconds(start);
    }

    WeightVector weights = WeightVector::uniform(names, options.vwaa.w_min);
    if (options.use_vwaa) {
        const auto start = clock::now();
        outcome.vwaa = optimize(data.train, data.val, params, options.vwaa);
        weights = outcome.vwaa->best_weights;
        timings.vwaa_s = seconds(start);
    }

    // Lower weights shrink kernel distances, which moves the best gamma.
    if (options.tune && options.use_vwaa && options.retune_after_vwaa) {
        const auto start = clock::now();
        outcome.pre_grid = std::move(outcome.grid);
        outcome.grid = grid_search(data.train, data.val, options.grid, weights);
        params = outcome.grid->best;
        *timings.grid_search_s += seconds(start);
    }

    const auto start = clock::now();
    outcome.model = train_kelm(data.train, params, weights);
    timings.train_s = seconds(start);
    outcome.model.schema = data.preprocessor.schema;
    outcome.model.stats = data.preprocessor.stats;

    timings.infer_ms_per_sample = time_per_sample_ms(
        data.test.features, options.timing_calls,
        [&](const Eigen::MatrixXd& row) { return predict(outcome.model, row); });

    outcome.report = build_report(outcome.model,
                                  {{"train", &data.train}, {"val", &data.val}, {"test", &data.test}},
                                  timings);
    if (outcome.vwaa) {
        outcome.report.history = outcome.vwaa->history;
        outcome.report.stop_reason = to_string(outcome.vwaa->stop_reason);
    }
    return outcome;
}

}  // namespace vkelm
