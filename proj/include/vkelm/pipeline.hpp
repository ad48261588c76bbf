#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vkelm/data.hpp"
#include "vkelm/kernel_model.hpp"
#include "vkelm/metrics.hpp"
#include "vkelm/tuning.hpp"
#include "vkelm/vwaa_optimizer.hpp"

namespace vkelm {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Records split, preprocessed with training statistics, and windowed.
struct PreparedData {
    std::vector<RawRecord> records;  // input rows that carry a target
    Split split;
    FittedPreprocessor preprocessor;
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Drops rows without a target, splits, fits preprocessing on the training
/// split and encodes all three. With window_len > 1 the split is contiguous
/// in row order (no shuffle) so each split stays a time series.
PreparedData prepare_data(const std::vector<RawRecord>& records, const SplitRatios& ratios,
                          std::uint64_t seed, std::size_t window_len = 1);

/// Encodes records with a trained model's schema and statistics.
Dataset encode_for_model(const std::vector<RawRecord>& records, const KelmModel& model);

struct TrainOptions {
    KernelParams params;
    bool tune = false;
    // With tune and use_vwaa: search (gamma, c) again at the optimized weights.
    bool retune_after_vwaa = true;
    SearchGrid grid;
    bool use_vwaa = true;
    VwaaConfig vwaa;
    std::size_t timing_calls = 1000;
};

struct TrainOutcome {
    KelmModel model;
    EvaluationReport report;
    std::optional<VwaaResult> vwaa;
    std::optional<GridSearchResult> grid;     // search that fixed the final (gamma, c)
    std::optional<GridSearchResult> pre_grid; // uniform-weight search preceding the weight search
};

/// Optional grid search over (gamma, c) with all-ones weights, then optional
/// weight search at the chosen parameters, then (when both ran) a second grid
/// search at the optimized weights, then the final fit on the training split
/// and evaluation on all three splits.
TrainOutcome run_training(const PreparedData& data, const TrainOptions& options);

}  // namespace vkelm
