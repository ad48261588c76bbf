#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace vkelm {

// Canonical column order of the telemetry CSV.
inline constexpr std::array<std::string_view, 6> kNumericFeatures = {
    "cpu_usage",       "memory_usage",   "network_traffic", "num_executed_instructions",
    "execution_time",  "energy_efficiency"};
inline constexpr std::array<std::string_view, 3> kCategoricalFeatures = {
    "task_type", "task_priority", "task_status"};
inline constexpr std::string_view kTargetColumn = "power_consumption";

/// One telemetry row. Missing values are std::nullopt.
struct RawRecord {
    std::array<std::optional<double>, kNumericFeatures.size()> numeric{};
    std::array<std::optional<std::string>, kCategoricalFeatures.size()> categorical{};
    std::optional<double> power_w;

    std::optional<double>& cpu_usage() { return numeric[0]; }
    const std::optional<double>& cpu_usage() const { return numeric[0]; }

    bool operator==(const RawRecord&) const = default;
};

struct ParsedCsv {
    std::vector<RawRecord> records;
    // Row index (0-based, data rows only) in the source text of each record.
    std::vector<std::size_t> source_rows;
    std::vector<std::string> columns;
    std::size_t rejected_rows = 0;

    bool has_column(std::string_view name) const;
};

/// Parses telemetry CSV text. The six numeric columns are required; the
/// categorical and target columns may be absent. Unparseable or out-of-range
/// feature values become missing; rows whose target is present but invalid
/// are rejected. Throws InputError on an empty file, SchemaError on a missing
/// required column.
ParsedCsv parse_csv(std::string_view text);
std::vector<RawRecord> parse_records(std::string_view text);

/// Writes records with the full header. Floats use the shortest decimal
/// that round-trips.
std::string write_records(const std::vector<RawRecord>& records);

std::string format_double(double v);

struct Schema {
    std::vector<std::string> numeric_features;
    std::vector<std::string> categorical_features;
    std::vector<std::vector<std::string>> category_levels;
    std::string target = std::string(kTargetColumn);
    std::size_t window_len = 1;

    /// Original features in weight-group order (numerics then categoricals).
    std::vector<std::string> feature_names() const;
    /// Encoded column names and their originating feature, for one time step.
    std::vector<std::string> encoded_columns() const;
    std::vector<std::string> encoded_origin() const;

    bool operator==(const Schema&) const = default;
};

struct PreprocessStats {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<double> median;
    std::vector<std::string> mode;

    bool is_constant(std::size_t numeric_index) const {
        return max[numeric_index] == min[numeric_index];
    }

    bool operator==(const PreprocessStats&) const = default;
};

struct Dataset {
    std::vector<std::string> column_names;
    Eigen::MatrixXd features;
    // NaN for scoring-only rows without a target.
    Eigen::VectorXd targets;
    std::vector<std::string> origin_feature;
    // Source row each dataset row was built from (the last row of a window).
    std::vector<std::size_t> row_ids;

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
    bool has_targets() const;
};

struct FittedPreprocessor {
    Schema schema;
    PreprocessStats stats;
};

/// Computes schema and statistics from training records only. Categorical
/// features with no observed value are dropped from the schema.
FittedPreprocessor preprocess_fit(const std::vector<RawRecord>& training);

/// Imputes, one-hot encodes and min-max scales. Total for any input.
Dataset preprocess_apply(const std::vector<RawRecord>& records, const Schema& schema,
                         const PreprocessStats& stats);

struct SplitRatios {
    double train = 0.70;
    double val = 0.15;
    double test = 0.15;
};

struct Split {
    std::vector<RawRecord> train;
    std::vector<RawRecord> val;
    std::vector<RawRecord> test;
    // Positions in the input list, same order as the records above.
    std::vector<std::size_t> train_index;
    std::vector<std::size_t> val_index;
    std::vector<std::size_t> test_index;
};

/// Seeded Fisher-Yates shuffle (SplitMix64, j = bounded(i + 1) for
/// i = n-1 .. 1), then floor(n*train), floor(n*val), remainder to test.
/// With shuffle == false the partition is contiguous in input order.
Split split_dataset(const std::vector<RawRecord>& records, const SplitRatios& ratios,
                    std::uint64_t seed, bool shuffle = true);

/// Sliding windows over time-ordered rows: output row r concatenates input
/// rows r .. r + window_len - 1 (oldest first) and takes the last row's target.
Dataset make_windows(const Dataset& dataset, std::size_t window_len);

/// Coefficients of the synthetic power model
///   power = base + cpu*u_cpu + mem*u_mem + net*u_net*(1 - eff_mix*u_eff)
///         + interaction*sin(2*pi*u_cpu)*u_net + noise
struct GeneratorCoefficients {
    double base = 90.0;
    double cpu = 120.0;
    double mem = 60.0;
    double net = 90.0;
    double eff_mix = 1.0;
    double interaction = 40.0;
};

inline constexpr double kDefaultNoiseSd = 8.0;

/// Latent uniforms of one generated row.
struct LatentDraw {
    double u_cpu, u_mem, u_net, u_eff;
};

double synthetic_power(const LatentDraw& u, const GeneratorCoefficients& coef = {});

/// Deterministic synthetic telemetry. Per row, draws in this order:
/// u_cpu, u_mem, u_net, u_eff, instructions, execution time, task_type,
/// task_priority, task_status, noise.
std::vector<RawRecord> generate_synthetic(std::size_t n, std::uint64_t seed,
                                          double noise_sd = kDefaultNoiseSd,
                                          const GeneratorCoefficients& coef = {});

}  // namespace vkelm
