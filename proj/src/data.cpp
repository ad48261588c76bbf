#include "vkelm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vkelm/error.hpp"
#include "vkelm/random.hpp"

namespace vkelm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool numeric_in_range(std::size_t feature, double v) {
    switch (feature) {
        case 0:
        case 1:
            return v >= 0.0 && v <= 100.0;
        case 5:
            return v >= 0.0 && v <= 1.0;
        default:
            return v >= 0.0;
    }
}

std::size_t checked_floor(std::size_t n, double ratio) {
    // The epsilon absorbs representation error such as 100 * 0.7 = 69.999...
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
}

}  // namespace

bool ParsedCsv::has_column(std::string_view name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

ParsedCsv parse_csv(std::string_view text) {
    ParsedCsv out;

    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        if (!trim(line).empty()) lines.push_back(line);
        pos = nl + 1;
    }
    if (lines.empty()) throw InputError("empty CSV input: a header row is required");

    const auto header = split_fields(lines.front());
    std::map<std::string, std::size_t, std::less<>> index_of;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name(header[i]);
        if (!index_of.emplace(name, i).second)
            throw InputError("duplicate column '" + name + "' in CSV header");
        out.columns.push_back(name);
    }

    std::array<std::optional<std::size_t>, kNumericFeatures.size()> numeric_col{};
    for (std::size_t f = 0; f < kNumericFeatures.size(); ++f) {
        const auto it = index_of.find(kNumericFeatures[f]);
        if (it == index_of.end()) throw SchemaError(std::string(kNumericFeatures[f]));
        numeric_col[f] = it->second;
    }
    std::array<std::optional<std::size_t>, kCategoricalFeatures.size()> cat_col{};
    for (std::size_t f = 0; f < kCategoricalFeatures.size(); ++f) {
        if (const auto it = index_of.find(kCategoricalFeatures[f]); it != index_of.end())
            cat_col[f] = it->second;
    }
    std::optional<std::size_t> target_col;
    if (const auto it = index_of.find(kTargetColumn); it != index_of.end()) target_col = it->second;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto fields = split_fields(lines[li]);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << "line " << li + 1 << ": expected " << header.size() << " fields, found "
                << fields.size();
            throw InputError(msg.str());
        }

        RawRecord rec;
        if (target_col) {
            const auto raw = fields[*target_col];
            if (!raw.empty()) {
                const auto v = parse_number(raw);
                if (!v || *v <= 0.0) {
                    ++out.rejected_rows;
                    continue;
                }
                rec.power_w = v;
            }
        }
        for (std::size_t f = 0; f < kNumericFeatures.size(); ++f) {
            const auto v = parse_number(fields[*numeric_col[f]]);
            if (v && numeric_in_range(f, *v)) rec.numeric[f] = v;
        }
        for (std::size_t f = 0; f < kCategoricalFeatures.size(); ++f) {
            if (!cat_col[f]) continue;
            const auto raw = fields[*cat_col[f]];
            if (!raw.empty()) rec.categorical[f] = std::string(raw);
        }
        out.records.push_back(std::move(rec));
        out.source_rows.push_back(li - 1);
    }
    return out;
}

std::vector<RawRecord> parse_records(std::string_view text) {
    return parse_csv(text).records;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string write_records(const std::vector<RawRecord>& records) {
    std::string out;
    for (const auto name : kNumericFeatures) {
        out += name;
        out += ',';
    }
    for (const auto name : kCategoricalFeatures) {
        out += name;
        out += ',';
    }
    out += kTargetColumn;
    out += '\n';

    for (const auto& rec : records) {
        for (const auto& v : rec.numeric) {
            if (v) out += format_double(*v);
            out += ',';
        }
        for (const auto& c : rec.categorical) {
            if (c) out += *c;
            out += ',';
        }
        if (rec.power_w) out += format_double(*rec.power_w);
        out += '\n';
    }
    return out;
}

std::vector<std::string> Schema::feature_names() const {
    std::vector<std::string> out = numeric_features;
    out.insert(out.end(), categorical_features.begin(), categorical_features.end());
    return out;
}

std::vector<std::string> Schema::encoded_columns() const {
    std::vector<std::string> out = numeric_features;
    for (std::size_t c = 0; c < categorical_features.size(); ++c)
        for (const auto& level : category_levels[c])
            out.push_back(categorical_features[c] + "=" + level);
    return out;
}

std::vector<std::string> Schema::encoded_origin() const {
    std::vector<std::string> out = numeric_features;
    for (std::size_t c = 0; c < categorical_features.size(); ++c)
        out.insert(out.end(), category_levels[c].size(), categorical_features[c]);
    return out;
}

bool Dataset::has_targets() const {
    return targets.size() > 0 && targets.allFinite();
}

FittedPreprocessor preprocess_fit(const std::vector<RawRecord>& training) {
    const auto with_target = std::count_if(training.begin(), training.end(),
                                           [](const RawRecord& r) { return r.power_w.has_value(); });
    if (with_target < 2)
        throw FitError("preprocessing needs at least 2 training records with a target, got " +
                       std::to_string(with_target));

    FittedPreprocessor fit;
    auto& schema = fit.schema;
    auto& stats = fit.stats;

    for (std::size_t f = 0; f < kNumericFeatures.size(); ++f) {
        std::vector<double> observed;
        observed.reserve(training.size());
        for (const auto& r : training)
            if (r.numeric[f]) observed.push_back(*r.numeric[f]);
        if (observed.empty())
            throw FitError("feature '" + std::string(kNumericFeatures[f]) +
                           "' has no observed values in the training split");

        std::sort(observed.begin(), observed.end());
        const auto m = observed.size();
        const double median =
            m % 2 == 1 ? observed[m / 2] : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);

        schema.numeric_features.emplace_back(kNumericFeatures[f]);
        stats.min.push_back(observed.front());
        stats.max.push_back(observed.back());
        stats.median.push_back(median);
    }

    for (std::size_t f = 0; f < kCategoricalFeatures.size(); ++f) {
        std::vector<std::string> levels;
        std::vector<std::size_t> counts;
        for (const auto& r : training) {
            if (!r.categorical[f]) continue;
            const auto& v = *r.categorical[f];
            const auto it = std::find(levels.begin(), levels.end(), v);
            if (it == levels.end()) {
                levels.push_back(v);
                counts.push_back(1);
            } else {
                ++counts[static_cast<std::size_t>(it - levels.begin())];
            }
        }
        if (levels.empty()) continue;
        // max_element returns the first maximum, i.e. the first-seen level on ties.
        const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
        schema.categorical_features.emplace_back(kCategoricalFeatures[f]);
        stats.mode.push_back(levels[static_cast<std::size_t>(best)]);
        schema.category_levels.push_back(std::move(levels));
    }
    return fit;
}

Dataset preprocess_apply(const std::vector<RawRecord>& records, const Schema& schema,
                         const PreprocessStats& stats) {
    Dataset ds;
    ds.column_names = schema.encoded_columns();
    ds.origin_feature = schema.encoded_origin();
    const auto n = static_cast<Eigen::Index>(records.size());
    const auto d = static_cast<Eigen::Index>(ds.column_names.size());
    ds.features = Eigen::MatrixXd::Zero(n, d);
    ds.targets = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    ds.row_ids.resize(records.size());
    std::iota(ds.row_ids.begin(), ds.row_ids.end(), std::size_t{0});

    // Schema features are matched to record slots by name.
    std::vector<std::size_t> numeric_slot;
    for (const auto& name : schema.numeric_features)
        numeric_slot.push_back(static_cast<std::size_t>(
            std::find(kNumericFeatures.begin(), kNumericFeatures.end(), name) -
            kNumericFeatures.begin()));
    std::vector<std::size_t> cat_slot;
    for (const auto& name : schema.categorical_features)
        cat_slot.push_back(static_cast<std::size_t>(
            std::find(kCategoricalFeatures.begin(), kCategoricalFeatures.end(), name) -
            kCategoricalFeatures.begin()));

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& rec = records[static_cast<std::size_t>(i)];
        Eigen::Index col = 0;
        for (std::size_t f = 0; f < numeric_slot.size(); ++f, ++col) {
            const double v = rec.numeric[numeric_slot[f]].value_or(stats.median[f]);
            ds.features(i, col) =
                stats.is_constant(f) ? 0.0 : (v - stats.min[f]) / (stats.max[f] - stats.min[f]);
        }
        for (std::size_t c = 0; c < cat_slot.size(); ++c) {
            const auto& levels = schema.category_levels[c];
            const auto& value = rec.categorical[cat_slot[c]] ? *rec.categorical[cat_slot[c]]
                                                             : stats.mode[c];
            const auto it = std::find(levels.begin(), levels.end(), value);
            if (it != levels.end()) ds.features(i, col + (it - levels.begin())) = 1.0;
            col += static_cast<Eigen::Index>(levels.size());
        }
        if (rec.power_w) ds.targets(i) = *rec.power_w;
    }
    return ds;
}

Split split_dataset(const std::vector<RawRecord>& records, const SplitRatios& ratios,
                    std::uint64_t seed, bool shuffle) {
    if (!(ratios.train > 0.0 && ratios.val > 0.0 && ratios.test > 0.0))
        throw InputError("split ratios must all be positive");
    if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw InputError("split ratios must sum to 1");

    const auto n = records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle && n > 1) {
        SplitMix64 rng(seed);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.bounded(i + 1)]);
    }

    const auto n_train = checked_floor(n, ratios.train);
    const auto n_val = checked_floor(n, ratios.val);
    const auto n_test = n - std::min(n, n_train + n_val);
    const auto require = [n](std::size_t size, const char* which) {
        if (size == 0)
            throw InputError(std::string("split leaves the ") + which + " set empty (n=" +
                             std::to_string(n) + "); provide more rows");
    };
    require(n_train, "training");
    require(n_val, "validation");
    require(n_test, "test");

    Split out;
    for (std::size_t k = 0; k < n; ++k) {
        const auto idx = order[k];
        if (k < n_train) {
            out.train.push_back(records[idx]);
            out.train_index.push_back(idx);
        } else if (k < n_train + n_val) {
            out.val.push_back(records[idx]);
            out.val_index.push_back(idx);
        } else {
            out.test.push_back(records[idx]);
            out.test_index.push_back(idx);
        }
    }
    return out;
}

Dataset make_windows(const Dataset& dataset, std::size_t window_len) {
    if (window_len == 0) throw std::invalid_argument("make_windows: window_len must be >= 1");
    const auto n = dataset.rows();
    if (n < window_len)
        throw InputError("window length " + std::to_string(window_len) + " exceeds the " +
                         std::to_string(n) + " available rows");
    if (window_len == 1) return dataset;

    const auto d = dataset.cols();
    const auto out_rows = n - window_len + 1;

    Dataset out;
    for (std::size_t step = 0; step < window_len; ++step) {
        const auto lag = window_len - 1 - step;
        for (std::size_t j = 0; j < d; ++j) {
            out.column_names.push_back(dataset.column_names[j] + "@t-" + std::to_string(lag));
            out.origin_feature.push_back(dataset.origin_feature[j]);
        }
    }
    out.features.resize(static_cast<Eigen::Index>(out_rows),
                        static_cast<Eigen::Index>(d * window_len));
    out.targets.resize(static_cast<Eigen::Index>(out_rows));
    for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t step = 0; step < window_len; ++step)
            out.features.block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(step * d),
                               1, static_cast<Eigen::Index>(d)) =
                dataset.features.row(static_cast<Eigen::Index>(r + step));
        const auto last = r + window_len - 1;
        out.targets(static_cast<Eigen::Index>(r)) = dataset.targets(static_cast<Eigen::Index>(last));
        out.row_ids.push_back(dataset.row_ids.empty() ? last : dataset.row_ids[last]);
    }
    return out;
}

double synthetic_power(const LatentDraw& u, const GeneratorCoefficients& coef) {
    return coef.base + coef.cpu * u.u_cpu + coef.mem * u.u_mem +
           coef.net * u.u_net * (1.0 - coef.eff_mix * u.u_eff) +
           coef.interaction * std::sin(2.0 * std::numbers::pi * u.u_cpu) * u.u_net;
}

std::vector<RawRecord> generate_synthetic(std::size_t n, std::uint64_t seed, double noise_sd,
                                          const GeneratorCoefficients& coef) {
    if (n == 0) throw std::invalid_argument("generate_synthetic: n must be >= 1");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("generate_synthetic: noise_sd must be >= 0");

    static constexpr std::array<const char*, 3> kTypes = {"compute", "io", "network"};
    static constexpr std::array<const char*, 3> kPriorities = {"low", "mid", "high"};
    static constexpr std::array<const char*, 2> kStatuses = {"completed", "failed"};

    SplitMix64 rng(seed);
    std::vector<RawRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LatentDraw u{};
        u.u_cpu = rng.uniform01();
        u.u_mem = rng.uniform01();
        u.u_net = rng.uniform01();
        u.u_eff = rng.uniform01();
        const auto instructions = rng.uniform_int(1000, 10000);
        const double exec_ms = rng.uniform(10.0, 100.0);

        RawRecord rec;
        rec.numeric[0] = 100.0 * u.u_cpu;
        rec.numeric[1] = 100.0 * u.u_mem;
        rec.numeric[2] = 100.0 + 900.0 * u.u_net;
        rec.numeric[3] = static_cast<double>(instructions);
        rec.numeric[4] = exec_ms;
        rec.numeric[5] = u.u_eff;
        rec.categorical[0] = kTypes[rng.bounded(kTypes.size())];
        rec.categorical[1] = kPriorities[rng.bounded(kPriorities.size())];
        rec.categorical[2] = kStatuses[rng.bounded(kStatuses.size())];

        const double noise = rng.normal(0.0, 1.0) * noise_sd;
        rec.power_w = synthetic_power(u, coef) + noise;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace vkelm
