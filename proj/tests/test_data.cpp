#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "vkelm/data.hpp"
#include "vkelm/error.hpp"
#include "vkelm/random.hpp"

using namespace vkelm;

namespace {

const std::string kHeader =
    "cpu_usage,memory_usage,network_traffic,num_executed_instructions,execution_time,"
    "energy_efficiency,power_consumption\n";

// Ten sample telemetry rows.
const std::string kSampleRows =
    "54.88,78.95,164.78,7527.00,69.35,0.55,287.81\n"
    "43.76,22.46,429.14,9008.00,60.15,0.46,272.96\n"
    "38.34,16.44,779.79,2989.00,42.16,0.14,382.76\n"
    "79.17,2.97,926.37,8644.00,55.70,0.78,173.56\n"
    "56.80,2.36,722.55,9788.00,79.70,0.94,143.34\n"
    "7.10,96.52,919.17,9117.00,39.97,0.85,275.63\n"
    "2.02,89.34,208.42,1224.00,61.85,0.70,199.26\n"
    "11.83,17.49,433.68,1147.00,12.59,0.11,214.91\n"
    "41.47,74.77,757.37,1183.00,77.19,0.42,96.01\n"
    "61.69,0.67,686.37,6006.00,99.54,0.99,154.89\n";

RawRecord numeric_record(double cpu, double power) {
    RawRecord r;
    r.numeric = {cpu, 50.0, 500.0, 5000.0, 50.0, 0.5};
    r.power_w = power;
    return r;
}

}  // namespace

TEST_SUITE("data.parse") {
    TEST_CASE("parses a sample row") {
        const auto records = parse_records(kHeader + "54.88,78.95,164.78,7527.00,69.35,0.55,287.81\n");
        REQUIRE(records.size() == 1);
        const auto& r = records[0];
        CHECK(*r.numeric[0] == 54.88);
        CHECK(*r.numeric[1] == 78.95);
        CHECK(*r.numeric[2] == 164.78);
        CHECK(*r.numeric[3] == 7527.0);
        CHECK(*r.numeric[4] == 69.35);
        CHECK(*r.numeric[5] == 0.55);
        CHECK(*r.power_w == 287.81);
        CHECK_FALSE(r.categorical[0].has_value());
    }

    TEST_CASE("header with no rows gives an empty list") {
        CHECK(parse_records(kHeader).empty());
    }

    TEST_CASE("bad feature value is marked missing and the row kept") {
        const auto records = parse_records(kHeader + "abc,78.95,164.78,7527,69.35,0.55,287.81\n");
        REQUIRE(records.size() == 1);
        CHECK_FALSE(records[0].numeric[0].has_value());
        CHECK(records[0].numeric[1].has_value());
    }

    TEST_CASE("out-of-range percent is treated as missing") {
        const auto records = parse_records(kHeader + "120,78.95,164.78,7527,69.35,1.5,287.81\n");
        REQUIRE(records.size() == 1);
        CHECK_FALSE(records[0].numeric[0].has_value());
        CHECK_FALSE(records[0].numeric[5].has_value());
    }

    TEST_CASE("unparseable target rejects the row, empty target keeps it") {
        const auto parsed = parse_csv(kHeader + "1,2,3,4,5,0.5,abc\n1,2,3,4,5,0.5,\n1,2,3,4,5,0.5,100\n");
        CHECK(parsed.rejected_rows == 1);
        REQUIRE(parsed.records.size() == 2);
        CHECK_FALSE(parsed.records[0].power_w.has_value());
        CHECK(*parsed.records[1].power_w == 100.0);
        CHECK(parsed.source_rows == std::vector<std::size_t>{1, 2});
    }

    TEST_CASE("missing required column names the column") {
        try {
            parse_records("cpu_usage,memory_usage,network_traffic,execution_time,energy_efficiency\n");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.column() == "num_executed_instructions");
        }
    }

    TEST_CASE("empty input is an input error") {
        CHECK_THROWS_AS(parse_records(""), InputError);
        CHECK_THROWS_AS(parse_records("\n\n"), InputError);
    }

    TEST_CASE("ragged row is an input error") {
        CHECK_THROWS_AS(parse_records(kHeader + "1,2,3\n"), InputError);
    }

    TEST_CASE("categoricals and target are optional columns") {
        const auto parsed = parse_csv(
            "task_type,cpu_usage,memory_usage,network_traffic,num_executed_instructions,execution_time,"
            "energy_efficiency\r\nio,1,2,3,4,5,0.5\r\n");
        REQUIRE(parsed.records.size() == 1);
        CHECK(*parsed.records[0].categorical[0] == "io");
        CHECK_FALSE(parsed.records[0].power_w.has_value());
        CHECK(parsed.has_column("task_type"));
        CHECK_FALSE(parsed.has_column("power_consumption"));
    }

    TEST_CASE("write then parse round-trips generated records exactly") {
        const auto records = generate_synthetic(200, 5);
        const auto text = write_records(records);
        CHECK(parse_records(text) == records);
        CHECK(write_records(parse_records(text)) == text);
    }

    TEST_CASE("values with up to six decimals round-trip") {
        std::vector<RawRecord> records;
        for (int i = 0; i < 50; ++i) {
            RawRecord r = numeric_record(i * 1.234567, 100.0 + i * 0.000001);
            r.numeric[5] = i / 50.0;
            r.categorical[1] = "mid";
            records.push_back(r);
        }
        CHECK(parse_records(write_records(records)) == records);
    }
}

TEST_SUITE("data.preprocess") {
    TEST_CASE("min-max statistics come from training values") {
        const auto fit = preprocess_fit({numeric_record(0.0, 100.0), numeric_record(100.0, 120.0)});
        CHECK(fit.stats.min[0] == 0.0);
        CHECK(fit.stats.max[0] == 100.0);
        CHECK(fit.schema.numeric_features ==
              std::vector<std::string>{"cpu_usage", "memory_usage", "network_traffic",
                                       "num_executed_instructions", "execution_time", "energy_efficiency"});
        CHECK(fit.stats.is_constant(1));
    }

    TEST_CASE("categorical levels in first-seen order with mode") {
        std::vector<RawRecord> recs(3, numeric_record(1.0, 100.0));
        recs[0].categorical[0] = "A";
        recs[1].categorical[0] = "B";
        recs[2].categorical[0] = "A";
        const auto fit = preprocess_fit(recs);
        REQUIRE(fit.schema.categorical_features == std::vector<std::string>{"task_type"});
        CHECK(fit.schema.category_levels[0] == std::vector<std::string>{"A", "B"});
        CHECK(fit.stats.mode[0] == "A");
    }

    TEST_CASE("median imputation value ignores missing entries") {
        std::vector<RawRecord> recs = {numeric_record(10, 100), numeric_record(30, 110), numeric_record(50, 120),
                                       numeric_record(0, 130)};
        recs[3].numeric[0].reset();
        const auto fit = preprocess_fit(recs);
        CHECK(fit.stats.median[0] == 30.0);

        const auto ds = preprocess_apply(recs, fit.schema, fit.stats);
        CHECK(ds.features(3, 0) == doctest::Approx((30.0 - 10.0) / 40.0));
    }

    TEST_CASE("feature with no observed values fails naming it") {
        std::vector<RawRecord> recs = {numeric_record(1, 100), numeric_record(2, 110)};
        for (auto& r : recs) r.numeric[2].reset();
        try {
            preprocess_fit(recs);
            FAIL("expected FitError");
        } catch (const FitError& e) {
            CHECK(std::string(e.what()).find("network_traffic") != std::string::npos);
        }
    }

    TEST_CASE("fewer than two targets is a fit error") {
        RawRecord unlabeled = numeric_record(1, 1);
        unlabeled.power_w.reset();
        CHECK_THROWS_AS(preprocess_fit({numeric_record(1, 100), unlabeled}), FitError);
    }

    TEST_CASE("scaling endpoints and a mid-range cpu value") {
        const auto records = parse_records(kHeader + kSampleRows);
        const auto fit = preprocess_fit(records);
        CHECK(fit.stats.min[0] == 2.02);
        CHECK(fit.stats.max[0] == 79.17);
        const auto ds = preprocess_apply(records, fit.schema, fit.stats);
        // (54.88 - 2.02) / (79.17 - 2.02), computed independently.
        CHECK(ds.features(0, 0) == doctest::Approx(0.6851587815942968).epsilon(1e-12));
        CHECK(ds.features(6, 0) == 0.0);
        CHECK(ds.features(3, 0) == 1.0);
    }

    TEST_CASE("unseen level encodes as all zeros for that feature") {
        std::vector<RawRecord> recs(2, numeric_record(1.0, 100.0));
        recs[0].categorical[1] = "low";
        recs[1].categorical[1] = "high";
        const auto fit = preprocess_fit(recs);
        RawRecord query = numeric_record(1.0, 100.0);
        query.categorical[1] = "urgent";
        const auto ds = preprocess_apply({query}, fit.schema, fit.stats);
        REQUIRE(ds.cols() == 8);
        CHECK(ds.features(0, 6) == 0.0);
        CHECK(ds.features(0, 7) == 0.0);
        CHECK(ds.origin_feature[6] == "task_priority");
        CHECK(ds.origin_feature[7] == "task_priority");
        CHECK(ds.column_names[6] == "task_priority=low");
    }

    TEST_CASE("missing categorical takes the training mode") {
        std::vector<RawRecord> recs(3, numeric_record(1.0, 100.0));
        recs[0].categorical[2] = "failed";
        recs[1].categorical[2] = "completed";
        recs[2].categorical[2] = "completed";
        const auto fit = preprocess_fit(recs);
        const auto ds = preprocess_apply({numeric_record(1.0, 100.0)}, fit.schema, fit.stats);
        CHECK(ds.features(0, 6) == 0.0);
        CHECK(ds.features(0, 7) == 1.0);
    }

    TEST_CASE("training columns span exactly [0, 1]") {
        const auto records = generate_synthetic(300, 9);
        const auto fit = preprocess_fit(records);
        const auto ds = preprocess_apply(records, fit.schema, fit.stats);
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(fit.schema.numeric_features.size()); ++j) {
            CHECK(ds.features.col(j).minCoeff() == 0.0);
            CHECK(ds.features.col(j).maxCoeff() == 1.0);
        }
        CHECK(ds.features.minCoeff() >= 0.0);
        CHECK(ds.features.maxCoeff() <= 1.0);
        CHECK(ds.targets.size() == ds.features.rows());
    }
}

TEST_SUITE("data.split") {
    TEST_CASE("70/15/15 sizes") {
        const auto records = generate_synthetic(100, 1);
        const auto s = split_dataset(records, {0.70, 0.15, 0.15}, 42);
        CHECK(s.train.size() == 70);
        CHECK(s.val.size() == 15);
        CHECK(s.test.size() == 15);
    }

    TEST_CASE("too few rows leaves validation empty") {
        const auto records = generate_synthetic(3, 1);
        CHECK_THROWS_AS(split_dataset(records, {0.70, 0.15, 0.15}, 42), InputError);
    }

    TEST_CASE("ratios must be positive and sum to one") {
        const auto records = generate_synthetic(100, 1);
        CHECK_THROWS_AS(split_dataset(records, {0.7, 0.2, 0.2}, 1), InputError);
        CHECK_THROWS_AS(split_dataset(records, {1.0, 0.0, 0.0}, 1), InputError);
    }

    TEST_CASE("same seed gives the same partition") {
        const auto records = generate_synthetic(20, 3);
        const auto a = split_dataset(records, {0.5, 0.25, 0.25}, 42);
        const auto b = split_dataset(records, {0.5, 0.25, 0.25}, 42);
        CHECK(a.train_index == b.train_index);
        CHECK(a.val_index == b.val_index);
        CHECK(a.test_index == b.test_index);
        const auto c = split_dataset(records, {0.5, 0.25, 0.25}, 43);
        CHECK(c.train_index != a.train_index);
    }

    TEST_CASE("split is a partition of the input") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto n = 37 + seed * 11;
            const auto records = generate_synthetic(n, seed);
            const auto s = split_dataset(records, {0.6, 0.2, 0.2}, seed);
            std::vector<std::size_t> all = s.train_index;
            all.insert(all.end(), s.val_index.begin(), s.val_index.end());
            all.insert(all.end(), s.test_index.begin(), s.test_index.end());
            std::sort(all.begin(), all.end());
            std::vector<std::size_t> expected(n);
            for (std::size_t i = 0; i < n; ++i) expected[i] = i;
            CHECK(all == expected);
            for (std::size_t k = 0; k < s.train.size(); ++k) CHECK(s.train[k] == records[s.train_index[k]]);
        }
    }

    TEST_CASE("unshuffled split keeps row order") {
        const auto records = generate_synthetic(20, 3);
        const auto s = split_dataset(records, {0.5, 0.25, 0.25}, 42, false);
        CHECK(s.train_index.front() == 0);
        CHECK(s.train_index.back() == 9);
        CHECK(s.test_index.back() == 19);
    }
}

TEST_SUITE("data.windows") {
    Dataset sequence(std::size_t n, std::size_t d) {
        Dataset ds;
        ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
        ds.targets.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 10.0 * i + j;
            ds.targets(static_cast<Eigen::Index>(i)) = 100.0 + i;
            ds.row_ids.push_back(i);
        }
        for (std::size_t j = 0; j < d; ++j) {
            ds.column_names.push_back("f" + std::to_string(j));
            ds.origin_feature.push_back("g" + std::to_string(j));
        }
        return ds;
    }

    TEST_CASE("window of one is the identity") {
        const auto ds = sequence(6, 2);
        const auto w = make_windows(ds, 1);
        CHECK(w.features == ds.features);
        CHECK(w.targets == ds.targets);
        CHECK(w.column_names == ds.column_names);
    }

    TEST_CASE("twelve rows, window twelve") {
        const auto w = make_windows(sequence(12, 3), 12);
        CHECK(w.rows() == 1);
        CHECK(w.cols() == 36);
        CHECK(w.targets(0) == 111.0);
    }

    TEST_CASE("five rows, window three") {
        const auto ds = sequence(5, 2);
        const auto w = make_windows(ds, 3);
        REQUIRE(w.rows() == 3);
        Eigen::RowVectorXd row0(6);
        row0 << 0, 1, 10, 11, 20, 21;
        CHECK(w.features.row(0) == row0);
        CHECK(w.column_names[0] == "f0@t-2");
        CHECK(w.column_names[5] == "f1@t-0");
        CHECK(w.origin_feature[4] == "g0");
        CHECK(w.row_ids == std::vector<std::size_t>{2, 3, 4});
    }

    TEST_CASE("targets stay aligned with the window end") {
        const auto ds = sequence(30, 2);
        for (std::size_t len = 1; len <= 10; ++len) {
            const auto w = make_windows(ds, len);
            for (std::size_t t = 0; t < w.rows(); ++t)
                CHECK(w.targets(static_cast<Eigen::Index>(t)) == ds.targets(static_cast<Eigen::Index>(t + len - 1)));
        }
    }

    TEST_CASE("too few rows for the window") {
        CHECK_THROWS_AS(make_windows(sequence(4, 2), 5), InputError);
        CHECK_THROWS_AS(make_windows(sequence(4, 2), 0), std::invalid_argument);
    }
}

TEST_SUITE("data.synthetic") {
    TEST_CASE("power formula at the corners") {
        CHECK(synthetic_power({0, 0, 0, 0}) == 90.0);
        CHECK(synthetic_power({1, 1, 1, 0}) == doctest::Approx(360.0).epsilon(1e-12));
    }

    TEST_CASE("noiseless power stays within [50, 400] watts") {
        vkelm::SplitMix64 rng(3);
        for (int i = 0; i < 100000; ++i) {
            const LatentDraw u{rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01()};
            const double p = synthetic_power(u);
            CHECK(p >= 50.0);
            CHECK(p <= 400.0);
        }
        const auto recs = generate_synthetic(2000, 1, 0.0);
        for (const auto& r : recs) {
            CHECK(*r.power_w >= 50.0);
            CHECK(*r.power_w <= 400.0);
        }
    }

    TEST_CASE("fields follow the generator ranges") {
        for (const auto& r : generate_synthetic(500, 2)) {
            CHECK(*r.numeric[0] >= 0.0);
            CHECK(*r.numeric[0] < 100.0);
            CHECK(*r.numeric[2] >= 100.0);
            CHECK(*r.numeric[2] < 1000.0);
            CHECK(*r.numeric[3] >= 1000.0);
            CHECK(*r.numeric[3] <= 10000.0);
            CHECK(std::floor(*r.numeric[3]) == *r.numeric[3]);
            CHECK(*r.numeric[4] >= 10.0);
            CHECK(*r.numeric[4] < 100.0);
            CHECK(r.categorical[0].has_value());
        }
    }

    TEST_CASE("noiseless targets match the formula from the natural-unit fields") {
        for (const auto& r : generate_synthetic(100, 4, 0.0)) {
            const LatentDraw u{*r.numeric[0] / 100.0, *r.numeric[1] / 100.0, (*r.numeric[2] - 100.0) / 900.0,
                               *r.numeric[5]};
            CHECK(*r.power_w == doctest::Approx(synthetic_power(u)).epsilon(1e-12));
        }
    }

    TEST_CASE("generation is deterministic per seed") {
        CHECK(write_records(generate_synthetic(300, 17)) == write_records(generate_synthetic(300, 17)));
        CHECK(write_records(generate_synthetic(300, 17)) != write_records(generate_synthetic(300, 18)));
    }
}
