#include "vkelm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "vkelm/baselines.hpp"
#include "vkelm/error.hpp"
#include "vkelm/pipeline.hpp"

namespace vkelm {

namespace {

namespace fs = std::filesystem;

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size())
            throw InputError(flag + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw InputError(flag + ": empty list");
    return out;
}

struct DataFlags {
    std::string data;
    std::string split = "0.7,0.15,0.15";
    std::uint64_t seed = 0;
    std::size_t window = 1;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--data", data, "Telemetry CSV")->required();
        cmd.add_option("--split", split, "train,val,test ratios")->capture_default_str();
        cmd.add_option("--seed", seed, "Seed for splitting and weight search")->capture_default_str();
        cmd.add_option("--window", window, "Time window length (1 = off)")->capture_default_str();
    }

    SplitRatios ratios() const {
        const auto r = parse_list(split, "--split");
        if (r.size() != 3) throw InputError("--split needs exactly three ratios");
        return {r[0], r[1], r[2]};
    }

    PreparedData load() const {
        if (window < 1) throw InputError("--window must be >= 1");
        return prepare_data(parse_records(read_text_file(data)), ratios(), seed, window);
    }
};

struct ModelFlags {
    double gamma = 0.15;
    double c = 180.0;
    bool no_vwaa = false;
    VwaaConfig vwaa;

    void add_to(CLI::App& cmd, bool with_vwaa_toggle) {
        cmd.add_option("--gamma", gamma, "RBF kernel parameter")->capture_default_str();
        cmd.add_option("--c", c, "Regularization parameter")->capture_default_str();
        if (with_vwaa_toggle) cmd.add_flag("--no-vwaa", no_vwaa, "Keep all feature weights at 1");
        cmd.add_option("--population", vwaa.population)->capture_default_str();
        cmd.add_option("--iters", vwaa.max_iters)->capture_default_str();
        cmd.add_option("--top-k", vwaa.top_k)->capture_default_str();
        cmd.add_option("--lambda-kl", vwaa.lambda_kl)->capture_default_str();
        cmd.add_option("--sigma0", vwaa.sigma0)->capture_default_str();
        cmd.add_option("--decay", vwaa.decay)->capture_default_str();
        cmd.add_option("--w-min", vwaa.w_min)->capture_default_str();
        cmd.add_option("--patience", vwaa.patience)->capture_default_str();
        cmd.add_option("--rel-tol", vwaa.rel_tol)->capture_default_str();
    }

    KernelParams params() const {
        KernelParams p{gamma, c};
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        return p;
    }

    VwaaConfig config(std::uint64_t seed) const {
        VwaaConfig cfg = vwaa;
        cfg.seed = seed;
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        return cfg;
    }
};

struct GridFlags {
    std::string gammas;
    std::string cs;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--gammas", gammas, "Comma-separated gamma grid");
        cmd.add_option("--cs", cs, "Comma-separated C grid");
    }

    SearchGrid grid() const {
        SearchGrid g;
        if (!gammas.empty()) g.gamma_values = parse_list(gammas, "--gammas");
        if (!cs.empty()) g.c_values = parse_list(cs, "--cs");
        try {
            g.validate();
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
        return g;
    }
};

std::string predictions_csv(const Dataset& ds, const Eigen::VectorXd& predicted) {
    std::string out = "row_index,predicted_power_w\n";
    for (Eigen::Index i = 0; i < predicted.size(); ++i)
        out += std::to_string(ds.row_ids[static_cast<std::size_t>(i)]) + "," + format_double(predicted(i)) + "\n";
    return out;
}

void write_evaluation(const fs::path& dir, const EvaluationReport& report, const fs::path& report_path) {
    write_text_file(report_path, report_to_json(report));
    write_plot_files(dir, report);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feature-weighted kernel ELM for cloud power consumption prediction", "vkelm"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "Write a synthetic telemetry CSV");
    long long gen_rows = 0;
    std::uint64_t gen_seed = 0;
    double gen_noise = kDefaultNoiseSd;
    std::string gen_out;
    gen->add_option("--rows", gen_rows, "Number of rows")->required();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--noise-sd", gen_noise, "Gaussian noise sd in watts")->capture_default_str();
    gen->add_option("--out", gen_out)->required();

    // train
    auto* train = app.add_subcommand("train", "Split, preprocess, search weights, fit and evaluate");
    DataFlags train_data;
    ModelFlags train_model;
    GridFlags train_grid;
    bool train_tune = false;
    bool train_no_retune = false;
    std::string train_dir = ".";
    std::string train_model_out;
    std::string train_report_out;
    train_data.add_to(*train);
    train_model.add_to(*train, true);
    train_grid.add_to(*train);
    train->add_flag("--tune", train_tune, "Grid-search gamma and C before (and after) the weight search");
    train->add_flag("--no-retune", train_no_retune, "With --tune, skip the search at the optimized weights");
    train->add_option("--out-dir", train_dir, "Directory for plot data and traces")->capture_default_str();
    train->add_option("--model-out", train_model_out, "Model path (default <out-dir>/model.json)");
    train->add_option("--report-out", train_report_out, "Report path (default <out-dir>/report.json)");

    // predict
    auto* pred = app.add_subcommand("predict", "Predict power for every row of a CSV");
    std::string pred_model;
    std::string pred_data;
    std::string pred_out;
    pred->add_option("--model", pred_model)->required();
    pred->add_option("--data", pred_data)->required();
    pred->add_option("--out", pred_out)->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Score a trained model and write plot data");
    std::string eval_model;
    std::vector<std::string> eval_inputs;
    std::string eval_data;
    std::string eval_split = "0.7,0.15,0.15";
    std::uint64_t eval_seed = 0;
    std::string eval_dir = ".";
    eval->add_option("--model", eval_model)->required();
    eval->add_option("--input", eval_inputs, "name=path, repeatable (e.g. train=a.csv test=b.csv)");
    eval->add_option("--data", eval_data, "Re-split this CSV as train did and score every split");
    eval->add_option("--split", eval_split)->capture_default_str();
    eval->add_option("--seed", eval_seed)->capture_default_str();
    eval->add_option("--out-dir", eval_dir)->capture_default_str();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Validation surface over a (gamma, C) grid");
    DataFlags sweep_data;
    GridFlags sweep_grid;
    std::string sweep_out = "surface.csv";
    sweep_data.add_to(*sweep);
    sweep_grid.add_to(*sweep);
    sweep->add_option("--out", sweep_out)->capture_default_str();

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare weighted KELM, plain KELM and ELM");
    DataFlags cmp_data;
    ModelFlags cmp_model;
    std::vector<std::string> cmp_models = {kModelVwaaKelm, kModelKelm, kModelElm};
    std::string cmp_out = "comparison.json";
    cmp_data.add_to(*cmp);
    cmp_model.add_to(*cmp, false);
    cmp->add_option("--models", cmp_models, "Subset of vwaa-kelm, kelm, elm")->delimiter(',');
    cmp->add_option("--out", cmp_out)->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }

    try {
        if (gen->parsed()) {
            if (gen_rows < 1) throw InputError("--rows must be >= 1");
            if (!(gen_noise >= 0.0)) throw InputError("--noise-sd must be >= 0");
            write_text_file(gen_out, write_records(generate_synthetic(static_cast<std::size_t>(gen_rows),
                                                                      gen_seed, gen_noise)));
            out << "wrote " << gen_rows << " rows to " << gen_out << "\n";
        } else if (train->parsed()) {
            TrainOptions opts;
            opts.params = train_model.params();
            opts.use_vwaa = !train_model.no_vwaa;
            opts.vwaa = train_model.config(train_data.seed);
            opts.tune = train_tune;
            opts.retune_after_vwaa = !train_no_retune;
            opts.grid = train_grid.grid();
            const auto data = train_data.load();
            const auto outcome = run_training(data, opts);

            const fs::path dir = train_dir;
            const fs::path model_path = train_model_out.empty() ? dir / "model.json" : fs::path(train_model_out);
            const fs::path report_path = train_report_out.empty() ? dir / "report.json" : fs::path(train_report_out);
            write_text_file(model_path, serialize_model(outcome.model));
            write_evaluation(dir, outcome.report, report_path);
            write_text_file(dir / "timings.json", timings_to_json(outcome.report.timings));
            if (outcome.vwaa) write_text_file(dir / "vwaa_trace.csv", trace_to_csv(*outcome.vwaa));
            if (outcome.grid) write_text_file(dir / "surface.csv", surface_to_csv(outcome.grid->surface));
            if (outcome.pre_grid)
                write_text_file(dir / "surface_uniform.csv", surface_to_csv(outcome.pre_grid->surface));

            for (const auto& s : outcome.report.splits)
                if (s.rmse)
                    out << s.name << ": rmse " << *s.rmse << " r2 " << (s.r2 ? std::to_string(*s.r2) : "null")
                        << " rpd " << (s.rpd ? std::to_string(*s.rpd) : "null") << "\n";
            out << "model written to " << model_path.string() << "\n";
        } else if (pred->parsed()) {
            const auto model = deserialize_model(read_text_file(pred_model));
            const auto parsed = parse_csv(read_text_file(pred_data));
            std::vector<std::string> missing;
            for (const auto& name : model.schema.feature_names())
                if (!parsed.has_column(name)) missing.push_back(name);
            if (!missing.empty()) {
                std::string names;
                for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
                throw InputError("input is missing model columns: " + names);
            }
            auto ds = encode_for_model(parsed.records, model);
            for (auto& id : ds.row_ids) id = parsed.source_rows[id];
            write_text_file(pred_out, predictions_csv(ds, predict(model, ds.features)));
            out << "wrote " << ds.rows() << " predictions to " << pred_out << "\n";
        } else if (eval->parsed()) {
            const auto model = deserialize_model(read_text_file(eval_model));
            std::vector<std::pair<std::string, Dataset>> sets;
            if (!eval_data.empty()) {
                const auto r = parse_list(eval_split, "--split");
                if (r.size() != 3) throw InputError("--split needs exactly three ratios");
                std::vector<RawRecord> labelled;
                for (const auto& rec : parse_records(read_text_file(eval_data)))
                    if (rec.power_w) labelled.push_back(rec);
                const auto split = split_dataset(labelled, {r[0], r[1], r[2]}, eval_seed,
                                                 model.schema.window_len == 1);
                sets.emplace_back("train", encode_for_model(split.train, model));
                sets.emplace_back("val", encode_for_model(split.val, model));
                sets.emplace_back("test", encode_for_model(split.test, model));
            }
            for (const auto& entry : eval_inputs) {
                const auto eq = entry.find('=');
                if (eq == std::string::npos || eq == 0) throw InputError("--input expects name=path, got '" + entry + "'");
                sets.emplace_back(entry.substr(0, eq),
                                  encode_for_model(parse_records(read_text_file(entry.substr(eq + 1))), model));
            }
            if (sets.empty()) throw InputError("evaluate needs --data or at least one --input");
            std::vector<NamedDataset> named;
            for (const auto& [name, ds] : sets) named.push_back({name, &ds});
            auto report = build_report(model, named);
            const fs::path dir = eval_dir;
            write_evaluation(dir, report, dir / "report.json");
            out << "report written to " << (dir / "report.json").string() << "\n";
        } else if (sweep->parsed()) {
            const auto grid = sweep_grid.grid();
            const auto data = sweep_data.load();
            const auto surface = sensitivity_surface(
                data.train, data.val, grid, WeightVector::uniform(data.preprocessor.schema.feature_names()));
            write_text_file(sweep_out, surface_to_csv(surface));
            out << "wrote " << surface.size() << " surface rows to " << sweep_out << "\n";
        } else if (cmp->parsed()) {
            for (const auto& m : cmp_models)
                if (m != kModelVwaaKelm && m != kModelKelm && m != kModelElm)
                    throw InputError("--models: unknown model '" + m + "'");
            const auto params = cmp_model.params();
            const auto cfg = cmp_model.config(cmp_data.seed);
            const auto data = cmp_data.load();
            CompareOptions opts;
            opts.models = cmp_models;
            opts.elm_seed = cmp_data.seed;
            const auto report = compare_models(data.train, data.val, data.test, params, cfg, opts);
            write_text_file(cmp_out, comparison_to_json(report));
            out << "comparison written to " << cmp_out << "\n";
        }
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const SearchError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const MetricError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace vkelm
