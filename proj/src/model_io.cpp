#include <json.hpp>

#include "vkelm/error.hpp"
#include "vkelm/json_io.hpp"
#include "vkelm/kernel_model.hpp"

namespace vkelm {

using ojson = nlohmann::ordered_json;

ojson schema_to_json(const Schema& schema, const std::vector<std::string>& column_origin) {
    ojson levels = ojson::object();
    for (std::size_t c = 0; c < schema.categorical_features.size(); ++c)
        levels[schema.categorical_features[c]] = schema.category_levels[c];
    ojson j;
    j["numeric_features"] = schema.numeric_features;
    j["categorical_features"] = schema.categorical_features;
    j["category_levels"] = levels;
    j["target"] = schema.target;
    j["window_len"] = schema.window_len;
    j["column_origin"] = column_origin;
    return j;
}

Schema schema_from_json(const ojson& j, std::vector<std::string>& column_origin) {
    Schema schema;
    schema.numeric_features = j.at("numeric_features").get<std::vector<std::string>>();
    schema.categorical_features = j.at("categorical_features").get<std::vector<std::string>>();
    const auto& levels = j.at("category_levels");
    for (const auto& name : schema.categorical_features)
        schema.category_levels.push_back(levels.at(name).get<std::vector<std::string>>());
    schema.target = j.at("target").get<std::string>();
    schema.window_len = j.at("window_len").get<std::size_t>();
    column_origin = j.at("column_origin").get<std::vector<std::string>>();
    return schema;
}

ojson stats_to_json(const PreprocessStats& stats) {
    ojson j;
    j["min"] = stats.min;
    j["max"] = stats.max;
    j["median"] = stats.median;
    j["mode"] = stats.mode;
    return j;
}

PreprocessStats stats_from_json(const ojson& j) {
    PreprocessStats stats;
    stats.min = j.at("min").get<std::vector<double>>();
    stats.max = j.at("max").get<std::vector<double>>();
    stats.median = j.at("median").get<std::vector<double>>();
    stats.mode = j.at("mode").get<std::vector<std::string>>();
    return stats;
}

ojson weights_to_json(const WeightVector& w) {
    ojson values = ojson::object();
    for (std::size_t i = 0; i < w.size(); ++i) values[w.names[i]] = w.values[i];
    ojson j;
    j["w_min"] = w.w_min;
    j["values"] = values;
    return j;
}

WeightVector weights_from_json(const ojson& j) {
    WeightVector w;
    w.w_min = j.at("w_min").get<double>();
    for (const auto& [name, value] : j.at("values").items()) {
        w.names.push_back(name);
        w.values.push_back(value.get<double>());
    }
    return w;
}

std::string serialize_model(const KelmModel& model) {
    ojson j;
    j["format_version"] = model.format_version;
    j["schema"] = schema_to_json(model.schema, model.column_origin);
    j["preprocess_stats"] = stats_to_json(model.stats);
    j["gamma"] = model.params.gamma;
    j["c"] = model.params.c;
    j["feature_weights"] = weights_to_json(model.feature_weights);
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < model.support.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index k = 0; k < model.support.cols(); ++k) row.push_back(model.support(i, k));
        rows.push_back(std::move(row));
    }
    j["support_matrix"] = std::move(rows);
    ojson beta = ojson::array();
    for (Eigen::Index i = 0; i < model.beta.size(); ++i) beta.push_back(model.beta(i));
    j["beta"] = std::move(beta);
    return j.dump() + "\n";
}

KelmModel deserialize_model(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw FormatError(std::string("model parse error: ") + e.what());
    }

    try {
        if (!j.is_object() || !j.contains("format_version"))
            throw FormatError("model file has no format_version");
        const auto version = j.at("format_version").get<long long>();
        if (version != kModelFormatVersion) throw UnsupportedVersionError(version);

        KelmModel model;
        model.format_version = static_cast<int>(version);
        model.schema = schema_from_json(j.at("schema"), model.column_origin);
        model.stats = stats_from_json(j.at("preprocess_stats"));
        model.params.gamma = j.at("gamma").get<double>();
        model.params.c = j.at("c").get<double>();
        model.params.validate();
        model.feature_weights = weights_from_json(j.at("feature_weights"));

        const auto& rows = j.at("support_matrix");
        const auto& beta = j.at("beta");
        const auto n = static_cast<Eigen::Index>(rows.size());
        const auto d = static_cast<Eigen::Index>(model.column_origin.size());
        if (static_cast<Eigen::Index>(beta.size()) != n)
            throw FormatError("beta length does not match support_matrix rows");
        model.support.resize(n, d);
        model.beta.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = rows.at(static_cast<std::size_t>(i));
            if (static_cast<Eigen::Index>(row.size()) != d)
                throw FormatError("support_matrix row " + std::to_string(i) + " has wrong width");
            for (Eigen::Index k = 0; k < d; ++k) model.support(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
            model.beta(i) = beta.at(static_cast<std::size_t>(i)).get<double>();
        }
        // Every column must resolve to a weight.
        (void)column_scales(model.feature_weights, model.column_origin);
        return model;
    } catch (const FormatError&) {
        throw;
    } catch (const ojson::exception& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("inconsistent model: ") + e.what());
    }
}

}  // namespace vkelm
