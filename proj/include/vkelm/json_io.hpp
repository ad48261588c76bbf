#pragma once

// JSON fragments shared by the model file and the report formats.

#include <string>
#include <vector>

#include <json.hpp>

#include "vkelm/data.hpp"
#include "vkelm/kernel_model.hpp"

namespace vkelm {

nlohmann::ordered_json schema_to_json(const Schema& schema, const std::vector<std::string>& column_origin);
Schema schema_from_json(const nlohmann::ordered_json& j, std::vector<std::string>& column_origin);

nlohmann::ordered_json stats_to_json(const PreprocessStats& stats);
PreprocessStats stats_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json weights_to_json(const WeightVector& w);
WeightVector weights_from_json(const nlohmann::ordered_json& j);

}  // namespace vkelm
