#pragma once

#include <nlohmann/json.hpp>
#include <variant>

#include "efda/genmodel.hpp"

namespace efda {

// JSON schema, format_version 1. Matrices are stored row-major as arrays of
// rows; grids as {t0, t1, n}. Doubles keep full precision, so a round trip
// reproduces the model exactly.
nlohmann::json to_json(const VerticalFpca& basis);
nlohmann::json to_json(const HorizontalFpca& basis);
VerticalFpca vertical_from_json(const nlohmann::json& j);
HorizontalFpca horizontal_from_json(const nlohmann::json& j);

using GenerativeModel = std::variant<GaussianModel, KdeModel>;

nlohmann::json to_json(const GaussianModel& model);
nlohmann::json to_json(const KdeModel& model);
GenerativeModel model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const GenerativeModel& model);
GenerativeModel load_model(const std::string& path);

} // namespace efda
