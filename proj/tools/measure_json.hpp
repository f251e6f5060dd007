#pragma once

#include <string>

#include "json.hpp"
#include "maxstable/measures.hpp"

namespace maxstable::cli {

/// {"d": int, "norm": "sup", "atoms": [{"w": float, "u": [float, ...]}, ...]}.
/// Throws std::invalid_argument naming the violated invariant.
[[nodiscard]] AngularMeasure measure_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json measure_to_json(const AngularMeasure& nu);

/// "preset:independence<d>", "preset:dependence<d>", "preset:mixture<d>[:theta]" or a JSON file path.
[[nodiscard]] AngularMeasure load_measure(const std::string& spec);

}  // namespace maxstable::cli
