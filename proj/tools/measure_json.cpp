#include "measure_json.hpp"

#include <fstream>
#include <regex>
#include <stdexcept>

namespace maxstable::cli {

namespace {

AngularMeasure preset(const std::string& name) {
  static const std::regex pattern(R"((independence|dependence|mixture)(\d+)(?::([0-9.eE+-]+))?)");
  std::smatch m;
  if (!std::regex_match(name, m, pattern)) {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected independence<d>, dependence<d> or mixture<d>[:theta])");
  }
  const auto d = static_cast<std::size_t>(std::stoul(m[2]));
  if (d == 0) throw std::invalid_argument("preset dimension must be at least 1");
  const std::string kind = m[1];
  if (kind != "mixture" && m[3].matched) throw std::invalid_argument("only the mixture preset takes a weight");
  if (kind == "independence") return standard_measure(d, MeasureKind::independence);
  if (kind == "dependence") return standard_measure(d, MeasureKind::dependence);
  const double theta = m[3].matched ? std::stod(m[3]) : 0.5;
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("mixture weight must lie in [0,1]");
  return standard_measure(d, MeasureKind::mixture, theta);
}

}  // namespace

AngularMeasure measure_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("angular measure: document must be a JSON object");
  if (!doc.contains("d") || !doc["d"].is_number_integer() || doc["d"].get<long long>() < 1) {
    throw std::invalid_argument("angular measure: \"d\" must be a positive integer");
  }
  if (doc.value("norm", std::string("sup")) != "sup") {
    throw std::invalid_argument("angular measure: only \"norm\": \"sup\" is supported");
  }
  if (!doc.contains("atoms") || !doc["atoms"].is_array() || doc["atoms"].empty()) {
    throw std::invalid_argument("angular measure: \"atoms\" must be a non-empty array");
  }
  const auto d = doc["d"].get<std::size_t>();
  std::vector<Atom> atoms;
  for (const auto& a : doc["atoms"]) {
    if (!a.contains("w") || !a["w"].is_number() || !a.contains("u") || !a["u"].is_array()) {
      throw std::invalid_argument("angular measure: every atom needs a number \"w\" and an array \"u\"");
    }
    atoms.push_back({a["w"].get<double>(), a["u"].get<std::vector<double>>()});
  }
  AngularMeasure nu(d, std::move(atoms));
  const auto check = validate_moment_constraint(nu);
  if (!check.passed) throw std::invalid_argument(check.message);
  return nu;
}

nlohmann::json measure_to_json(const AngularMeasure& nu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : nu.atoms()) atoms.push_back({{"w", a.weight}, {"u", a.direction}});
  return {{"d", nu.dim()}, {"norm", "sup"}, {"atoms", atoms}};
}

AngularMeasure load_measure(const std::string& spec) {
  constexpr std::string_view kPrefix = "preset:";
  if (spec.rfind(kPrefix, 0) == 0) return preset(spec.substr(kPrefix.size()));
  std::ifstream in(spec);
  if (!in) throw std::invalid_argument("cannot open angular measure file '" + spec + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("angular measure file '" + spec + "' is not valid JSON: " + e.what());
  }
  return measure_from_json(doc);
}

}  // namespace maxstable::cli
