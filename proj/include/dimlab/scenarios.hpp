#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimlab/report.hpp"

namespace dimlab {

// Named experiment scenarios; each reproduces one claim at desk scale.
enum class ScenarioName {
  Moran,
  PercolateDim,
  ProjectionPositivity,
  SectionsConservation,
  MandelbrotSlices,
  Probe,
  ExceptionalScan,
  FourierDecay,
};

std::optional<ScenarioName> scenario_from_string(const std::string& s);
const char* to_string(ScenarioName name);
std::vector<std::string> scenario_names();

struct Scenario {
  ScenarioName name;
  std::uint64_t seed = 0;
  nlohmann::json params;      // merged with defaults
  nlohmann::json thresholds;  // merged with defaults
  bool override_thresholds = false;
};

// Validates a config document {"scenario", "seed", "params", "thresholds",
// "override"}. Errors are ErrorCode::Validation naming the offending path.
Scenario parse_scenario(const nlohmann::json& config,
                        std::optional<std::string> name_hint = std::nullopt,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

nlohmann::json default_params(ScenarioName name);
nlohmann::json default_thresholds(ScenarioName name);

Report run(const Scenario& scenario);

}  // namespace dimlab
