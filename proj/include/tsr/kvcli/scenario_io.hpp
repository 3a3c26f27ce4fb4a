#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tsr/sim/scenario.hpp"

namespace tsr {

/// Malformed or invalid scenario file.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses and finalizes a scenario. Unknown fields, wrong types and
/// out-of-range values raise ScenarioError naming the offending path.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace tsr
