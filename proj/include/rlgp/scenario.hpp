#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/robot_model.hpp"
#include "rlgp/world.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rlgp {

/// A planning problem as stored in a scenario file (`format: 1`).
struct Scenario {
  std::string kind;         // pickplace | sorting | tableclearing | custom
  std::string robotModel = "hsr_like";
  Configuration initial;    // robot start configuration
  World world;
  std::string domain;       // built-in symbolic domain name
  std::vector<std::string> goal;
  std::uint64_t seed = 0;   // generator seed, informational
};

Scenario scenarioFromJson(const nlohmann::json& j);
nlohmann::json scenarioToJson(const Scenario& s);

Scenario loadScenario(const std::string& path);
void saveScenario(const Scenario& s, const std::string& path);

}  // namespace rlgp
