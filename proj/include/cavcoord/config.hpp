#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavcoord/baseline.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/sim.hpp"

namespace cavcoord {

/// Everything a scenario file can set. Keys are documented in
/// docs/scenario_schema.md; unknown keys are rejected.
struct ScenarioConfig {
  std::string name = "scenario";
  CorridorConfig corridor;
  VehicleLimits limits;
  std::vector<double> volumes{600.0, 800.0, 1000.0, 1200.0, 1400.0};
  double speedMin = 11.0;
  double speedMax = 13.0;
  std::uint64_t seed = 1;
  double horizon = 18.0;
  SignalPlan signal;
  CarFollowingParams carFollowing;

  /// Throws ValidationError naming the first broken invariant.
  void validate() const;
  FlowSpec flow(double volume, std::uint64_t seed) const;
};

/// Parses and validates. Syntax errors and bad values both surface as
/// ValidationError.
ScenarioConfig parseScenario(const std::string& jsonText);
ScenarioConfig loadScenario(const std::string& path);

/// Canonical JSON (sorted keys, every field explicit).
std::string scenarioJson(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string configHash(const ScenarioConfig& config);

/// Built-in defaults for the two reference corridors.
ScenarioConfig scenarioOne();
ScenarioConfig scenarioTwo();

}  // namespace cavcoord
