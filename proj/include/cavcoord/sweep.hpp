#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavcoord/baseline.hpp"
#include "cavcoord/config.hpp"
#include "cavcoord/metrics.hpp"
#include "cavcoord/run.hpp"
#include "cavcoord/sim.hpp"

namespace cavcoord {

struct SweepRequest {
  ScenarioConfig config;
  std::vector<double> volumes;        // empty: config.volumes
  std::vector<std::uint64_t> seeds;   // empty: {config.seed}
  bool optimal = true;
  bool baseline = true;
  SimOptions sim;
  BaselineOptions base;
  bool parallel = true;  // OpenMP across runs
  FuelModelCoefficients fuel = defaultFuelModel();
};

struct RunFailure {
  std::string mode;
  double volume = 0.0;
  std::uint64_t seed = 0;
  std::string what;
  std::vector<Violation> violations;
};

struct SweepResult {
  std::vector<RunArtifacts> runs;  // volume, then seed, then optimal before baseline
  std::vector<RunFailure> failures;
  double wallSeconds = 0.0;

  std::vector<RunSummary> summaries() const;
};

/// Every (volume, seed, mode) run. A run that throws is recorded in
/// `failures` and the rest still execute.
SweepResult runSweep(const SweepRequest& request);

}  // namespace cavcoord
