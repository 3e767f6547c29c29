#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cavcoord/ocp.hpp"
#include "cavcoord/scheduler.hpp"

namespace cavcoord::verify {

/// Random feasible boundary data with n in {1, 2, 3} zones on a corridor-like
/// geometry (L = 150, S = 15, D in [30, 75]). Deterministic in `seed`.
std::vector<BoundaryData> exactnessInstances(int count, std::uint64_t seed);

/// One frozen oracle-equivalence case. Times sit on the 1 ms grid.
struct OracleInstance {
  std::string name;
  BoundaryData boundary;
  VehicleLimits limits;
  std::optional<BoundaryData> predecessor;  // solved with the same limits
  double gap = 6.0;
  ArcKind expected = ArcKind::Unconstrained;  // arc kind the case exercises
  double qpCost = 0.0;  // 1 ms QP oracle cost recorded when the table was frozen
};

/// The frozen table: unconstrained, control-limit, speed-limit and rear-end
/// cases.
const std::vector<OracleInstance>& oracleInstances();

std::shared_ptr<const Trajectory> predecessorTrajectory(const OracleInstance& inst);

// Candidate generators the table was drawn from.
OracleInstance unconstrainedCandidate(std::mt19937_64& rng);
OracleInstance speedLimitCandidate(std::mt19937_64& rng);
OracleInstance controlLimitCandidate(std::mt19937_64& rng);
OracleInstance rearEndCandidate(std::mt19937_64& rng);

/// Random scheduling problem: one path of 1-3 zones, up to four committed
/// plans split between lateral bookings and a same-lane predecessor.
SchedulingContext schedulingCase(std::mt19937_64& rng);

}  // namespace cavcoord::verify
