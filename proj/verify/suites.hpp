#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavcoord/ocp.hpp"

namespace cavcoord::verify {

// Pinned tolerances.
inline constexpr double kSystemResidualTol = 1e-9;
inline constexpr double kPositionTol = 1e-8;
inline constexpr double kContinuityTol = 1e-9;
inline constexpr double kTerminalControlTol = 1e-9;
inline constexpr double kMultiplierTol = 1e-8;
inline constexpr double kQpRelativeCostTol = 1e-3;

/// Worst-case residuals of one unconstrained solve.
struct ExactnessReport {
  double systemResidual = 0.0;
  double positionError = 0.0;
  double continuityGap = 0.0;
  double terminalControl = 0.0;
  double multiplierResidual = 0.0;  // |pi2 + pi1 v| at interior points

  bool passed() const;
};

ExactnessReport exactness(const BoundaryData& b, const UnconstrainedSolution& sol);

struct SuiteResult {
  std::string name;
  bool passed = false;
  int cases = 0;
  double seconds = 0.0;
  std::string detail;
};

/// Random unconstrained instances against every exactness tolerance.
SuiteResult exactnessSuite(int count = 120, std::uint64_t seed = 7);

/// A solution perturbed by 1e-2 must fail the multiplier check on every
/// instance, otherwise the check is toothless.
SuiteResult perturbationSuite(int count = 20, std::uint64_t seed = 8);

/// Frozen instances: analytic cost vs the recorded QP cost and, when
/// `liveQp` is set, vs a fresh 1 ms QP solve.
SuiteResult oracleEquivalenceSuite(bool liveQp = true);

/// Arrival-time recursion vs brute force on random conflict configurations, lateral
/// disjointness, rear-end bound, and idle-time variant at zero idle.
SuiteResult schedulerSuite(int count = 1000, std::uint64_t seed = 11);

std::vector<SuiteResult> runAllSuites(bool liveQp = true);

}  // namespace cavcoord::verify
