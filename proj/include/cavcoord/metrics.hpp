#pragma once

#include <array>
#include <string>
#include <vector>

#include "cavcoord/run.hpp"
#include "cavcoord/trajectory.hpp"

namespace cavcoord {

/// Polynomial fuel metamodel in ml/s:
///   cruise(v) = b0 + b1 v + b2 v^2 + b3 v^3
///   accel(v, u) = u (c0 + c1 v + c2 v^2)   for u > 0
struct FuelModelCoefficients {
  std::array<double, 4> cruise{};
  std::array<double, 3> accel{};
  std::string source;
};

FuelModelCoefficients defaultFuelModel();
FuelModelCoefficients loadFuelModel(const std::string& path);

/// Rate clamped at zero from below; braking earns no credit.
double fuelRate(const FuelModelCoefficients& c, double v, double u);

/// Trapezoid integral of the fuel rate over samples (t, v, u).
double integrateFuel(const FuelModelCoefficients& c, const std::vector<double>& t,
                     const std::vector<double>& v, const std::vector<double>& u);

/// (tf - t0) - (pf - p0) / v0.
double timeDelay(double t0, double tf, double p0, double pf, double v0);
double timeDelay(const Trajectory& tr);

struct RunSummary {
  std::string mode;
  std::string scenario;
  double volume = 0.0;
  std::uint64_t seed = 0;
  int vehicles = 0;
  double travelTime = 0.0;  // means over vehicles
  double delay = 0.0;
  double fuel = 0.0;
  double fuelRate = 0.0;    // mean of fuel / travel time
  double minSpeed = 0.0;    // lowest instantaneous speed seen
  double latencyMeanMs = 0.0;
  double latencyStdMs = 0.0;
  int violations = 0;
};

RunSummary summarize(const RunArtifacts& run);

/// Integer percentage (baseline - optimal) / baseline, rounded to nearest.
int improvementPercent(double baseline, double optimal);

/// One row per volume: optimal vs baseline means across seeds.
struct ComparisonRow {
  double volume = 0.0;
  int seeds = 0;
  double vehicles = 0.0;
  double baseTravel = 0.0, optTravel = 0.0;
  int travelPct = 0;
  double baseDelay = 0.0, optDelay = 0.0;
  int delayPct = 0;
  double baseFuelRate = 0.0, optFuelRate = 0.0;
  double baseFuel = 0.0, optFuel = 0.0;
  int fuelPct = 0;
};

/// Latency row: the seed with the largest mean per volume.
struct LatencyRow {
  double volume = 0.0;
  std::uint64_t seed = 0;
  double meanMs = 0.0;
  double stdMs = 0.0;
};

/// Means per (mode, volume). Runs from different scenarios are rejected.
std::vector<ComparisonRow> aggregate(const std::vector<RunSummary>& runs);
std::vector<LatencyRow> latencyTable(const std::vector<RunSummary>& runs);

}  // namespace cavcoord
