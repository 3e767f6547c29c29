#pragma once

#include <vector>

#include "cavcoord/metrics.hpp"
#include "cavcoord/run.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/sim.hpp"

namespace cavcoord {

/// Two-phase fixed-time plan: NS phase first, then EW. Each phase ends with
/// `amber` seconds of commit-or-stop followed by `allRed` seconds of red.
struct SignalPlan {
  double cycle = 60.0;
  double greenSplit = 0.5;  // share of the cycle given to the NS phase
  double allRed = 2.0;
  double amber = 3.0;
  std::vector<double> offsets;  // per intersection; empty means all zero

  void validate(int intersections) const;
};

enum class SignalState { Green, Amber, Red };

/// Indication at intersection `zone` (1-based) for NS or EW traffic.
SignalState signalState(const SignalPlan& plan, int zone, bool northSouth, double t);

/// Intelligent-driver-model parameters. Each vehicle's desired speed is its
/// entry speed unless `useEntrySpeed` is off.
struct CarFollowingParams {
  bool useEntrySpeed = true;
  double desiredSpeed = 12.0;
  double maxAccel = 2.0;
  double comfortDecel = 2.0;
  double maxDecel = 5.0;
  double headway = 1.0;
  double jamGap = 6.0;
  double exponent = 4.0;

  void validate() const;
};

/// IDM acceleration for speed v, desired speed v0, bumper gap s (may be
/// infinite) and approach rate dv = v - vLeader.
double idmAcceleration(const CarFollowingParams& cf, double v, double v0, double s, double dv);

struct BaselineOptions {
  double step = 0.01;
  double maxClearTime = 1800.0;  // after the demand horizon, then give up
  bool keepFrames = false;
};

/// Signalized run over the same arrival streams as runOptimal. Throws
/// MonitorFailure if the monitor fires with the jam gap.
RunArtifacts runBaseline(const Corridor& corridor, const VehicleLimits& limits,
                         const FlowSpec& flow, const SignalPlan& signal,
                         const CarFollowingParams& cf, const BaselineOptions& options = {},
                         const FuelModelCoefficients& fuel = defaultFuelModel());

}  // namespace cavcoord
