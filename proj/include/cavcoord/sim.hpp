#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavcoord/metrics.hpp"
#include "cavcoord/ocp.hpp"
#include "cavcoord/run.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/scheduler.hpp"

namespace cavcoord {

struct FlowSpec {
  double volume = 600.0;  // veh/h per lane per entry
  double speedMin = 11.0;
  double speedMax = 13.0;
  std::uint64_t seed = 1;
  double horizon = 18.0;  // arrivals are drawn on [0, horizon)

  void validate(const VehicleLimits& limits) const;
};

struct RawArrival {
  double t = 0.0;
  Movement movement;
  int lane = 1;
  double v0 = 0.0;
  std::uint64_t tieKey = 0;
};

/// Poisson arrivals per (movement, lane) stream with uniform entry speeds,
/// each stream seeded from (seed, stream index). Sorted by time. Admission
/// (deferral until the entry gap holds) happens in the simulator.
std::vector<RawArrival> generateArrivals(const Corridor& corridor, const FlowSpec& flow);

struct SimOptions {
  double playbackStep = 0.01;
  double gateStep = 0.01;   // retry interval for a held entrant
  bool idleTime = false;    // buffer comparisons by 2 epsilon / vMin
  bool trajectoryRearEnd = true;  // see SchedulingContext
  double rearEndMargin = 1.0;
  int maxReschedules = 40;
  bool keepFrames = false;
  bool parallel = true;     // OpenMP playback and monitor
  ConstrainedOptions solver;
};

/// Raised when the playback monitor sees a gap or zone-overlap violation.
class MonitorFailure : public std::runtime_error {
 public:
  MonitorFailure(const std::string& what, std::vector<Violation> v)
      : std::runtime_error(what), violations_(std::move(v)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Entry feasibility: every same-movement vehicle ahead at position p with
/// speed v leaves room to brake down to v at uMin before closing to `gap`.
bool entryGapHolds(double gap, double v0, double uMin, double leaderP, double leaderV);

/// A vehicle as played back: its committed trajectory plus lane labels.
struct PlannedVehicle {
  int id = 0;
  PathSpec path;
  int finalLane = 1;
  std::shared_ptr<const Trajectory> trajectory;
};

/// Lane label at position p: entry lane inside the lane-changing zone,
/// final lane after it.
int laneLabel(const PlannedVehicle& v, double p, double laneChangeZoneLength);

/// Samples every trajectory on the global grid k * step.
std::vector<Frame> playback(const std::vector<PlannedVehicle>& vehicles, const Corridor& corridor,
                            double step, bool parallel);

/// Plan-solve-commit for every admitted vehicle, then playback and monitor.
/// Throws MonitorFailure if the monitor fires.
RunArtifacts runOptimal(const Corridor& corridor, const VehicleLimits& limits,
                        const FlowSpec& flow, const SimOptions& options,
                        const FuelModelCoefficients& fuel = defaultFuelModel());

}  // namespace cavcoord
