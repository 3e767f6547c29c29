#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cavcoord/ocp.hpp"
#include "cavcoord/scenario.hpp"
#include "cavcoord/trajectory.hpp"

namespace cavcoord {

/// Upper-level output: the lane to occupy after the lane-changing zone and
/// the entry time at every zone on the path.
struct SchedulePlan {
  int lane = 1;
  std::vector<int> zones;
  std::vector<double> arrivals;   // t^{z*}, same order as zones
  std::vector<double> occupancy;  // zone crossing time at vAvg
  std::vector<double> lowerBounds;  // unconstrained t-bar per zone
  double exitTime = 0.0;
  double vAvg = 0.0;

  std::optional<double> arrivalAt(int zone) const;
  /// True when every arrival equals its unconstrained lower bound.
  bool unconstrained(double tol = 1e-9) const;
};

/// A zone booking of a laterally conflicting vehicle.
struct ZoneBooking {
  int vehicle = 0;
  double arrival = 0.0;
  double occupancy = 0.0;
};

/// Zone arrivals of the most recent same-lane vehicle ahead.
struct PredecessorPlan {
  int vehicle = 0;
  std::map<int, double> arrivals;
  double vAvg = 0.0;
  std::shared_ptr<const Trajectory> trajectory;  // optional, see trajectoryRearEnd
};

/// Everything the scheduler reads from the coordinator for one vehicle.
struct SchedulingContext {
  PathSpec path;
  double t0 = 0.0;
  double v0 = 0.0;
  double zoneLength = 15.0;
  double safeDistance = 6.0;  // effective delta
  int entryLane = 1;
  int lanes = 2;
  bool laneChangeZoneOccupied = false;
  std::map<int, std::vector<ZoneBooking>> bookings;       // per zone
  std::map<int, PredecessorPlan> predecessorByLane;       // absent lane -> none
  double earliestFirstArrival = 0.0;  // re-planning floor for the first zone
  // Also require the predecessor's committed trajectory to be at least
  // safeDistance past the zone entry at t^z and past the zone exit at
  // t^z + dt. Off by default (plain recursion).
  bool trajectoryRearEnd = false;
  double rearEndMargin = 0.0;  // extra distance on top of safeDistance for that check
};

/// t-bar for zone `zoneIndex` given the already fixed upstream arrivals.
double unconstrainedArrival(const PathSpec& path, double t0, double v0, std::size_t zoneIndex,
                            double zoneLength, const std::vector<double>& upstreamArrivals);

/// Zone-by-zone earliest feasible arrivals on `lane`; `tIdle` buffers every
/// comparison (zero gives the plain recursion).
SchedulePlan arrivalTimes(const SchedulingContext& ctx, int lane, double tIdle = 0.0);

/// Keeps the entry lane while the lane-changing zone is occupied; otherwise
/// picks the lane with the earliest final-zone arrival, switching only on
/// strict improvement.
SchedulePlan chooseLane(const SchedulingContext& ctx, double tIdle = 0.0);

/// 2 epsilon / vMin.
double idleTime(double trackingError, double vMin);

/// Zone entry/exit points of a plan as boundary data for the trajectory
/// solver, starting from position 0 at t0.
BoundaryData boundaryFromPlan(const SchedulePlan& plan, const PathSpec& path, double t0,
                              double v0, double zoneLength);

}  // namespace cavcoord
