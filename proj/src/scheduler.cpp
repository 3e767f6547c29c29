#include "cavcoord/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavcoord {

std::optional<double> SchedulePlan::arrivalAt(int zone) const {
  for (std::size_t k = 0; k < zones.size(); ++k) {
    if (zones[k] == zone) return arrivals[k];
  }
  return std::nullopt;
}

bool SchedulePlan::unconstrained(double tol) const {
  for (std::size_t k = 0; k < arrivals.size(); ++k) {
    if (std::abs(arrivals[k] - lowerBounds[k]) > tol) return false;
  }
  return true;
}

double unconstrainedArrival(const PathSpec& path, double t0, double v0, std::size_t zoneIndex,
                            double zoneLength, const std::vector<double>& upstreamArrivals) {
  if (!(v0 > 0.0)) throw ValidationError("entry speed must be > 0");
  if (zoneIndex >= path.zonesOnPath.size()) throw std::out_of_range("zone index outside path");
  if (zoneIndex == 0) return t0 + path.zoneEntryOffsets[0] / v0;
  if (upstreamArrivals.size() < zoneIndex) {
    throw std::invalid_argument("upstream arrival not fixed yet");
  }
  const double dt = zoneOccupancyDuration(v0, zoneLength);
  return upstreamArrivals[zoneIndex - 1] + dt + path.gapAfterZone(zoneIndex - 1, zoneLength) / v0;
}

namespace {

// Time the trajectory reaches x, cruising at its final speed past tf.
double passTime(const Trajectory& tr, double x) {
  const KinematicState end = tr.evaluate(tr.tf());
  if (x > end.p) return tr.tf() + (x - end.p) / end.v;
  return tr.timeAtPosition(x);
}

}  // namespace

SchedulePlan arrivalTimes(const SchedulingContext& ctx, int lane, double tIdle) {
  if (tIdle < 0.0) throw ValidationError("idle time must be >= 0");
  SchedulePlan plan;
  plan.lane = lane;
  plan.vAvg = ctx.v0;
  const double dtI = zoneOccupancyDuration(ctx.v0, ctx.zoneLength);
  const auto predIt = ctx.predecessorByLane.find(lane);
  const PredecessorPlan* pred = predIt == ctx.predecessorByLane.end() ? nullptr : &predIt->second;

  for (std::size_t k = 0; k < ctx.path.zonesOnPath.size(); ++k) {
    const int z = ctx.path.zonesOnPath[k];
    double tbar = unconstrainedArrival(ctx.path, ctx.t0, ctx.v0, k, ctx.zoneLength, plan.arrivals);
    double t = tbar;
    if (k == 0) t = std::max(t, ctx.earliestFirstArrival);
    if (pred) {
      const auto a = pred->arrivals.find(z);
      if (a != pred->arrivals.end()) {
        const double rho = ctx.safeDistance / pred->vAvg;
        t = std::max(t, a->second + rho + tIdle);
        if (ctx.trajectoryRearEnd && pred->trajectory) {
          const double x = ctx.path.zoneEntryOffsets[k] + ctx.safeDistance + ctx.rearEndMargin;
          t = std::max({t, passTime(*pred->trajectory, x),
                        passTime(*pred->trajectory, x + ctx.zoneLength) - dtI});
        }
      }
    }
    const auto b = ctx.bookings.find(z);
    if (b != ctx.bookings.end()) {
      std::vector<ZoneBooking> sorted = b->second;
      std::sort(sorted.begin(), sorted.end(), [](const ZoneBooking& x, const ZoneBooking& y) {
        return x.arrival < y.arrival || (x.arrival == y.arrival && x.vehicle < y.vehicle);
      });
      for (const ZoneBooking& j : sorted) {
        if (j.arrival + j.occupancy + tIdle <= t) continue;  // j is out before i arrives
        if (t + dtI + tIdle <= j.arrival) break;             // i is out before j arrives
        t = j.arrival + j.occupancy + tIdle;
      }
    }
    plan.zones.push_back(z);
    plan.lowerBounds.push_back(tbar);
    plan.arrivals.push_back(t);
    plan.occupancy.push_back(dtI);
  }
  plan.exitTime = plan.arrivals.back() + plan.occupancy.back();
  return plan;
}

SchedulePlan chooseLane(const SchedulingContext& ctx, double tIdle) {
  SchedulePlan best = arrivalTimes(ctx, ctx.entryLane, tIdle);
  if (ctx.laneChangeZoneOccupied) return best;
  for (int l = 1; l <= ctx.lanes; ++l) {
    if (l == ctx.entryLane) continue;
    SchedulePlan cand = arrivalTimes(ctx, l, tIdle);
    if (cand.arrivals.back() < best.arrivals.back()) best = std::move(cand);
  }
  return best;
}

double idleTime(double trackingError, double vMin) {
  if (trackingError < 0.0) throw ValidationError("tracking error epsilon must be >= 0");
  if (trackingError == 0.0) return 0.0;
  if (!(vMin > 0.0)) throw ValidationError("idle time needs vMin > 0");
  return 2.0 * trackingError / vMin;
}

BoundaryData boundaryFromPlan(const SchedulePlan& plan, const PathSpec& path, double t0,
                              double v0, double zoneLength) {
  BoundaryData b;
  b.t0 = t0;
  b.p0 = 0.0;
  b.v0 = v0;
  const std::size_t n = plan.arrivals.size();
  for (std::size_t k = 0; k < n; ++k) {
    b.interiorPoints.push_back({plan.arrivals[k], path.zoneEntryOffsets[k]});
    if (k + 1 < n) {
      b.interiorPoints.push_back(
          {plan.arrivals[k] + plan.occupancy[k], path.zoneEntryOffsets[k] + zoneLength});
    }
  }
  b.tf = plan.exitTime;
  b.pf = path.zoneEntryOffsets[n - 1] + zoneLength;
  return b;
}

}  // namespace cavcoord
