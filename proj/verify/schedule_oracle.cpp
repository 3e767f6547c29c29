#include "schedule_oracle.hpp"

#include <algorithm>
#include <limits>

namespace cavcoord::verify {

bool overlapsBooking(const SchedulingContext& ctx, int zone, double t, double dt) {
  const auto it = ctx.bookings.find(zone);
  if (it == ctx.bookings.end()) return false;
  for (const ZoneBooking& b : it->second) {
    const bool before = t + dt <= b.arrival;
    const bool after = b.arrival + b.occupancy <= t;
    if (!before && !after) return true;
  }
  return false;
}

std::vector<double> bruteForceArrivals(const SchedulingContext& ctx, int lane) {
  const double dt = ctx.zoneLength / ctx.v0;
  const auto predIt = ctx.predecessorByLane.find(lane);
  std::vector<double> out;
  for (std::size_t k = 0; k < ctx.path.zonesOnPath.size(); ++k) {
    const int z = ctx.path.zonesOnPath[k];
    double lb;
    if (k == 0) {
      lb = ctx.t0 + ctx.path.zoneEntryOffsets[0] / ctx.v0;
      lb = std::max(lb, ctx.earliestFirstArrival);
    } else {
      const double spacing =
          ctx.path.zoneEntryOffsets[k] - ctx.path.zoneEntryOffsets[k - 1] - ctx.zoneLength;
      lb = out.back() + dt + spacing / ctx.v0;
    }
    if (predIt != ctx.predecessorByLane.end()) {
      const auto a = predIt->second.arrivals.find(z);
      if (a != predIt->second.arrivals.end()) {
        lb = std::max(lb, a->second + ctx.safeDistance / predIt->second.vAvg);
      }
    }
    std::vector<double> candidates{lb};
    const auto b = ctx.bookings.find(z);
    if (b != ctx.bookings.end()) {
      for (const ZoneBooking& j : b->second) candidates.push_back(j.arrival + j.occupancy);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double t : candidates) {
      if (t < lb || t >= best) continue;
      if (!overlapsBooking(ctx, z, t, dt)) best = t;
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace cavcoord::verify
