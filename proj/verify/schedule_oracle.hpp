#pragma once

#include <vector>

#include "cavcoord/scheduler.hpp"

namespace cavcoord::verify {

/// Earliest feasible zone arrivals on `lane` found by enumeration. At each
/// zone the candidates are the lower bound (free-flow time, re-planning floor,
/// predecessor + delta / vAvg) and every booking's exit time; the smallest
/// candidate that overlaps no booking wins. No sorting, no early exit.
std::vector<double> bruteForceArrivals(const SchedulingContext& ctx, int lane);

/// True when [t, t + dt] shares interior time with some booking of `zone`.
bool overlapsBooking(const SchedulingContext& ctx, int zone, double t, double dt);

}  // namespace cavcoord::verify
