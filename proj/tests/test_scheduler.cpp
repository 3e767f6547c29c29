#include <gtest/gtest.h>

#include <random>

#include "cavcoord/scheduler.hpp"
#include "instances.hpp"
#include "schedule_oracle.hpp"

using namespace cavcoord;

namespace {

// One zone whose free-flow arrival at 12.5 m/s is `tbar`.
SchedulingContext oneZone(double tbar) {
  SchedulingContext ctx;
  ctx.path.movement = {Approach::Eastbound, -1};
  ctx.path.zonesOnPath = {1};
  ctx.path.zoneEntryOffsets = {tbar * 12.5};
  ctx.path.pathLength = tbar * 12.5 + 15.0;
  ctx.v0 = 12.5;
  ctx.zoneLength = 15.0;
  ctx.safeDistance = 6.0;
  return ctx;
}

}  // namespace

TEST(UnconstrainedArrival, Recursion) {
  PathSpec p;
  p.zonesOnPath = {1, 2};
  p.zoneEntryOffsets = {150.0, 240.0};
  EXPECT_NEAR(unconstrainedArrival(p, 0.0, 12.5, 0, 15.0, {}), 12.0, 1e-12);
  EXPECT_NEAR(unconstrainedArrival(p, 0.0, 12.5, 1, 15.0, {12.0}), 19.2, 1e-12);
  EXPECT_NEAR(unconstrainedArrival(p, 0.0, 12.5, 1, 15.0, {14.0}), 21.2, 1e-12);
  EXPECT_THROW(unconstrainedArrival(p, 0.0, 12.5, 2, 15.0, {12.0, 19.2}), std::out_of_range);
}

TEST(ArrivalTimes, NoConflictGivesLowerBound) {
  const SchedulingContext ctx = oneZone(10.5);
  const SchedulePlan plan = arrivalTimes(ctx, 1);
  EXPECT_DOUBLE_EQ(plan.arrivals[0], 10.5);
  EXPECT_TRUE(plan.unconstrained());
  EXPECT_NEAR(plan.occupancy[0], 1.2, 1e-12);
  EXPECT_NEAR(plan.exitTime, 11.7, 1e-12);
}

TEST(ArrivalTimes, PushedPastConflict) {
  SchedulingContext ctx = oneZone(10.5);
  ctx.bookings[1] = {{7, 10.0, 1.2}};
  EXPECT_NEAR(arrivalTimes(ctx, 1).arrivals[0], 11.2, 1e-12);
  EXPECT_NEAR(arrivalTimes(ctx, 1, 0.2).arrivals[0], 11.4, 1e-12);
  EXPECT_EQ(verify::bruteForceArrivals(ctx, 1)[0], arrivalTimes(ctx, 1).arrivals[0]);
}

TEST(ArrivalTimes, GapBeforeConflictIsUsed) {
  SchedulingContext ctx = oneZone(10.5);
  ctx.bookings[1] = {{7, 12.0, 1.2}};
  EXPECT_DOUBLE_EQ(arrivalTimes(ctx, 1).arrivals[0], 10.5);
}

TEST(ArrivalTimes, RearEndBound) {
  SchedulingContext ctx = oneZone(10.5);
  PredecessorPlan k;
  k.arrivals[1] = 10.2;
  k.vAvg = 12.0;
  ctx.predecessorByLane[1] = k;
  EXPECT_NEAR(arrivalTimes(ctx, 1).arrivals[0], 10.7, 1e-12);
  EXPECT_NEAR(arrivalTimes(ctx, 1, 0.2).arrivals[0], 10.9, 1e-12);
  EXPECT_DOUBLE_EQ(arrivalTimes(ctx, 2).arrivals[0], 10.5);
}

// Holds while i stays behind j. Once j moves far enough for i to fit in
// front, the arrival drops back to the lower bound.
TEST(ArrivalTimes, MonotoneInConflictTime) {
  double last = 0.0;
  for (double tj = 9.0; tj < 11.6; tj += 0.05) {
    SchedulingContext ctx = oneZone(10.5);
    ctx.bookings[1] = {{3, 8.0, 1.5}, {7, tj, 1.2}};
    const double t = arrivalTimes(ctx, 1).arrivals[0];
    EXPECT_GE(t, last);
    last = t;
  }
  SchedulingContext ctx = oneZone(10.5);
  ctx.bookings[1] = {{7, 11.7, 1.2}};
  EXPECT_DOUBLE_EQ(arrivalTimes(ctx, 1).arrivals[0], 10.5);
}

TEST(ChooseLane, PicksEarlierLane) {
  SchedulingContext ctx = oneZone(20.0);
  PredecessorPlan k;
  k.arrivals[1] = 21.92;
  k.vAvg = 12.5;
  ctx.predecessorByLane[1] = k;
  ctx.entryLane = 1;
  EXPECT_NEAR(arrivalTimes(ctx, 1).arrivals[0], 22.4, 1e-12);
  const SchedulePlan p = chooseLane(ctx);
  EXPECT_EQ(p.lane, 2);
  EXPECT_DOUBLE_EQ(p.arrivals[0], 20.0);

  ctx.laneChangeZoneOccupied = true;
  EXPECT_EQ(chooseLane(ctx).lane, 1);
}

TEST(ChooseLane, TieKeepsEntryLane) {
  SchedulingContext ctx = oneZone(20.0);
  ctx.entryLane = 2;
  EXPECT_EQ(chooseLane(ctx).lane, 2);
}

TEST(IdleTime, WorstCase) {
  EXPECT_NEAR(idleTime(0.5, 5.0), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(idleTime(0.0, 5.0), 0.0);
}

TEST(ArrivalTimes, ZeroIdleMatchesAndBruteForceAgrees) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const SchedulingContext ctx = verify::schedulingCase(rng);
    const SchedulePlan a = arrivalTimes(ctx, 1);
    const SchedulePlan b = arrivalTimes(ctx, 1, 0.0);
    EXPECT_EQ(a.arrivals, b.arrivals);
    EXPECT_EQ(a.arrivals, verify::bruteForceArrivals(ctx, 1));
    for (std::size_t k = 0; k < a.zones.size(); ++k) {
      EXPECT_GE(a.arrivals[k], a.lowerBounds[k]);
      EXPECT_FALSE(verify::overlapsBooking(ctx, a.zones[k], a.arrivals[k], a.occupancy[k]));
      if (k > 0) {
        EXPECT_GE(a.arrivals[k], a.arrivals[k - 1] + a.occupancy[k - 1]);
      }
    }
    EXPECT_DOUBLE_EQ(a.exitTime, a.arrivals.back() + a.occupancy.back());
  }
}

TEST(ArrivalTimes, IdleBufferSeparatesIntervals) {
  std::mt19937_64 rng(5);
  const double idle = 0.2;
  for (int i = 0; i < 300; ++i) {
    const SchedulingContext ctx = verify::schedulingCase(rng);
    const SchedulePlan a = arrivalTimes(ctx, 1, idle);
    for (std::size_t k = 0; k < a.zones.size(); ++k) {
      const auto it = ctx.bookings.find(a.zones[k]);
      if (it == ctx.bookings.end()) continue;
      for (const ZoneBooking& j : it->second) {
        const bool before = a.arrivals[k] + a.occupancy[k] + idle <= j.arrival + 1e-12;
        const bool after = j.arrival + j.occupancy + idle <= a.arrivals[k] + 1e-12;
        EXPECT_TRUE(before || after);
      }
    }
  }
}

TEST(BoundaryFromPlan, PointsFollowZones) {
  PathSpec p;
  p.zonesOnPath = {1, 2};
  p.zoneEntryOffsets = {150.0, 240.0};
  p.pathLength = 255.0;
  SchedulingContext ctx = oneZone(12.0);
  ctx.path = p;
  const SchedulePlan plan = arrivalTimes(ctx, 1);
  const BoundaryData b = boundaryFromPlan(plan, p, 0.0, 12.5, 15.0);
  ASSERT_EQ(b.interiorPoints.size(), 3u);
  EXPECT_DOUBLE_EQ(b.interiorPoints[0].position, 150.0);
  EXPECT_DOUBLE_EQ(b.interiorPoints[1].position, 165.0);
  EXPECT_DOUBLE_EQ(b.interiorPoints[2].position, 240.0);
  EXPECT_DOUBLE_EQ(b.pf, 255.0);
  EXPECT_NEAR(b.tf, 20.4, 1e-12);
}
