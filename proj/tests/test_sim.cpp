#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <memory>

#include "cavcoord/config.hpp"
#include "cavcoord/monitor.hpp"
#include "cavcoord/scheduler.hpp"
#include "cavcoord/sim.hpp"

using namespace cavcoord;

namespace {

const Movement kEB{Approach::Eastbound, -1};
const Movement kNB0{Approach::Northbound, 0};

// A short-horizon flow that yields exactly one arrival.
FlowSpec singleArrivalFlow(const Corridor& c) {
  FlowSpec f;
  f.volume = 200.0;
  f.horizon = 1.0;
  for (std::uint64_t s = 1; s < 10000; ++s) {
    f.seed = s;
    if (generateArrivals(c, f).size() == 1) return f;
  }
  throw std::runtime_error("no single-arrival seed");
}

std::shared_ptr<const Trajectory> cruisePlan(const Corridor& c, const Movement& m, double t0,
                                             double v0, SchedulePlan* out = nullptr) {
  SchedulingContext ctx;
  ctx.path = c.path(m, 1);
  ctx.t0 = t0;
  ctx.v0 = v0;
  const SchedulePlan p = arrivalTimes(ctx, 1);
  if (out) *out = p;
  return std::make_shared<const Trajectory>(
      solveUnconstrained(boundaryFromPlan(p, ctx.path, t0, v0, 15.0)).trajectory);
}

}  // namespace

TEST(Arrivals, MeanHeadway) {
  const Corridor c = buildCorridor({});
  for (double volume : {600.0, 1400.0}) {
    FlowSpec f;
    f.volume = volume;
    f.horizon = 7200.0;
    f.seed = 4;
    const auto arr = generateArrivals(c, f);
    std::map<std::pair<Movement, int>, std::vector<double>> streams;
    for (const RawArrival& a : arr) streams[{a.movement, a.lane}].push_back(a.t);
    EXPECT_EQ(streams.size(), 16u);
    for (const auto& [_, ts] : streams) {
      const double mean = (ts.back() - ts.front()) / (ts.size() - 1);
      EXPECT_NEAR(mean, 3600.0 / volume, 0.1 * 3600.0 / volume);
    }
    for (std::size_t i = 1; i < arr.size(); ++i) EXPECT_LE(arr[i - 1].t, arr[i].t);
    for (const RawArrival& a : arr) {
      EXPECT_GE(a.v0, f.speedMin);
      EXPECT_LE(a.v0, f.speedMax);
    }
  }
}

TEST(Arrivals, SeedDeterminism) {
  const Corridor c = buildCorridor({});
  FlowSpec f;
  f.seed = 3;
  const auto a = generateArrivals(c, f);
  const auto b = generateArrivals(c, f);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].t, b[i].t);
    EXPECT_EQ(a[i].v0, b[i].v0);
  }
  f.seed = 4;
  EXPECT_NE(generateArrivals(c, f).front().t, a.front().t);
}

TEST(Arrivals, FlowValidation) {
  VehicleLimits l;
  FlowSpec f;
  f.volume = 0.0;
  EXPECT_THROW(f.validate(l), ValidationError);
  f = {};
  f.speedMax = l.vMax + 1.0;
  EXPECT_THROW(f.validate(l), ValidationError);
}

TEST(EntryGap, BrakingDistance) {
  // same speed: plain gap
  EXPECT_TRUE(entryGapHolds(6.0, 12.0, -5.0, 6.0, 12.0));
  EXPECT_FALSE(entryGapHolds(6.0, 12.0, -5.0, 5.9, 12.0));
  // slower leader needs (v0^2 - vL^2) / 2|uMin| extra
  EXPECT_FALSE(entryGapHolds(6.0, 12.0, -5.0, 10.0, 7.0));
  EXPECT_TRUE(entryGapHolds(6.0, 12.0, -5.0, 6.0 + 9.5 + 1e-9, 7.0));
}

TEST(RunOptimal, SingleVehicleCruises) {
  const Corridor c = buildCorridor({});
  const FlowSpec f = singleArrivalFlow(c);
  SimOptions o;
  o.keepFrames = true;
  const RunArtifacts run = runOptimal(c, VehicleLimits{}, f, o);
  ASSERT_EQ(run.vehicles.size(), 1u);
  const VehicleResult& v = run.vehicles[0];
  EXPECT_NEAR(v.travelTime, v.pathLength / v.v0, 1e-9);
  EXPECT_NEAR(v.delay, 0.0, 1e-9);
  EXPECT_TRUE(v.unconflicted);
  EXPECT_TRUE(run.violations.empty());
  EXPECT_FALSE(run.frames.empty());
}

TEST(RunOptimal, ZeroViolationsAndNonNegativeDelay) {
  const ScenarioConfig cfg = scenarioOne();
  const Corridor c = buildCorridor(cfg.corridor);
  const RunArtifacts run = runOptimal(c, cfg.limits, cfg.flow(1000.0, 2), SimOptions{});
  EXPECT_TRUE(run.violations.empty());
  EXPECT_GT(run.vehicles.size(), 50u);
  for (const VehicleResult& v : run.vehicles) {
    EXPECT_GE(v.delay, -1e-9);
    if (v.unconflicted) {
      EXPECT_LT(std::abs(v.delay), 1e-6);
    }
    EXPECT_GT(v.minSpeed, 0.0);
    EXPECT_GE(v.latencyMs, 0.0);
  }
}

TEST(RunOptimal, Deterministic) {
  const ScenarioConfig cfg = scenarioTwo();
  const Corridor c = buildCorridor(cfg.corridor);
  const RunArtifacts a = runOptimal(c, cfg.limits, cfg.flow(800.0, 1), SimOptions{});
  const RunArtifacts b = runOptimal(c, cfg.limits, cfg.flow(800.0, 1), SimOptions{});
  ASSERT_EQ(a.vehicles.size(), b.vehicles.size());
  for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
    EXPECT_EQ(a.vehicles[i].tf, b.vehicles[i].tf);
    EXPECT_EQ(a.vehicles[i].fuel, b.vehicles[i].fuel);
    EXPECT_EQ(a.vehicles[i].finalLane, b.vehicles[i].finalLane);
  }
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].t, b.events[i].t);
    EXPECT_EQ(a.events[i].event, b.events[i].event);
  }
}

TEST(Monitor, FiresOnShrunkArrival) {
  const Corridor c = buildCorridor({});
  SchedulePlan leadPlan;
  auto lead = cruisePlan(c, kEB, 0.0, 12.5, &leadPlan);

  SchedulingContext ctx;
  ctx.path = c.path(kEB, 1);
  ctx.t0 = 1.0;
  ctx.v0 = 12.5;
  PredecessorPlan pp;
  for (std::size_t k = 0; k < leadPlan.zones.size(); ++k) {
    pp.arrivals[leadPlan.zones[k]] = leadPlan.arrivals[k];
  }
  pp.vAvg = 12.5;
  ctx.predecessorByLane[1] = pp;
  SchedulePlan plan = arrivalTimes(ctx, 1);
  auto ok = std::make_shared<const Trajectory>(
      solveUnconstrained(boundaryFromPlan(plan, ctx.path, 1.0, 12.5, 15.0)).trajectory);

  std::vector<PlannedVehicle> vs{{1, ctx.path, 1, lead}, {2, ctx.path, 1, ok}};
  EXPECT_TRUE(monitorFrames(playback(vs, c, 0.01, false), c, 6.0, false).empty());

  const double shrink = 2.0 * plan.occupancy[0];
  for (double& t : plan.arrivals) t -= shrink;
  plan.exitTime -= shrink;
  vs[1].trajectory = std::make_shared<const Trajectory>(
      solveUnconstrained(boundaryFromPlan(plan, ctx.path, 1.0, 12.5, 15.0)).trajectory);
  const auto v = monitorFrames(playback(vs, c, 0.01, false), c, 6.0, false);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, "rear_end");
}

TEST(Monitor, LateralOverlap) {
  const Corridor c = buildCorridor({});
  auto a = cruisePlan(c, kEB, 0.0, 12.5);
  auto b = cruisePlan(c, kNB0, 0.3, 12.5);  // both inside zone 1 around t = 12.5
  std::vector<PlannedVehicle> vs{{1, c.path(kEB, 1), 1, a}, {2, c.path(kNB0, 1), 1, b}};
  const auto v = monitorFrames(playback(vs, c, 0.01, false), c, 6.0, false);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, "lateral");
  EXPECT_EQ(v.front().zone, 1);

  // touching intervals are fine: b enters as a leaves
  auto d = cruisePlan(c, kNB0, 1.2, 12.5);
  vs[1].trajectory = d;
  EXPECT_TRUE(monitorFrames(playback(vs, c, 0.01, false), c, 6.0, false).empty());
}

TEST(Monitor, SingleVehicleVacuous) {
  const Corridor c = buildCorridor({});
  std::vector<PlannedVehicle> vs{{1, c.path(kEB, 1), 1, cruisePlan(c, kEB, 0.0, 12.5)}};
  EXPECT_TRUE(monitorFrames(playback(vs, c, 0.01, true), c, 6.0, true).empty());
}

TEST(Playback, SerialMatchesParallel) {
  const ScenarioConfig cfg = scenarioOne();
  const Corridor c = buildCorridor(cfg.corridor);
  SimOptions o;
  o.keepFrames = true;
  o.parallel = false;
  const RunArtifacts run = runOptimal(c, cfg.limits, cfg.flow(1200.0, 1), o);
  ASSERT_FALSE(run.frames.empty());

  const auto serial = monitorFrames(run.frames, c, 6.0, false);
  const auto parallel = monitorFrames(run.frames, c, 6.0, true);
  EXPECT_EQ(serial.size(), parallel.size());

  SimOptions p = o;
  p.parallel = true;
  const RunArtifacts run2 = runOptimal(c, cfg.limits, cfg.flow(1200.0, 1), p);
  ASSERT_EQ(run.frames.size(), run2.frames.size());
  for (std::size_t i = 0; i < run.frames.size(); ++i) {
    ASSERT_EQ(run.frames[i].vehicles.size(), run2.frames[i].vehicles.size());
    for (std::size_t k = 0; k < run.frames[i].vehicles.size(); ++k) {
      EXPECT_EQ(run.frames[i].vehicles[k].p, run2.frames[i].vehicles[k].p);
      EXPECT_EQ(run.frames[i].vehicles[k].zone, run2.frames[i].vehicles[k].zone);
    }
  }
}

TEST(Playback, LaneLabelSwitchesAfterZone) {
  const Corridor c = buildCorridor({});
  PlannedVehicle v{1, c.path(kEB, 1), 2, nullptr};
  EXPECT_EQ(laneLabel(v, 10.0, 30.0), 1);
  EXPECT_EQ(laneLabel(v, 31.0, 30.0), 2);
}

TEST(Envelope, CountsAndBounds) {
  Frame f{1.0, {}};
  f.vehicles.push_back({1, kEB, 1, 0.0, 10.0, 0.0, 0});
  f.vehicles.push_back({2, kEB, 1, 20.0, 12.0, 0.0, 0});
  const auto env = speedEnvelope({f});
  ASSERT_EQ(env.size(), 1u);
  EXPECT_EQ(env[0].count, 2);
  EXPECT_DOUBLE_EQ(env[0].vMin, 10.0);
  EXPECT_DOUBLE_EQ(env[0].vMean, 11.0);
  EXPECT_DOUBLE_EQ(env[0].vMax, 12.0);
}
