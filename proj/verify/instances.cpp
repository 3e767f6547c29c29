#include "instances.hpp"

#include <cmath>

namespace cavcoord::verify {

namespace {

constexpr double kL = 150.0;
constexpr double kS = 15.0;

double ms(double t) { return std::round(t * 1000.0) / 1000.0; }

double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

int pick(std::mt19937_64& rng, int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(rng);
}

// Zone entries at `arrivals` (one per zone), occupancy S / v, exits at the
// final zone's end.
BoundaryData fromArrivals(double t0, double v0, const std::vector<double>& entries,
                          const std::vector<double>& arrivals, double occupancySpeed) {
  BoundaryData b;
  b.t0 = ms(t0);
  b.p0 = 0.0;
  b.v0 = v0;
  const std::size_t n = entries.size();
  const double occ = kS / occupancySpeed;
  for (std::size_t k = 0; k < n; ++k) {
    b.interiorPoints.push_back({ms(arrivals[k]), entries[k]});
    if (k + 1 < n) b.interiorPoints.push_back({ms(arrivals[k] + occ), entries[k] + kS});
  }
  b.tf = ms(arrivals.back() + occ);
  b.pf = entries.back() + kS;
  return b;
}

std::vector<double> zoneEntries(std::mt19937_64& rng, int n) {
  std::vector<double> e{kL};
  for (int k = 1; k < n; ++k) e.push_back(e.back() + kS + std::round(uniform(rng, 30.0, 75.0)));
  return e;
}

}  // namespace

std::vector<BoundaryData> exactnessInstances(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BoundaryData> out;
  for (int i = 0; i < count; ++i) {
    const int n = 1 + i % 3;
    const double v0 = uniform(rng, 8.0, 13.0);
    const double t0 = uniform(rng, 0.0, 30.0);
    const auto e = zoneEntries(rng, n);
    std::vector<double> a{t0 + kL / v0 * uniform(rng, 0.9, 1.4)};
    for (int k = 1; k < n; ++k) {
      a.push_back(a.back() + kS / v0 + (e[k] - e[k - 1] - kS) / v0 * uniform(rng, 0.85, 1.4));
    }
    out.push_back(fromArrivals(t0, v0, e, a, v0));
  }
  return out;
}

OracleInstance unconstrainedCandidate(std::mt19937_64& rng) {
  OracleInstance c;
  c.name = "unconstrained";
  const int n = pick(rng, 1, 3);
  const double v0 = uniform(rng, 9.0, 13.0);
  const auto e = zoneEntries(rng, n);
  std::vector<double> a{kL / v0 * uniform(rng, 0.97, 1.15)};
  for (int k = 1; k < n; ++k) {
    a.push_back(a.back() + kS / v0 + (e[k] - e[k - 1] - kS) / v0 * uniform(rng, 0.97, 1.2));
  }
  c.boundary = fromArrivals(0.0, ms(v0), e, a, v0);
  return c;
}

OracleInstance speedLimitCandidate(std::mt19937_64& rng) {
  OracleInstance c;
  c.name = "speed-max";
  c.expected = ArcKind::SpeedMax;
  const double v0 = ms(uniform(rng, 11.0, 13.0));
  c.limits.vMax = ms(v0 + uniform(rng, 0.3, 1.2));
  const int n = pick(rng, 1, 2);
  const auto e = zoneEntries(rng, n);
  const double avg = v0 + (c.limits.vMax - v0) * uniform(rng, 0.55, 0.85);
  std::vector<double> a{kL / avg};
  for (int k = 1; k < n; ++k) a.push_back(a.back() + (e[k] - e[k - 1]) / avg);
  c.boundary = fromArrivals(0.0, v0, e, a, avg);
  return c;
}

OracleInstance controlLimitCandidate(std::mt19937_64& rng) {
  OracleInstance c;
  const double v0 = ms(uniform(rng, 10.0, 13.0));
  const int variant = pick(rng, 0, 2);
  double factor = 1.0;
  if (variant == 0) {  // late arrival, gentle brake limit
    c.name = "control-min";
    c.expected = ArcKind::ControlMin;
    c.limits.uMin = -ms(uniform(rng, 0.6, 1.0));
    factor = uniform(rng, 1.3, 1.6);
  } else if (variant == 1) {  // early arrival, weak engine
    c.name = "control-max";
    c.expected = ArcKind::ControlMax;
    c.limits.uMax = ms(uniform(rng, 0.25, 0.45));
    factor = uniform(rng, 0.8, 0.88);
  } else {  // very late arrival against a speed floor
    c.name = "speed-min";
    c.expected = ArcKind::SpeedMin;
    c.limits.vMin = ms(uniform(rng, 5.0, 7.0));
    factor = uniform(rng, 1.45, 1.75);
  }
  const auto e = zoneEntries(rng, 1);
  c.boundary = fromArrivals(0.0, v0, e, {kL / v0 * factor}, v0);
  return c;
}

OracleInstance rearEndCandidate(std::mt19937_64& rng) {
  OracleInstance c;
  c.name = "rear-end";
  c.expected = ArcKind::RearEndFollow;
  const auto e = zoneEntries(rng, 1);
  const double vp = ms(uniform(rng, 11.0, 13.0));
  const double ap = kL / vp * uniform(rng, 1.15, 1.35);
  c.predecessor = fromArrivals(0.0, vp, e, {ap}, vp);
  const double t0 = ms(uniform(rng, 0.6, 1.2));
  const double v0 = ms(vp * uniform(rng, 0.97, 1.0));
  const double a = ap + c.gap / vp + uniform(rng, 0.0, 0.3);
  c.boundary = fromArrivals(t0, v0, e, {a}, v0);
  return c;
}

std::shared_ptr<const Trajectory> predecessorTrajectory(const OracleInstance& inst) {
  if (!inst.predecessor) return nullptr;
  return std::make_shared<const Trajectory>(
      solveConstrained(*inst.predecessor, inst.limits, nullptr, inst.gap));
}

SchedulingContext schedulingCase(std::mt19937_64& rng) {
  SchedulingContext ctx;
  const int n = pick(rng, 1, 3);
  ctx.path.movement = {Approach::Eastbound, -1};
  ctx.path.entryLane = 1;
  double x = kL;
  for (int k = 0; k < n; ++k) {
    ctx.path.zonesOnPath.push_back(k + 1);
    ctx.path.zoneEntryOffsets.push_back(x);
    x += kS + std::round(uniform(rng, 30.0, 75.0));
  }
  ctx.path.pathLength = ctx.path.zoneEntryOffsets.back() + kS;
  ctx.t0 = ms(uniform(rng, 0.0, 5.0));
  ctx.v0 = ms(uniform(rng, 8.0, 13.0));
  ctx.zoneLength = kS;
  ctx.safeDistance = 6.0;
  ctx.entryLane = 1;
  ctx.lanes = 1;
  if (pick(rng, 0, 4) == 0) {
    ctx.earliestFirstArrival = ms(ctx.t0 + kL / ctx.v0 + uniform(rng, 0.0, 2.0));
  }

  // Rough free-flow arrival per zone to centre the random bookings on.
  std::vector<double> free;
  for (double off : ctx.path.zoneEntryOffsets) free.push_back(ctx.t0 + off / ctx.v0);

  const int plans = pick(rng, 0, 4);
  bool havePred = false;
  for (int j = 0; j < plans; ++j) {
    if (!havePred && pick(rng, 0, 3) == 0) {
      havePred = true;
      PredecessorPlan pp;
      pp.vehicle = 100 + j;
      pp.vAvg = ms(uniform(rng, 8.0, 13.0));
      for (int k = 0; k < n; ++k) pp.arrivals[k + 1] = ms(free[k] - uniform(rng, -0.5, 1.5));
      ctx.predecessorByLane[1] = pp;
      continue;
    }
    const int zone = pick(rng, 1, n);
    // Several bookings per vehicle id are allowed: a conflicting vehicle can
    // be booked in more than one zone of the path.
    const int count = pick(rng, 1, 2);
    for (int q = 0; q < count; ++q) {
      ZoneBooking b;
      b.vehicle = 100 + j;
      b.arrival = ms(free[zone - 1] + uniform(rng, -2.0, 3.0) + 1.6 * q);
      b.occupancy = ms(kS / uniform(rng, 8.0, 13.0));
      ctx.bookings[zone].push_back(b);
    }
  }
  return ctx;
}

// Frozen table, see oracle_table.inc. Each row was drawn from the candidate
// generators above with a fixed seed, kept only if the solver produced the
// expected arc kind, and its QP cost recorded at that time.
const std::vector<OracleInstance>& oracleInstances() {
  static const std::vector<OracleInstance> table = [] {
    std::vector<OracleInstance> t;
#include "oracle_table.inc"
    return t;
  }();
  return table;
}

}  // namespace cavcoord::verify
