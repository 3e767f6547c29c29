#include "cavcoord/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "cavcoord/coordinator.hpp"

namespace cavcoord {

void FlowSpec::validate(const VehicleLimits& limits) const {
  if (!(volume > 0.0)) throw ValidationError("flow volume must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("demand horizon must be > 0");
  if (!(speedMin <= speedMax)) throw ValidationError("entry speed range is reversed");
  if (!(speedMin > limits.vMin && speedMax < limits.vMax)) {
    throw ValidationError("entry speed range must lie inside (vMin, vMax)");
  }
}

std::vector<RawArrival> generateArrivals(const Corridor& corridor, const FlowSpec& flow) {
  std::vector<RawArrival> out;
  std::vector<double> lengths;
  std::uint64_t stream = 0;
  for (const Movement& m : corridor.movements()) {
    for (int lane = 1; lane <= corridor.lanesPerRoad(); ++lane, ++stream) {
      std::seed_seq seq{static_cast<std::uint32_t>(flow.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(flow.seed >> 32),
                        static_cast<std::uint32_t>(stream)};
      std::mt19937_64 rng(seq);
      std::exponential_distribution<double> headway(flow.volume / 3600.0);
      std::uniform_real_distribution<double> speed(flow.speedMin, flow.speedMax);
      double t = 0.0;
      while (true) {
        t += headway(rng);
        if (t >= flow.horizon) break;
        RawArrival a;
        a.t = t;
        a.movement = m;
        a.lane = lane;
        a.v0 = speed(rng);
        a.tieKey = rng();
        out.push_back(a);
      }
    }
  }
  std::map<Movement, double> len;
  for (const Movement& m : corridor.movements()) len[m] = corridor.path(m, 1).pathLength;
  std::stable_sort(out.begin(), out.end(), [&](const RawArrival& a, const RawArrival& b) {
    if (a.t != b.t) return a.t < b.t;
    if (len[a.movement] != len[b.movement]) return len[a.movement] < len[b.movement];
    return a.tieKey < b.tieKey;
  });
  return out;
}

bool entryGapHolds(double gap, double v0, double uMin, double leaderP, double leaderV) {
  const double closing = v0 > leaderV ? (v0 * v0 - leaderV * leaderV) / (2.0 * -uMin) : 0.0;
  return leaderP >= gap + closing;
}

int laneLabel(const PlannedVehicle& v, double p, double laneChangeZoneLength) {
  return p <= laneChangeZoneLength ? v.path.entryLane : v.finalLane;
}

std::vector<Frame> playback(const std::vector<PlannedVehicle>& vehicles, const Corridor& corridor,
                            double step, bool parallel) {
  if (!(step > 0.0)) throw ValidationError("playback step must be > 0");
  if (vehicles.empty()) return {};
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  for (const auto& v : vehicles) {
    tmin = std::min(tmin, v.trajectory->t0());
    tmax = std::max(tmax, v.trajectory->tf());
  }
  const long k0 = static_cast<long>(std::ceil(tmin / step - 1e-9));
  const long k1 = static_cast<long>(std::floor(tmax / step + 1e-9));
  const long n = std::max(0L, k1 - k0 + 1);
  std::vector<Frame> frames(n);
  const ZoneLocator zones(corridor);
  const double lc = corridor.laneChangeZoneLength();

  auto fill = [&](long k) {
    Frame& f = frames[k];
    f.t = static_cast<double>(k0 + k) * step;
    for (const auto& v : vehicles) {
      const Trajectory& tr = *v.trajectory;
      if (f.t < tr.t0() || f.t > tr.tf()) continue;
      const KinematicState s = tr.evaluate(f.t);
      VehicleSnapshot snap;
      snap.id = v.id;
      snap.movement = v.path.movement;
      snap.lane = laneLabel(v, s.p, lc);
      snap.p = s.p;
      snap.v = s.v;
      snap.u = s.u;
      snap.zone = zones.zoneAt(v.path.movement, s.p);
      f.vehicles.push_back(snap);
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) fill(k);
  } else {
    for (long k = 0; k < n; ++k) fill(k);
  }
  return frames;
}

std::vector<EnvelopeSample> speedEnvelope(const std::vector<Frame>& frames) {
  std::vector<EnvelopeSample> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) {
    if (f.vehicles.empty()) continue;
    EnvelopeSample e;
    e.t = f.t;
    e.count = static_cast<int>(f.vehicles.size());
    e.vMin = std::numeric_limits<double>::infinity();
    e.vMax = -e.vMin;
    for (const auto& v : f.vehicles) {
      e.vMin = std::min(e.vMin, v.v);
      e.vMax = std::max(e.vMax, v.v);
      e.vMean += v.v;
    }
    e.vMean /= e.count;
    out.push_back(e);
  }
  return out;
}

namespace {

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string arcSummary(const Trajectory& tr) {
  std::string s;
  for (const Arc& a : tr.arcs()) {
    if (!s.empty()) s += '|';
    s += arcKindName(a.kind);
  }
  return s;
}

struct Stream {
  std::deque<RawArrival> queue;
  double ready = -std::numeric_limits<double>::infinity();
  double pathLength = 0.0;
  bool heldLogged = false;
};

// Samples a trajectory for fuel and the minimum speed: t0, interior grid
// points, tf.
void vehicleSamples(const Trajectory& tr, double step, std::vector<double>& t,
                    std::vector<double>& v, std::vector<double>& u) {
  auto push = [&](double tt) {
    const auto s = tr.evaluate(tt);
    t.push_back(tt);
    v.push_back(s.v);
    u.push_back(s.u);
  };
  push(tr.t0());
  long k = static_cast<long>(std::floor(tr.t0() / step)) + 1;
  for (; static_cast<double>(k) * step < tr.tf(); ++k) {
    const double tt = static_cast<double>(k) * step;
    if (tt > tr.t0()) push(tt);
  }
  push(tr.tf());
}

class OptimalRun {
 public:
  OptimalRun(const Corridor& c, const VehicleLimits& l, const FlowSpec& f, const SimOptions& o)
      : corridor_(c), limits_(l), flow_(f), options_(o),
        coord_(c, c.laneChangeZoneLength()),
        gap_(applyTrackingMargin(l)),
        tIdle_(o.idleTime ? idleTime(l.trackingError, l.vMin) : 0.0) {}

  void admitAll() {
    std::map<std::pair<Movement, int>, Stream> streams;
    for (const RawArrival& a : generateArrivals(corridor_, flow_)) {
      Stream& s = streams[{a.movement, a.lane}];
      s.queue.push_back(a);
      s.pathLength = corridor_.path(a.movement, a.lane).pathLength;
    }
    while (true) {
      Stream* best = nullptr;
      double bestT = 0.0;
      for (auto& [key, s] : streams) {
        if (s.queue.empty()) continue;
        const double c = std::max(s.queue.front().t, s.ready);
        if (!best || c < bestT ||
            (c == bestT && (s.pathLength < best->pathLength ||
                            (s.pathLength == best->pathLength &&
                             s.queue.front().tieKey < best->queue.front().tieKey)))) {
          best = &s;
          bestT = c;
        }
      }
      if (!best) break;
      const double t = bestT;
      for (int id : coord_.deregisterExited(t)) {
        events_.push_back({coord_.record(id).committed->plan.exitTime, "exit", id, ""});
      }
      const RawArrival a = best->queue.front();
      if (!gateOpen(a, t)) {
        if (!best->heldLogged) {
          events_.push_back({t, "held", 0,
                             std::string(approachName(a.movement.approach)) + " lane " +
                                 std::to_string(a.lane)});
          best->heldLogged = true;
        }
        best->ready = t + options_.gateStep;
        continue;
      }
      best->queue.pop_front();
      best->ready = t;
      best->heldLogged = false;
      plan(a, t);
    }
    for (int id : coord_.deregisterExited(std::numeric_limits<double>::infinity())) {
      events_.push_back({coord_.record(id).committed->plan.exitTime, "exit", id, ""});
    }
  }

  RunArtifacts finish(const FuelModelCoefficients& fuel) {
    RunArtifacts run;
    run.mode = "optimal";
    run.volume = flow_.volume;
    run.seed = flow_.seed;
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    run.events = std::move(events_);

    const long n = static_cast<long>(planned_.size());
    auto measure = [&](long i) {
      const Trajectory& tr = *planned_[i].trajectory;
      std::vector<double> t, v, u;
      vehicleSamples(tr, options_.playbackStep, t, v, u);
      VehicleResult& r = results_[i];
      r.fuel = integrateFuel(fuel, t, v, u);
      r.minSpeed = *std::min_element(v.begin(), v.end());
    };
    if (options_.parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long i = 0; i < n; ++i) measure(i);
    } else {
      for (long i = 0; i < n; ++i) measure(i);
    }
    run.vehicles = results_;

    std::vector<Frame> frames =
        playback(planned_, corridor_, options_.playbackStep, options_.parallel);
    run.violations = monitorFrames(frames, corridor_, gap_, options_.parallel);
    run.envelope = speedEnvelope(frames);
    if (options_.keepFrames) run.frames = std::move(frames);
    return run;
  }

 private:
  bool gateOpen(const RawArrival& a, double t) const {
    for (int id : coord_.activeIds()) {
      const VehicleRecord& r = coord_.record(id);
      if (r.entry.path.movement != a.movement || !r.committed) continue;
      const Trajectory& tr = *r.committed->trajectory;
      if (t > tr.tf()) continue;
      const auto s = tr.evaluate(std::max(t, tr.t0()));
      if (!entryGapHolds(gap_, a.v0, limits_.uMin, s.p, s.v)) return false;
    }
    return true;
  }

  // Same-lane gap over the playback grid against every committed vehicle of
  // the movement, using lane labels the way the monitor does.
  bool labelGapsHold(int id, const PlannedVehicle& cand) const {
    const Trajectory& mine = *cand.trajectory;
    const double h = options_.playbackStep;
    const double lc = corridor_.laneChangeZoneLength();
    for (const PlannedVehicle& q : planned_) {
      if (q.path.movement != cand.path.movement || q.id == id) continue;
      const Trajectory& other = *q.trajectory;
      const double a = std::max(mine.t0(), other.t0());
      const double b = std::min(mine.tf(), other.tf());
      if (a > b) continue;
      for (long k = static_cast<long>(std::ceil(a / h - 1e-9)); k * h <= b + 1e-12; ++k) {
        const double t = static_cast<double>(k) * h;
        if (t < a || t > b) continue;
        const double pi = mine.evaluate(t).p;
        const double pq = other.evaluate(t).p;
        if (laneLabel(cand, pi, lc) != laneLabel(q, pq, lc)) continue;
        if (std::abs(pq - pi) < gap_ - 1e-6) return false;
      }
    }
    return true;
  }

  std::optional<Trajectory> trySolve(int id, const SchedulingContext& ctx,
                                     const SchedulePlan& plan, SolveStats& stats) {
    const BoundaryData b =
        boundaryFromPlan(plan, ctx.path, ctx.t0, ctx.v0, corridor_.mergingZoneLength());
    std::shared_ptr<const Trajectory> pred;
    if (const auto k = coord_.immediatePredecessor(id, plan.lane)) {
      pred = coord_.record(*k).committed->trajectory;
    }
    try {
      Trajectory tr = solveConstrained(b, limits_, pred, gap_, options_.solver, &stats);
      PlannedVehicle cand{id, ctx.path, plan.lane, std::make_shared<const Trajectory>(tr)};
      if (!labelGapsHold(id, cand)) return std::nullopt;
      return tr;
    } catch (const InfeasibleTrajectory&) {
      return std::nullopt;
    }
  }

  void plan(const RawArrival& a, double t) {
    const auto start = std::chrono::steady_clock::now();
    EntryState entry{corridor_.path(a.movement, a.lane), t, a.v0};
    const int id = coord_.registerVehicle(entry);
    events_.push_back({t, "enter", id,
                       std::string(approachName(a.movement.approach)) + " lane " +
                           std::to_string(a.lane) + " v0 " + fmt("%.6f", a.v0)});
    SchedulingContext ctx = coord_.schedulingContext(id, gap_);
    ctx.trajectoryRearEnd = options_.trajectoryRearEnd;
    ctx.rearEndMargin = options_.rearEndMargin;
    const double slot = zoneOccupancyDuration(a.v0, corridor_.mergingZoneLength());
    SolveStats stats;
    int reschedules = 0;
    std::optional<SchedulePlan> chosen;
    std::optional<Trajectory> tr;
    while (true) {
      SchedulePlan p = chooseLane(ctx, tIdle_);
      const double firstArrival = p.arrivals.front();
      tr = trySolve(id, ctx, p, stats);
      if (!tr && p.lane != ctx.entryLane) {
        p = arrivalTimes(ctx, ctx.entryLane, tIdle_);
        tr = trySolve(id, ctx, p, stats);
      }
      if (tr) {
        chosen = std::move(p);
        break;
      }
      if (++reschedules > options_.maxReschedules) {
        throw std::runtime_error("vehicle " + std::to_string(id) +
                                 ": no feasible trajectory after " +
                                 std::to_string(options_.maxReschedules) + " re-schedules");
      }
      ctx.earliestFirstArrival = firstArrival + slot;
      events_.push_back({t, "reschedule", id, "first zone " + fmt("%.6f", ctx.earliestFirstArrival)});
    }
    auto shared = std::make_shared<const Trajectory>(std::move(*tr));
    coord_.commit(id, *chosen, shared);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();

    std::ostringstream det;
    det << "lane " << chosen->lane << " arrivals";
    for (double z : chosen->arrivals) det << ' ' << fmt("%.6f", z);
    events_.push_back({t, "commit", id, det.str()});

    planned_.push_back({id, entry.path, chosen->lane, shared});
    VehicleResult r;
    r.id = id;
    r.movement = a.movement;
    r.entryLane = a.lane;
    r.finalLane = chosen->lane;
    r.t0 = t;
    r.v0 = a.v0;
    r.tf = shared->tf();
    r.pathLength = entry.path.pathLength;
    r.travelTime = r.tf - r.t0;
    r.delay = timeDelay(r.t0, r.tf, 0.0, r.pathLength, r.v0);
    r.latencyMs = ms;
    r.reschedules = reschedules;
    r.unconflicted = reschedules == 0 && chosen->unconstrained();
    r.arcs = arcSummary(*shared);
    results_.push_back(r);
  }

  const Corridor& corridor_;
  VehicleLimits limits_;
  FlowSpec flow_;
  SimOptions options_;
  Coordinator coord_;
  double gap_;
  double tIdle_;
  std::vector<Event> events_;
  std::vector<PlannedVehicle> planned_;
  std::vector<VehicleResult> results_;
};

}  // namespace

RunArtifacts runOptimal(const Corridor& corridor, const VehicleLimits& limits,
                        const FlowSpec& flow, const SimOptions& options,
                        const FuelModelCoefficients& fuel) {
  limits.validate();
  flow.validate(limits);
  OptimalRun run(corridor, limits, flow, options);
  run.admitAll();
  RunArtifacts out = run.finish(fuel);
  if (!out.violations.empty()) {
    const Violation& v = out.violations.front();
    throw MonitorFailure("monitor: " + v.kind + " violation at t=" + fmt("%.3f", v.t) +
                             " between vehicles " + std::to_string(v.leader) + " and " +
                             std::to_string(v.follower),
                         out.violations);
  }
  return out;
}

}  // namespace cavcoord
