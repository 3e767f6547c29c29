#include "cavcoord/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <string>

namespace cavcoord {

void SignalPlan::validate(int intersections) const {
  if (!(cycle > 0.0)) throw ValidationError("signal cycle must be > 0");
  if (!(greenSplit > 0.0 && greenSplit < 1.0)) {
    throw ValidationError("green split must lie in (0, 1)");
  }
  if (!(allRed >= 0.0)) throw ValidationError("all-red time must be >= 0");
  if (!(amber >= 0.0)) throw ValidationError("amber time must be >= 0");
  const double shortest = std::min(greenSplit, 1.0 - greenSplit) * cycle;
  if (!(shortest > allRed + amber)) {
    throw ValidationError("each phase must be longer than amber plus all-red");
  }
  if (!offsets.empty() && static_cast<int>(offsets.size()) != intersections) {
    throw ValidationError("need one signal offset per intersection");
  }
}

SignalState signalState(const SignalPlan& plan, int zone, bool northSouth, double t) {
  const double offset = plan.offsets.empty() ? 0.0 : plan.offsets.at(zone - 1);
  double tau = std::fmod(t - offset, plan.cycle);
  if (tau < 0.0) tau += plan.cycle;
  const double ns = plan.greenSplit * plan.cycle;
  const double start = northSouth ? 0.0 : ns;
  const double length = northSouth ? ns : plan.cycle - ns;
  double x = tau - start;
  if (x < 0.0) x += plan.cycle;
  if (x >= length - plan.allRed) return SignalState::Red;
  if (x >= length - plan.allRed - plan.amber) return SignalState::Amber;
  return SignalState::Green;
}

void CarFollowingParams::validate() const {
  if (!(desiredSpeed > 0.0 && maxAccel > 0.0 && comfortDecel > 0.0 && maxDecel > 0.0 &&
        headway > 0.0 && jamGap > 0.0 && exponent > 0.0)) {
    throw ValidationError("car-following parameters must all be > 0");
  }
  if (!(comfortDecel < maxDecel)) {
    throw ValidationError("comfortable deceleration must be below the maximum");
  }
}

double idmAcceleration(const CarFollowingParams& cf, double v, double v0, double s, double dv) {
  const double freeTerm = std::pow(v / v0, cf.exponent);
  if (!std::isfinite(s)) return cf.maxAccel * (1.0 - freeTerm);
  const double sStar = cf.jamGap + std::max(0.0, v * cf.headway +
                                                     v * dv / (2.0 * std::sqrt(cf.maxAccel *
                                                                               cf.comfortDecel)));
  const double ratio = sStar / std::max(s, 1e-3);
  return cf.maxAccel * (1.0 - freeTerm - ratio * ratio);
}

namespace {

enum Decision { Undecided = 0, Go = 1, Stop = 2 };

struct Car {
  int id = 0;
  Movement movement;
  int lane = 1;
  PathSpec path;
  bool northSouth = false;
  double t0 = 0.0;
  double v0 = 0.0;
  double desired = 0.0;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  double lineCap = std::numeric_limits<double>::infinity();
  std::vector<int> decision;
  std::vector<double> ts, vs, us;
  bool active = true;
};

struct Stream {
  std::deque<RawArrival> queue;
  bool heldLogged = false;
};

using LaneKey = std::pair<Movement, int>;

class BaselineRun {
 public:
  BaselineRun(const Corridor& c, const FlowSpec& f, const SignalPlan& s,
              const CarFollowingParams& cf, const BaselineOptions& o)
      : corridor_(c), flow_(f), signal_(s), cf_(cf), options_(o), zones_(c) {}

  RunArtifacts run(const FuelModelCoefficients& fuel) {
    std::map<LaneKey, Stream> streams;
    std::size_t pending = 0;
    for (const RawArrival& a : generateArrivals(corridor_, flow_)) {
      streams[{a.movement, a.lane}].queue.push_back(a);
      ++pending;
    }
    RunArtifacts out;
    out.mode = "baseline";
    out.volume = flow_.volume;
    out.seed = flow_.seed;

    const double h = options_.step;
    const double limit = flow_.horizon + options_.maxClearTime;
    for (long k = 0;; ++k) {
      const double t = static_cast<double>(k) * h;
      if (t > limit) {
        throw std::runtime_error("baseline did not clear within " +
                                 std::to_string(options_.maxClearTime) + " s of the horizon");
      }
      for (auto& [key, s] : streams) {
        if (s.queue.empty() || s.queue.front().t > t + 1e-12) continue;
        if (!admit(s.queue.front(), t)) {
          if (!s.heldLogged) {
            events_.push_back({t, "held", 0,
                               std::string(approachName(key.first.approach)) + " lane " +
                                   std::to_string(key.second)});
            s.heldLogged = true;
          }
          continue;
        }
        s.queue.pop_front();
        s.heldLogged = false;
        --pending;
      }
      if (pending == 0 && active_ == 0) break;
      observe(t, out);
      advance(t, h);
    }

    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    out.events = std::move(events_);
    for (std::size_t i = 0; i < cars_.size(); ++i) {
      VehicleResult& r = results_[i];
      r.fuel = integrateFuel(fuel, cars_[i].ts, cars_[i].vs, cars_[i].us);
      r.minSpeed = *std::min_element(cars_[i].vs.begin(), cars_[i].vs.end());
    }
    out.vehicles = std::move(results_);
    return out;
  }

 private:
  bool admit(const RawArrival& a, double t) {
    const auto it = lanes_.find({a.movement, a.lane});
    if (it != lanes_.end() && !it->second.empty()) {
      const Car& last = cars_[it->second.back()];
      if (!entryGapHolds(cf_.jamGap, a.v0, -cf_.maxDecel, last.p, last.v)) return false;
    }
    Car c;
    c.id = static_cast<int>(cars_.size()) + 1;
    c.movement = a.movement;
    c.lane = a.lane;
    c.path = corridor_.path(a.movement, a.lane);
    c.northSouth = !isCorridorApproach(a.movement.approach);
    c.t0 = t;
    c.v0 = a.v0;
    c.desired = cf_.useEntrySpeed ? a.v0 : cf_.desiredSpeed;
    c.v = a.v0;
    c.decision.assign(c.path.zonesOnPath.size(), Undecided);
    lanes_[{a.movement, a.lane}].push_back(cars_.size());
    events_.push_back({t, "enter", c.id,
                       std::string(approachName(a.movement.approach)) + " lane " +
                           std::to_string(a.lane)});
    VehicleResult r;
    r.id = c.id;
    r.movement = c.movement;
    r.entryLane = r.finalLane = c.lane;
    r.t0 = t;
    r.v0 = c.v0;
    r.pathLength = c.path.pathLength;
    results_.push_back(r);
    cars_.push_back(std::move(c));
    ++active_;
    return true;
  }

  void observe(double t, RunArtifacts& out) {
    Frame f;
    f.t = t;
    for (const auto& [key, q] : lanes_) {
      for (std::size_t i : q) {
        const Car& c = cars_[i];
        f.vehicles.push_back(
            {c.id, c.movement, c.lane, c.p, c.v, c.u, zones_.zoneAt(c.movement, c.p)});
      }
    }
    if (f.vehicles.empty()) return;
    for (Violation& v : checkFrame(f, corridor_, cf_.jamGap)) out.violations.push_back(v);
    EnvelopeSample e;
    e.t = t;
    e.count = static_cast<int>(f.vehicles.size());
    e.vMin = std::numeric_limits<double>::infinity();
    e.vMax = -e.vMin;
    for (const auto& s : f.vehicles) {
      e.vMin = std::min(e.vMin, s.v);
      e.vMax = std::max(e.vMax, s.v);
      e.vMean += s.v;
    }
    e.vMean /= e.count;
    out.envelope.push_back(e);
    if (options_.keepFrames) out.frames.push_back(std::move(f));
  }

  // Whether c has to stop at the line of its j-th zone, given the car ahead.
  bool holdAtLine(Car& c, std::size_t j, const Car* ahead, double t) {
    const double entry = c.path.zoneEntryOffsets[j];
    const double d = entry - c.p;
    const bool canStop = c.v * c.v <= 2.0 * cf_.maxDecel * d + 1e-12;
    const SignalState st = signalState(signal_, c.path.zonesOnPath[j], c.northSouth, t);
    if (st == SignalState::Green) {
      c.decision[j] = Undecided;
    } else if (c.decision[j] == Undecided) {
      c.decision[j] = canStop ? Stop : Go;
    }
    if (c.decision[j] == Stop) return true;
    // Don't block the box: wait while the car ahead sits inside the zone or
    // too close past its exit.
    if (ahead && canStop && ahead->p > entry - 1e-9 && ahead->v < 0.5 &&
        ahead->p - cf_.jamGap < entry + corridor_.mergingZoneLength() + 0.5) {
      return true;
    }
    return false;
  }

  void advance(double t, double h) {
    const double inf = std::numeric_limits<double>::infinity();
    for (auto& [key, q] : lanes_) {
      for (std::size_t n = 0; n < q.size(); ++n) {
        Car& c = cars_[q[n]];
        const Car* ahead = n > 0 ? &cars_[q[n - 1]] : nullptr;
        double s = inf, dv = 0.0;
        if (ahead) {
          s = ahead->p - c.p;
          dv = c.v - ahead->v;
        }
        c.lineCap = inf;
        for (std::size_t j = 0; j < c.path.zoneEntryOffsets.size(); ++j) {
          const double entry = c.path.zoneEntryOffsets[j];
          if (c.p > entry + 1e-9) continue;
          if (holdAtLine(c, j, ahead, t)) {
            c.lineCap = entry;
            const double sLine = entry + cf_.jamGap - c.p;
            if (sLine < s) {
              s = sLine;
              dv = c.v;
            }
          }
          break;
        }
        c.u = std::clamp(idmAcceleration(cf_, c.v, c.desired, s, dv), -cf_.maxDecel,
                         cf_.maxAccel);
      }
    }

    for (auto& [key, q] : lanes_) {
      double leaderP = inf;
      for (std::size_t i : q) {
        Car& c = cars_[i];
        const double cap = std::min(leaderP - cf_.jamGap, c.lineCap);
        double a = c.u;
        double pNew, vNew;
        step(c.p, c.v, a, h, pNew, vNew);
        if (pNew > cap) {
          // Hard guard: never close below the jam gap or run a held line.
          const double room = cap - c.p;
          if (room >= 0.5 * c.v * h) {
            a = 2.0 * (room - c.v * h) / (h * h);
            pNew = cap;
            vNew = std::max(0.0, c.v + a * h);
          } else if (room > 0.0) {
            a = -c.v * c.v / (2.0 * room);
            pNew = cap;
            vNew = 0.0;
          } else {
            a = c.v > 0.0 ? -c.v / h : 0.0;
            pNew = c.p;
            vNew = 0.0;
          }
          c.u = a;
        }
        for (std::size_t j = 0; j < c.path.zoneEntryOffsets.size(); ++j) {
          const double entry = c.path.zoneEntryOffsets[j];
          if (c.p <= entry && pNew > entry &&
              signalState(signal_, c.path.zonesOnPath[j], c.northSouth, t) == SignalState::Red) {
            events_.push_back({t, "red_crossing", c.id, "zone " +
                                                            std::to_string(c.path.zonesOnPath[j])});
          }
        }
        c.ts.push_back(t);
        c.vs.push_back(c.v);
        c.us.push_back(c.u);
        const double L = c.path.pathLength;
        if (pNew >= L) {
          const double frac = pNew > c.p ? (L - c.p) / (pNew - c.p) : 1.0;
          const double tf = t + frac * h;
          const double vf = c.v + frac * (vNew - c.v);
          c.ts.push_back(tf);
          c.vs.push_back(vf);
          c.us.push_back(c.u);
          c.active = false;
          VehicleResult& r = results_[i];
          r.tf = tf;
          r.travelTime = tf - r.t0;
          r.delay = timeDelay(r.t0, tf, 0.0, L, r.v0);
          events_.push_back({tf, "exit", c.id, ""});
          --active_;
        }
        c.p = pNew;
        c.v = vNew;
        leaderP = pNew;
      }
      while (!q.empty() && !cars_[q.front()].active) q.pop_front();
    }
  }

  // Ballistic update that stops at v = 0 instead of reversing.
  static void step(double p, double v, double a, double h, double& pNew, double& vNew) {
    if (v + a * h >= 0.0) {
      pNew = p + v * h + 0.5 * a * h * h;
      vNew = v + a * h;
    } else {
      pNew = p + (a < 0.0 ? v * v / (-2.0 * a) : 0.0);
      vNew = 0.0;
    }
  }

  const Corridor& corridor_;
  FlowSpec flow_;
  SignalPlan signal_;
  CarFollowingParams cf_;
  BaselineOptions options_;
  ZoneLocator zones_;
  std::vector<Car> cars_;
  std::vector<VehicleResult> results_;
  std::map<LaneKey, std::deque<std::size_t>> lanes_;
  std::vector<Event> events_;
  int active_ = 0;
};

}  // namespace

RunArtifacts runBaseline(const Corridor& corridor, const VehicleLimits& limits,
                         const FlowSpec& flow, const SignalPlan& signal,
                         const CarFollowingParams& cf, const BaselineOptions& options,
                         const FuelModelCoefficients& fuel) {
  limits.validate();
  flow.validate(limits);
  signal.validate(corridor.zoneCount());
  cf.validate();
  if (!(options.step > 0.0)) throw ValidationError("baseline step must be > 0");
  BaselineRun sim(corridor, flow, signal, cf, options);
  RunArtifacts out = sim.run(fuel);
  if (!out.violations.empty()) {
    const Violation& v = out.violations.front();
    throw MonitorFailure("monitor: " + v.kind + " violation at t=" + std::to_string(v.t) +
                             " between vehicles " + std::to_string(v.leader) + " and " +
                             std::to_string(v.follower),
                         out.violations);
  }
  return out;
}

}  // namespace cavcoord
