#include "cavcoord/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavcoord {

const char* arcKindName(ArcKind k) {
  switch (k) {
    case ArcKind::Unconstrained: return "unconstrained";
    case ArcKind::ControlMax: return "uMax";
    case ArcKind::ControlMin: return "uMin";
    case ArcKind::SpeedMax: return "vMax";
    case ArcKind::SpeedMin: return "vMin";
    case ArcKind::RearEndFollow: return "rearEndFollow";
  }
  return "?";
}

Trajectory::Trajectory(std::vector<Arc> arcs, std::shared_ptr<const Trajectory> leader,
                       double followGap)
    : arcs_(std::move(arcs)), leader_(std::move(leader)), followGap_(followGap) {
  if (arcs_.empty()) throw std::invalid_argument("trajectory needs at least one arc");
  for (const auto& a : arcs_) {
    if (a.kind == ArcKind::RearEndFollow && !leader_) {
      throw std::invalid_argument("follow arc without a predecessor trajectory");
    }
  }
}

std::size_t Trajectory::arcIndexAt(double t) const {
  // First arc whose end is >= t; junction instants belong to the left arc.
  auto it = std::lower_bound(arcs_.begin(), arcs_.end(), t,
                             [](const Arc& a, double x) { return a.tEnd < x; });
  if (it == arcs_.end()) return arcs_.size() - 1;
  return static_cast<std::size_t>(it - arcs_.begin());
}

KinematicState Trajectory::evaluateOnArc(std::size_t index, double t) const {
  const Arc& a = arcs_.at(index);
  const double s = t - a.tBegin;
  switch (a.kind) {
    case ArcKind::Unconstrained:
      return {a.p + a.v * s + a.w * s * s / 2.0 + a.lambdaP * s * s * s / 6.0,
              a.v + a.w * s + a.lambdaP * s * s / 2.0, a.w + a.lambdaP * s};
    case ArcKind::ControlMax:
    case ArcKind::ControlMin:
      return {a.p + a.v * s + a.limit * s * s / 2.0, a.v + a.limit * s, a.limit};
    case ArcKind::SpeedMax:
    case ArcKind::SpeedMin:
      return {a.p + a.limit * s, a.limit, 0.0};
    case ArcKind::RearEndFollow: {
      KinematicState k = leader_->evaluateExtended(t);
      k.p -= followGap_;
      return k;
    }
  }
  return {};
}

KinematicState Trajectory::evaluate(double t) const {
  if (arcs_.empty()) throw std::out_of_range("empty trajectory");
  constexpr double kSlack = 1e-12;
  if (t < t0() - kSlack || t > tf() + kSlack) {
    throw std::out_of_range("evaluation time outside trajectory horizon");
  }
  return evaluateOnArc(arcIndexAt(t), t);
}

KinematicState Trajectory::evaluateExtended(double t) const {
  if (t < t0()) {
    const KinematicState s = evaluateOnArc(0, t0());
    return {s.p - s.v * (t0() - t), s.v, 0.0};
  }
  if (t > tf()) {
    const KinematicState s = evaluateOnArc(arcs_.size() - 1, tf());
    return {s.p + s.v * (t - tf()), s.v, 0.0};
  }
  return evaluateOnArc(arcIndexAt(t), t);
}

double Trajectory::timeAtPosition(double x) const {
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const Arc& a = arcs_[i];
    const KinematicState end = evaluateOnArc(i, a.tEnd);
    if (end.p < x) continue;
    double lo = a.tBegin;
    double hi = a.tEnd;
    if (evaluateOnArc(i, lo).p >= x) return lo;
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (evaluateOnArc(i, mid).p < x) lo = mid; else hi = mid;
    }
    return hi;
  }
  return tf();
}

namespace {

double quadraticCost(double w, double lambdaP, double T) {
  return 0.5 * (w * w * T + w * lambdaP * T * T + lambdaP * lambdaP * T * T * T / 3.0);
}

// Exact 1/2 int u^2 over [t1, t2] (clipped to the extended horizon; u = 0
// outside it).
double costOver(const Trajectory& tr, double t1, double t2) {
  double total = 0.0;
  const auto& arcs = tr.arcs();
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& a = arcs[i];
    const double lo = std::max(t1, a.tBegin);
    const double hi = std::min(t2, a.tEnd);
    if (hi <= lo) continue;
    switch (a.kind) {
      case ArcKind::Unconstrained: {
        const double w = a.w + a.lambdaP * (lo - a.tBegin);
        total += quadraticCost(w, a.lambdaP, hi - lo);
        break;
      }
      case ArcKind::ControlMax:
      case ArcKind::ControlMin:
        total += 0.5 * a.limit * a.limit * (hi - lo);
        break;
      case ArcKind::SpeedMax:
      case ArcKind::SpeedMin:
        break;
      case ArcKind::RearEndFollow:
        total += costOver(*tr.leader(), lo, hi);
        break;
    }
  }
  return total;
}

}  // namespace

double Trajectory::controlCost() const { return costOver(*this, t0(), tf()); }

bool Trajectory::hasArc(ArcKind kind) const {
  return std::any_of(arcs_.begin(), arcs_.end(), [kind](const Arc& a) { return a.kind == kind; });
}

std::vector<double> Trajectory::breakpoints() const {
  std::vector<double> out;
  for (const Arc& a : arcs_) {
    out.push_back(a.tBegin);
    if (a.kind != ArcKind::RearEndFollow) continue;
    for (double t : leader_->breakpoints()) {
      if (t > a.tBegin && t < a.tEnd) out.push_back(t);
    }
  }
  out.push_back(tf());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GlobalCoefficients globalCoefficients(const Arc& arc) {
  // Expand the local polynomials around t = 0.
  const double t = arc.tBegin;
  GlobalCoefficients g;
  g.a = arc.lambdaP;
  g.b = arc.w - arc.lambdaP * t;
  g.c = arc.v - g.a * t * t / 2.0 - g.b * t;
  g.d = arc.p - g.a * t * t * t / 6.0 - g.b * t * t / 2.0 - g.c * t;
  return g;
}

double unconstrainedHamiltonian(const Arc& arc, double t) {
  const double s = t - arc.tBegin;
  const double u = arc.w + arc.lambdaP * s;
  const double v = arc.v + arc.w * s + arc.lambdaP * s * s / 2.0;
  const double lambdaV = -u;
  return 0.5 * u * u + arc.lambdaP * v + lambdaV * u;
}

}  // namespace cavcoord
