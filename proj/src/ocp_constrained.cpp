#include "cavcoord/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace cavcoord {

namespace {

enum class Side { Free, Control, Speed, Follow };

Side sideOf(ArcKind k) {
  switch (k) {
    case ArcKind::Unconstrained: return Side::Free;
    case ArcKind::ControlMax:
    case ArcKind::ControlMin: return Side::Control;
    case ArcKind::SpeedMax:
    case ArcKind::SpeedMin: return Side::Speed;
    case ArcKind::RearEndFollow: return Side::Follow;
  }
  return Side::Free;
}

int unknownsOf(Side s) {
  switch (s) {
    case Side::Free:
    case Side::Control: return 4;
    case Side::Speed: return 2;
    case Side::Follow: return 0;
  }
  return 0;
}

bool costateSide(Side s) { return s == Side::Free || s == Side::Control; }

struct Piece {
  ArcKind kind = ArcKind::Unconstrained;
  double limit = 0.0;
};

enum class KnotKind { Fixed, Junction, Touch };

struct Knot {
  KnotKind kind = KnotKind::Fixed;
  double time = 0.0;
  double position = 0.0;
};

struct Layout {
  std::vector<Piece> pieces;
  std::vector<Knot> knots;  // pieces.size() - 1
};

struct PieceState {
  double p = 0.0, v = 0.0, u = 0.0, lam = 0.0, w = 0.0;
};

class Problem {
 public:
  Problem(const BoundaryData& b, Layout layout, const Trajectory* lead, double gap)
      : b_(b), layout_(std::move(layout)), lead_(lead), gap_(gap) {
    int o = 0;
    for (const auto& pc : layout_.pieces) {
      pieceOffset_.push_back(o);
      o += unknownsOf(sideOf(pc.kind));
    }
    for (const auto& k : layout_.knots) {
      knotOffset_.push_back(k.kind == KnotKind::Fixed ? -1 : o);
      if (k.kind != KnotKind::Fixed) ++o;
    }
    n_ = o;
  }

  const Layout& layout() const { return layout_; }
  int unknowns() const { return n_; }

  double knotTime(std::size_t k, const Eigen::VectorXd& x) const {
    return knotOffset_[k] < 0 ? layout_.knots[k].time : x(knotOffset_[k]);
  }
  double startTime(std::size_t j, const Eigen::VectorXd& x) const {
    return j == 0 ? b_.t0 : knotTime(j - 1, x);
  }
  double endTime(std::size_t j, const Eigen::VectorXd& x) const {
    return j + 1 == layout_.pieces.size() ? b_.tf : knotTime(j, x);
  }

  PieceState stateAt(std::size_t j, const Eigen::VectorXd& x, double t) const {
    const Piece& pc = layout_.pieces[j];
    const int o = pieceOffset_[j];
    const double s = t - startTime(j, x);
    PieceState st;
    switch (sideOf(pc.kind)) {
      case Side::Free: {
        const double p = x(o), v = x(o + 1), lam = x(o + 2), w = x(o + 3);
        st.p = p + v * s + w * s * s / 2.0 + lam * s * s * s / 6.0;
        st.v = v + w * s + lam * s * s / 2.0;
        st.u = w + lam * s;
        st.lam = lam;
        st.w = st.u;
        break;
      }
      case Side::Control: {
        const double p = x(o), v = x(o + 1), lam = x(o + 2), w = x(o + 3);
        st.p = p + v * s + pc.limit * s * s / 2.0;
        st.v = v + pc.limit * s;
        st.u = pc.limit;
        st.lam = lam;
        st.w = w + lam * s;
        break;
      }
      case Side::Speed:
        st.p = x(o) + pc.limit * s;
        st.v = pc.limit;
        st.u = 0.0;
        st.lam = x(o + 1);
        st.w = 0.0;
        break;
      case Side::Follow: {
        const KinematicState k = lead_->evaluateExtended(t);
        st.p = k.p - gap_;
        st.v = k.v;
        st.u = k.u;
        break;
      }
    }
    return st;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(n_) + 4);
    const auto& pcs = layout_.pieces;
    {
      const PieceState s0 = stateAt(0, x, b_.t0);
      r.push_back(s0.p - b_.p0);
      r.push_back(s0.v - b_.v0);
    }
    for (std::size_t k = 0; k < layout_.knots.size(); ++k) {
      const Knot& kn = layout_.knots[k];
      const double tau = knotTime(k, x);
      const PieceState A = stateAt(k, x, tau);
      const PieceState B = stateAt(k + 1, x, tau);
      const Side sa = sideOf(pcs[k].kind);
      const Side sb = sideOf(pcs[k + 1].kind);
      r.push_back(A.p - B.p);
      if (kn.kind == KnotKind::Fixed) {
        r.push_back(B.p - kn.position);
        if (!(sa == Side::Speed && sb == Side::Speed)) r.push_back(A.v - B.v);
        if (costateSide(sa) && costateSide(sb)) r.push_back(A.w - B.w);
        continue;
      }
      if (kn.kind == KnotKind::Touch) {
        const KinematicState L = lead_->evaluateExtended(tau);
        r.push_back(A.v - B.v);
        r.push_back(A.w - B.w);
        r.push_back(A.p - (L.p - gap_));
        r.push_back(A.v - L.v);
        continue;
      }
      if (!(sa == Side::Speed && sb == Side::Speed)) r.push_back(A.v - B.v);
      const bool aFree = sa == Side::Free;
      const Side other = aFree ? sb : sa;
      const PieceState& F = aFree ? A : B;
      const double otherLimit = aFree ? pcs[k + 1].limit : pcs[k].limit;
      switch (other) {
        case Side::Control:
          r.push_back(A.lam - B.lam);
          r.push_back(A.w - B.w);
          r.push_back(F.w - otherLimit);
          break;
        case Side::Speed:
          r.push_back(A.lam - B.lam);
          r.push_back(F.w);
          break;
        case Side::Follow:
          r.push_back(F.u - (aFree ? B.u : A.u));
          break;
        case Side::Free:
          break;
      }
    }
    const std::size_t last = pcs.size() - 1;
    const PieceState E = stateAt(last, x, b_.tf);
    r.push_back(E.p - b_.pf);
    if (costateSide(sideOf(pcs[last].kind))) r.push_back(E.w);
    return Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
  }

  bool orderOk(const Eigen::VectorXd& x) const {
    double prev = b_.t0;
    for (std::size_t k = 0; k < layout_.knots.size(); ++k) {
      const double t = knotTime(k, x);
      if (!(t > prev)) return false;
      prev = t;
    }
    return b_.tf > prev;
  }

  Eigen::VectorXd guess(const Trajectory& from) const {
    Eigen::VectorXd x(n_);
    for (std::size_t k = 0; k < layout_.knots.size(); ++k) {
      if (knotOffset_[k] >= 0) x(knotOffset_[k]) = layout_.knots[k].time;
    }
    for (std::size_t j = 0; j < layout_.pieces.size(); ++j) {
      const int o = pieceOffset_[j];
      const double t = startTime(j, x);
      const std::size_t ai = from.arcIndexAt(std::min(t + 1e-9, from.tf()));
      const Arc& a = from.arcs()[ai];
      KinematicState k = from.evaluateOnArc(ai, t);
      double lam = 0.0, w = 0.0;
      if (a.kind == ArcKind::Unconstrained || a.kind == ArcKind::ControlMax ||
          a.kind == ArcKind::ControlMin) {
        lam = a.lambdaP;
        w = a.w + a.lambdaP * (t - a.tBegin);
      }
      if (lead_ && j > 0 &&
          (layout_.pieces[j - 1].kind == ArcKind::RearEndFollow ||
           layout_.knots[j - 1].kind == KnotKind::Touch)) {
        const KinematicState L = lead_->evaluateExtended(t);
        k.p = L.p - gap_;
        k.v = L.v;
        if (layout_.pieces[j - 1].kind == ArcKind::RearEndFollow) {
          w = L.u;
          lam = 0.0;
        }
      }
      switch (sideOf(layout_.pieces[j].kind)) {
        case Side::Free:
        case Side::Control:
          x(o) = k.p;
          x(o + 1) = k.v;
          x(o + 2) = lam;
          x(o + 3) = w;
          break;
        case Side::Speed:
          x(o) = k.p;
          x(o + 1) = lam;
          break;
        case Side::Follow:
          break;
      }
    }
    return x;
  }

  Trajectory build(const Eigen::VectorXd& x, std::shared_ptr<const Trajectory> lead) const {
    std::vector<Arc> arcs;
    for (std::size_t j = 0; j < layout_.pieces.size(); ++j) {
      Arc a;
      a.kind = layout_.pieces[j].kind;
      a.limit = layout_.pieces[j].limit;
      a.tBegin = startTime(j, x);
      a.tEnd = endTime(j, x);
      const PieceState s = stateAt(j, x, a.tBegin);
      a.p = s.p;
      a.v = s.v;
      a.lambdaP = s.lam;
      a.w = s.w;
      arcs.push_back(a);
    }
    const bool follows = std::any_of(arcs.begin(), arcs.end(), [](const Arc& a) {
      return a.kind == ArcKind::RearEndFollow;
    });
    Trajectory tr(std::move(arcs), follows ? std::move(lead) : nullptr, follows ? gap_ : 0.0);
    for (std::size_t k = 0; k < layout_.knots.size(); ++k) {
      if (layout_.knots[k].kind != KnotKind::Fixed) continue;
      const Arc& A = tr.arcs()[k];
      const Arc& B = tr.arcs()[k + 1];
      if (A.kind != ArcKind::Unconstrained || B.kind != ArcKind::Unconstrained) continue;
      InteriorMultiplier mu;
      mu.time = B.tBegin;
      mu.position = layout_.knots[k].position;
      mu.pi1 = A.lambdaP - B.lambdaP;
      mu.pi2 = unconstrainedHamiltonian(B, mu.time) - unconstrainedHamiltonian(A, mu.time);
      tr.multipliers().push_back(mu);
    }
    return tr;
  }

 private:
  const BoundaryData& b_;
  Layout layout_;
  const Trajectory* lead_;
  double gap_;
  std::vector<int> pieceOffset_;
  std::vector<int> knotOffset_;
  int n_ = 0;
};

struct NewtonResult {
  bool ok = false;
  Eigen::VectorXd x;
  Eigen::VectorXd r;
  int iterations = 0;
};

NewtonResult newton(const Problem& prob, Eigen::VectorXd x, const ConstrainedOptions& opt) {
  NewtonResult res;
  Eigen::VectorXd r = prob.residual(x);
  if (r.size() != x.size()) {
    res.r = r;
    return res;
  }
  const Eigen::Index n = x.size();
  Eigen::MatrixXd J(n, n);
  for (int it = 0; it < opt.maxNewtonIterations; ++it) {
    res.iterations = it;
    if (r.lpNorm<Eigen::Infinity>() < opt.tolerance) {
      res.ok = true;
      break;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(i)));
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      J.col(i) = (prob.residual(xp) - prob.residual(xm)) / (2.0 * h);
    }
    Eigen::VectorXd dx = J.colPivHouseholderQr().solve(-r);
    if (!dx.allFinite()) break;
    const double r0 = r.norm();
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      Eigen::VectorXd xn = x + alpha * dx;
      if (!prob.orderOk(xn)) continue;
      Eigen::VectorXd rn = prob.residual(xn);
      if (rn.allFinite() && rn.norm() < r0) {
        x = std::move(xn);
        r = std::move(rn);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!res.ok && r.lpNorm<Eigen::Infinity>() < opt.tolerance) res.ok = true;
  res.x = x;
  res.r = r;
  return res;
}

Eigen::MatrixXd jacobian(const Problem& prob, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = 1e-7 * std::max(1.0, std::abs(x(i)));
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (prob.residual(xp) - prob.residual(xm)) / (2.0 * h);
  }
  return J;
}

// Levenberg-Marquardt on |r|^2, for starts where plain Newton stalls.
NewtonResult levenbergMarquardt(const Problem& prob, Eigen::VectorXd x,
                                const ConstrainedOptions& opt) {
  NewtonResult res;
  Eigen::VectorXd r = prob.residual(x);
  if (r.size() != x.size()) {
    res.r = r;
    return res;
  }
  double mu = 1e-3;
  int it = 0;
  for (; it < opt.maxLmIterations; ++it) {
    if (r.lpNorm<Eigen::Infinity>() < opt.tolerance) break;
    const Eigen::MatrixXd J = jacobian(prob, x);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    const Eigen::VectorXd d = JtJ.diagonal().cwiseMax(1e-12);
    bool accepted = false;
    for (int k = 0; k < 30 && !accepted; ++k) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += mu * d;
      const Eigen::VectorXd dx = A.ldlt().solve(-g);
      const Eigen::VectorXd xn = x + dx;
      if (dx.allFinite() && prob.orderOk(xn)) {
        const Eigen::VectorXd rn = prob.residual(xn);
        if (rn.allFinite() && rn.squaredNorm() < r.squaredNorm()) {
          x = xn;
          r = rn;
          mu = std::max(mu / 3.0, 1e-12);
          accepted = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted) break;
  }
  res.iterations = it;
  res.ok = r.lpNorm<Eigen::Infinity>() < opt.tolerance;
  res.x = x;
  res.r = r;
  return res;
}

NewtonResult solveLayout(const Problem& prob, const Eigen::VectorXd& x0,
                         const ConstrainedOptions& opt) {
  NewtonResult nr = newton(prob, x0, opt);
  if (nr.ok || nr.r.size() != x0.size()) return nr;
  NewtonResult lm = levenbergMarquardt(prob, x0, opt);
  lm.iterations += nr.iterations;
  if (!lm.ok) return lm;
  // polish
  NewtonResult fin = newton(prob, lm.x, opt);
  fin.iterations += lm.iterations;
  return fin.ok ? fin : lm;
}

enum class ViolationKind { SpeedMax, SpeedMin, ControlMax, ControlMin, Gap };

struct Region {
  ViolationKind kind;
  double begin;
  double end;
  double worst;  // time of largest violation
};

constexpr double kLimitTol = 1e-7;

double excess(ViolationKind kind, const KinematicState& s, const VehicleLimits& lim,
              const Trajectory* lead, double gap, double t) {
  switch (kind) {
    case ViolationKind::SpeedMax: return s.v - lim.vMax - kLimitTol;
    case ViolationKind::SpeedMin: return lim.vMin - s.v - kLimitTol;
    case ViolationKind::ControlMax: return s.u - lim.uMax - kLimitTol;
    case ViolationKind::ControlMin: return lim.uMin - s.u - kLimitTol;
    case ViolationKind::Gap: return s.p - (lead->evaluateExtended(t).p - gap) - kLimitTol;
  }
  return 0.0;
}

// Sample times between which each limit function is monotone: arc ends and
// speed vertices, plus for the gap the predecessor's pieces and the roots of
// the relative speed on every common piece.
std::vector<double> sampleTimes(const Trajectory& tr, const Trajectory* lead) {
  std::vector<double> ts;
  for (const Arc& a : tr.arcs()) {
    ts.push_back(a.tBegin);
    if (a.kind == ArcKind::Unconstrained && a.lambdaP != 0.0) {
      const double s = -a.w / a.lambdaP;
      if (s > 0.0 && s < a.duration()) ts.push_back(a.tBegin + s);
    }
  }
  ts.push_back(tr.tf());
  if (lead) {
    const double t0 = tr.t0();
    const double tf = tr.tf();
    std::vector<double> cuts = tr.breakpoints();
    for (double t : lead->breakpoints()) {
      if (t > t0 && t < tf) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto dv = [&](double t) { return tr.evaluate(t).v - lead->evaluateExtended(t).v; };
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k];
      const double b = cuts[k + 1];
      const double h = b - a;
      if (!(h > 1e-12)) continue;
      // relative speed is quadratic on the piece; sample inside so junction
      // jumps in u do not leak in
      const double x0 = a + 0.25 * h, x1 = a + 0.5 * h, x2 = a + 0.75 * h;
      const double f0 = dv(x0), f1 = dv(x1), f2 = dv(x2);
      const double q = 0.25 * h;
      const double c2 = (f0 - 2.0 * f1 + f2) / (2.0 * q * q);
      const double c1 = (f2 - f0) / (2.0 * q);
      // f(x1 + y) = f1 + c1 y + c2 y^2
      auto push = [&](double y) {
        const double t = x1 + y;
        if (t > a && t < b) ts.push_back(t);
      };
      if (std::abs(c2) < 1e-14) {
        if (std::abs(c1) > 1e-14) push(-f1 / c1);
      } else {
        const double disc = c1 * c1 - 4.0 * c2 * f1;
        if (disc >= 0.0) {
          const double r = std::sqrt(disc);
          push((-c1 + r) / (2.0 * c2));
          push((-c1 - r) / (2.0 * c2));
        }
      }
      ts.push_back(a);
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

bool checkedArc(ArcKind kind, ViolationKind v) {
  switch (kind) {
    case ArcKind::Unconstrained: return true;
    case ArcKind::ControlMax:
    case ArcKind::ControlMin:
      return v != ViolationKind::ControlMax && v != ViolationKind::ControlMin;
    default: return false;
  }
}

std::optional<Region> earliestRegion(const Trajectory& tr, const VehicleLimits& lim,
                                     const Trajectory* lead, double gap) {
  std::optional<Region> best;
  const ViolationKind kinds[] = {ViolationKind::SpeedMax, ViolationKind::SpeedMin,
                                 ViolationKind::ControlMax, ViolationKind::ControlMin,
                                 ViolationKind::Gap};
  for (ViolationKind kind : kinds) {
    if (kind == ViolationKind::Gap && !lead) continue;
    const std::vector<double> ts = sampleTimes(tr, kind == ViolationKind::Gap ? lead : nullptr);
    auto g = [&](double t) {
      const std::size_t i = tr.arcIndexAt(t);
      if (!checkedArc(tr.arcs()[i].kind, kind)) return -1.0;
      return excess(kind, tr.evaluateOnArc(i, t), lim, lead, gap, t);
    };
    // Right-limit variant so a violation starting exactly at a junction is
    // attributed to the arc after it.
    auto gRight = [&](double t) {
      const std::size_t i = std::min(tr.arcIndexAt(t) + 1, tr.arcs().size() - 1);
      if (tr.arcs()[i].tBegin != t || !checkedArc(tr.arcs()[i].kind, kind)) return g(t);
      return std::max(g(t), excess(kind, tr.evaluateOnArc(i, t), lim, lead, gap, t));
    };
    auto bisect = [&](double lo, double hi, bool risingEdge) {
      for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool bad = g(mid) > 0.0;
        if (bad == risingEdge) hi = mid; else lo = mid;
      }
      return 0.5 * (lo + hi);
    };
    std::size_t i = 0;
    while (i < ts.size() && !(gRight(ts[i]) > 0.0)) ++i;
    if (i == ts.size()) continue;
    Region reg{kind, i == 0 ? ts[0] : bisect(ts[i - 1], ts[i], true), tr.tf(), ts[i]};
    double worst = gRight(ts[i]);
    std::size_t k = i + 1;
    for (; k < ts.size(); ++k) {
      const double gk = g(ts[k]);
      if (!(gk > 0.0)) break;
      if (gk > worst) {
        worst = gk;
        reg.worst = ts[k];
      }
    }
    if (k < ts.size()) reg.end = bisect(ts[k - 1], ts[k], false);
    if (reg.end <= reg.begin) reg.end = std::min(tr.tf(), reg.begin + 1e-6);
    if (!best || reg.begin < best->begin) best = reg;
  }
  return best;
}

ArcKind arcFor(ViolationKind v) {
  switch (v) {
    case ViolationKind::SpeedMax: return ArcKind::SpeedMax;
    case ViolationKind::SpeedMin: return ArcKind::SpeedMin;
    case ViolationKind::ControlMax: return ArcKind::ControlMax;
    case ViolationKind::ControlMin: return ArcKind::ControlMin;
    case ViolationKind::Gap: return ArcKind::RearEndFollow;
  }
  return ArcKind::Unconstrained;
}

double limitFor(ViolationKind v, const VehicleLimits& lim) {
  switch (v) {
    case ViolationKind::SpeedMax: return lim.vMax;
    case ViolationKind::SpeedMin: return lim.vMin;
    case ViolationKind::ControlMax: return lim.uMax;
    case ViolationKind::ControlMin: return lim.uMin;
    case ViolationKind::Gap: return 0.0;
  }
  return 0.0;
}

// Piece index (in `lay`) covering time t, using the current knot times.
std::size_t pieceAt(const Layout& lay, double t) {
  std::size_t j = 0;
  while (j < lay.knots.size() && lay.knots[j].time < t) ++j;
  return j;
}

// Replaces [begin, end] with a constrained arc (split at any fixed knot it
// spans). Returns nullopt when the region overlaps a constrained piece or
// the resulting sequence cannot be solved.
std::optional<Layout> insertArc(const Layout& lay, const Region& reg, const VehicleLimits& lim,
                                double t0, double tf) {
  const ArcKind kind = arcFor(reg.kind);
  const std::size_t first = pieceAt(lay, reg.begin);
  const std::size_t last = pieceAt(lay, reg.end);
  for (std::size_t j = first; j <= last && j < lay.pieces.size(); ++j) {
    if (lay.pieces[j].kind != ArcKind::Unconstrained) return std::nullopt;
  }
  const bool atStart = reg.begin - t0 < 1e-9;
  const bool atEnd = tf - reg.end < 1e-9;
  if (atStart && (kind == ArcKind::RearEndFollow || kind == ArcKind::SpeedMax ||
                  kind == ArcKind::SpeedMin)) {
    return std::nullopt;
  }
  if (atEnd && (kind == ArcKind::RearEndFollow || kind == ArcKind::ControlMax ||
                kind == ArcKind::ControlMin)) {
    return std::nullopt;
  }
  Layout out;
  for (std::size_t j = 0; j < first; ++j) {
    out.pieces.push_back(lay.pieces[j]);
    out.knots.push_back(lay.knots[j]);
  }
  const Piece c{kind, limitFor(reg.kind, lim)};
  if (!atStart) {
    out.pieces.push_back({ArcKind::Unconstrained, 0.0});
    out.knots.push_back({KnotKind::Junction, reg.begin, 0.0});
  }
  out.pieces.push_back(c);
  for (std::size_t j = first; j < last; ++j) {
    if (kind == ArcKind::RearEndFollow) return std::nullopt;
    out.knots.push_back(lay.knots[j]);
    out.pieces.push_back(c);
  }
  if (!atEnd) {
    out.knots.push_back({KnotKind::Junction, reg.end, 0.0});
    out.pieces.push_back({ArcKind::Unconstrained, 0.0});
  }
  for (std::size_t j = last; j < lay.knots.size(); ++j) {
    out.knots.push_back(lay.knots[j]);
    out.pieces.push_back(lay.pieces[j + 1]);
  }
  return out;
}

std::optional<Layout> insertTouch(const Layout& lay, const Region& reg) {
  const std::size_t j = pieceAt(lay, reg.worst);
  if (j >= lay.pieces.size() || lay.pieces[j].kind != ArcKind::Unconstrained) return std::nullopt;
  Layout out;
  for (std::size_t i = 0; i < j; ++i) {
    out.pieces.push_back(lay.pieces[i]);
    out.knots.push_back(lay.knots[i]);
  }
  out.pieces.push_back(lay.pieces[j]);
  out.knots.push_back({KnotKind::Touch, reg.worst, 0.0});
  out.pieces.push_back(lay.pieces[j]);
  for (std::size_t i = j; i < lay.knots.size(); ++i) {
    out.knots.push_back(lay.knots[i]);
    out.pieces.push_back(lay.pieces[i + 1]);
  }
  return out;
}

Layout withTimes(Layout lay, const Problem& prob, const Eigen::VectorXd& x) {
  for (std::size_t k = 0; k < lay.knots.size(); ++k) lay.knots[k].time = prob.knotTime(k, x);
  return lay;
}

// Depth-first over arc insertions: at each step the feasible candidates are
// tried cheapest first, backing out of dead ends.
struct Search {
  const BoundaryData& b;
  const VehicleLimits& limits;
  std::shared_ptr<const Trajectory> predecessor;
  double gap;
  const ConstrainedOptions& options;
  SolveStats stats;
  Eigen::VectorXd lastResidual;
  int solves = 0;
  bool capped = false;

  std::optional<Trajectory> run(const Layout& lay, const Trajectory& current, int depth) {
    const Trajectory* lead = predecessor.get();
    const auto reg = earliestRegion(current, limits, lead, gap);
    if (!reg) return current;
    if (depth >= options.maxInsertions) {
      capped = true;
      return std::nullopt;
    }
    struct Solved {
      double cost;
      Trajectory tr;
      Layout lay;
    };
    std::vector<Solved> ok;
    // one structural alternative: junction guesses tried in order until one
    // converges
    auto attempt = [&](const std::vector<Layout>& group) -> bool {
      for (const Layout& cand : group) {
        if (solves >= options.maxSolves) return false;
        ++solves;
        const Problem prob(b, cand, lead, gap);
        const NewtonResult nr = solveLayout(prob, prob.guess(current), options);
        stats.newtonIterations += nr.iterations;
        lastResidual = nr.r;
        if (!nr.ok) continue;
        Trajectory tr = prob.build(nr.x, predecessor);
        bool degenerate = false;
        for (const Arc& a : tr.arcs()) degenerate = degenerate || a.duration() < 1e-9;
        if (degenerate) continue;
        const double cost = tr.controlCost();
        ok.push_back({cost, std::move(tr), withTimes(cand, prob, nr.x)});
        return true;
      }
      return false;
    };
    // the violated interval, then shrunk toward its worst point
    auto arcGroup = [&](const Region& base) {
      std::vector<Layout> group;
      for (double shrink : {1.0, 0.5, 0.15}) {
        Region r = base;
        if (shrink < 1.0) {
          if (r.begin - b.t0 > 1e-9) r.begin = r.worst - shrink * (r.worst - r.begin);
          if (b.tf - r.end > 1e-9) r.end = r.worst + shrink * (r.end - r.worst);
          if (!(r.end - r.begin > 1e-6)) continue;
        }
        if (auto l = insertArc(lay, r, limits, b.t0, b.tf)) group.push_back(std::move(*l));
      }
      return group;
    };

    if (reg->kind == ViolationKind::Gap) {
      // A touch is tried first. If the gap is still violated inside the same
      // interval the contact lasts, so the follow arc goes ahead of it.
      bool touchHolds = false;
      if (auto l = insertTouch(lay, *reg); l && attempt({*l})) {
        const auto next = earliestRegion(ok.back().tr, limits, lead, gap);
        touchHolds = !(next && next->kind == ViolationKind::Gap && next->begin < reg->end &&
                       next->end > reg->begin);
      }
      if (!touchHolds) {
        const std::size_t before = ok.size();
        attempt(arcGroup(*reg));
        if (ok.size() > before) std::swap(ok.front(), ok.back());
      }
    } else {
      attempt(arcGroup(*reg));
    }
    for (Solved& s : ok) {
      ++stats.insertions;
      if (auto done = run(s.lay, s.tr, depth + 1)) return done;
      --stats.insertions;
    }
    return std::nullopt;
  }
};

}  // namespace

LimitViolation measureViolation(const Trajectory& tr, const VehicleLimits& limits,
                                const Trajectory* predecessor, double gap, double step) {
  LimitViolation out;
  std::vector<double> ts = sampleTimes(tr, predecessor);
  const auto n = static_cast<long>(std::floor((tr.tf() - tr.t0()) / step));
  for (long k = 1; k <= n; ++k) ts.push_back(tr.t0() + static_cast<double>(k) * step);
  for (double t : ts) {
    // both one-sided limits at junctions
    const std::size_t i = tr.arcIndexAt(t);
    for (std::size_t a : {i, std::min(i + 1, tr.arcs().size() - 1)}) {
      const Arc& arc = tr.arcs()[a];
      if (t < arc.tBegin - 1e-12 || t > arc.tEnd + 1e-12) continue;
      const KinematicState s = tr.evaluateOnArc(a, t);
      out.speed = std::max({out.speed, s.v - limits.vMax, limits.vMin - s.v});
      out.control = std::max({out.control, s.u - limits.uMax, limits.uMin - s.u});
      if (predecessor) {
        out.gap = std::max(out.gap, s.p - (predecessor->evaluateExtended(t).p - gap));
      }
    }
  }
  return out;
}

Trajectory solveConstrained(const BoundaryData& b, const VehicleLimits& limits,
                            std::shared_ptr<const Trajectory> predecessor, double gap,
                            const ConstrainedOptions& options, SolveStats* stats) {
  b.validate();
  limits.validate();
  if (b.v0 < limits.vMin || b.v0 > limits.vMax) {
    throw InfeasibleTrajectory("entry speed outside [vMin, vMax]");
  }
  const Trajectory* lead = predecessor.get();
  if (lead && b.p0 > lead->evaluateExtended(b.t0).p - gap + kLimitTol) {
    throw InfeasibleTrajectory("entry gap to predecessor below the safe distance");
  }

  Layout lay;
  lay.pieces.push_back({ArcKind::Unconstrained, 0.0});
  for (const auto& ip : b.interiorPoints) {
    lay.knots.push_back({KnotKind::Fixed, ip.time, ip.position});
    lay.pieces.push_back({ArcKind::Unconstrained, 0.0});
  }
  Search search{b, limits, predecessor, gap, options, {}, {}};
  std::optional<Trajectory> out = search.run(lay, solveUnconstrained(b).trajectory, 0);
  SolveStats local = search.stats;
  if (!out) {
    if (search.capped) throw InfeasibleTrajectory("constrained-arc insertion cap reached");
    std::vector<double> res(search.lastResidual.data(),
                            search.lastResidual.data() + search.lastResidual.size());
    throw InfeasibleTrajectory("junction-time solve did not converge", std::move(res));
  }
  Trajectory current = std::move(*out);
  if (stats) *stats = local;
  return current;
}

}  // namespace cavcoord
