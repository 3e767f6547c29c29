#pragma once

#include <memory>
#include <string>
#include <vector>

namespace cavcoord {

struct KinematicState {
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
};

enum class ArcKind { Unconstrained, ControlMax, ControlMin, SpeedMax, SpeedMin, RearEndFollow };

const char* arcKindName(ArcKind k);

/// One piece of a trajectory, parameterized in local time s = t - tBegin.
///
/// `lambdaP` is the (constant) position costate and `w` the value of
/// -lambda_v at the arc start, so on unconstrained arcs
///   u(s) = w + lambdaP s,  v(s) = v + w s + lambdaP s^2 / 2,
///   p(s) = p + v s + w s^2 / 2 + lambdaP s^3 / 6.
/// Control-limit arcs hold u = limit, speed-limit arcs hold v = limit, and
/// follow arcs replay the predecessor shifted back by the safe distance.
struct Arc {
  ArcKind kind = ArcKind::Unconstrained;
  double tBegin = 0.0;
  double tEnd = 0.0;
  double p = 0.0;
  double v = 0.0;
  double lambdaP = 0.0;
  double w = 0.0;
  double limit = 0.0;

  double duration() const { return tEnd - tBegin; }
};

/// Global-time coefficients of an unconstrained arc:
/// u = a t + b, v = a t^2/2 + b t + c, p = a t^3/6 + b t^2/2 + c t + d.
struct GlobalCoefficients {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

/// Multipliers attached to an interior-point position constraint.
struct InteriorMultiplier {
  double time = 0.0;
  double position = 0.0;
  double pi1 = 0.0;  // jump in lambda_p
  double pi2 = 0.0;  // from the Hamiltonian jump, H(t-) = H(t+) - pi2
};

class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<Arc> arcs, std::shared_ptr<const Trajectory> leader = nullptr,
             double followGap = 0.0);

  double t0() const { return arcs_.front().tBegin; }
  double tf() const { return arcs_.back().tEnd; }
  bool empty() const { return arcs_.empty(); }

  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::shared_ptr<const Trajectory>& leader() const { return leader_; }
  double followGap() const { return followGap_; }

  std::vector<InteriorMultiplier>& multipliers() { return multipliers_; }
  const std::vector<InteriorMultiplier>& multipliers() const { return multipliers_; }

  /// Closed-form state at t in [t0, tf]; throws std::out_of_range outside.
  KinematicState evaluate(double t) const;

  /// Same as evaluate inside the horizon; cruises at the boundary speed
  /// outside it. Used when this trajectory is someone's predecessor.
  KinematicState evaluateExtended(double t) const;

  /// Evaluates arc `index` at t even outside its own interval, so left and
  /// right limits at a junction can be compared.
  KinematicState evaluateOnArc(std::size_t index, double t) const;

  std::size_t arcIndexAt(double t) const;

  /// Time of the first crossing of position `x`, or tf if never reached.
  double timeAtPosition(double x) const;

  /// Exact 1/2 * integral of u^2 over the horizon; follow arcs recurse into
  /// the predecessor.
  double controlCost() const;

  bool hasArc(ArcKind kind) const;

  /// Sorted times on [t0, tf] between which the state is one polynomial
  /// piece, including the predecessor's pieces inside follow arcs.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Arc> arcs_;
  std::shared_ptr<const Trajectory> leader_;
  double followGap_ = 0.0;
  std::vector<InteriorMultiplier> multipliers_;
};

GlobalCoefficients globalCoefficients(const Arc& arc);

/// Hamiltonian 1/2 u^2 + lambda_p v + lambda_v u on an unconstrained arc,
/// with lambda_v = -u.
double unconstrainedHamiltonian(const Arc& arc, double t);

}  // namespace cavcoord
