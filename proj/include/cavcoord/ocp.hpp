#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavcoord/scenario.hpp"
#include "cavcoord/trajectory.hpp"

namespace cavcoord {

struct InteriorPoint {
  double time = 0.0;
  double position = 0.0;
};

/// Entry state, exit condition and the ordered zone entry/exit points.
/// With n zones there are 2n-1 interior points; the last zone exit is the
/// terminal condition (tf, pf).
struct BoundaryData {
  double t0 = 0.0;
  double p0 = 0.0;
  double v0 = 0.0;
  double tf = 0.0;
  double pf = 0.0;
  std::vector<InteriorPoint> interiorPoints;

  void validate() const;
};

struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd x;

  double residualInf() const { return (A * x - b).lpNorm<Eigen::Infinity>(); }
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the arc-piecing procedure cannot produce a feasible
/// trajectory. Carries the last residual vector for diagnostics.
class InfeasibleTrajectory : public std::runtime_error {
 public:
  InfeasibleTrajectory(const std::string& what, std::vector<double> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

struct UnconstrainedSolution {
  Trajectory trajectory;
  LinearSystem system;
};

/// Assembles the (10n-1)x(10n-1) system. Arc j is written in local time
/// s = t - t_{j-1}; per arc the unknowns are [lambda_p, u(start), v(start),
/// p(start)], followed by one pi1 per interior point.
LinearSystem assembleUnconstrained(const BoundaryData& b);

UnconstrainedSolution solveUnconstrained(const BoundaryData& b);

/// Perturbs every solved unknown by `relative` (used to show the multiplier
/// checks reject an inexact solve).
UnconstrainedSolution perturbSolution(const BoundaryData& b, const LinearSystem& sys,
                                      double relative);

void dumpLinearSystem(const LinearSystem& sys, std::ostream& os);

/// delta + 2 epsilon.
double applyTrackingMargin(const VehicleLimits& limits);

struct ConstrainedOptions {
  int maxNewtonIterations = 50;
  double tolerance = 1e-9;
  int maxInsertions = 8;
  int maxSolves = 40;  // Newton solves per call across all backtracking
  int maxLmIterations = 60;
};

struct SolveStats {
  int insertions = 0;
  int newtonIterations = 0;
};

/// Energy-optimal trajectory under control, speed and rear-end limits.
/// `predecessor` may be null; `gap` is the effective safe distance to it.
Trajectory solveConstrained(const BoundaryData& b, const VehicleLimits& limits,
                            std::shared_ptr<const Trajectory> predecessor, double gap,
                            const ConstrainedOptions& options = {}, SolveStats* stats = nullptr);

/// Largest violation of the speed/control/gap limits on [t0, tf], sampled on
/// `step` plus the analytic speed extrema. Zero when feasible.
struct LimitViolation {
  double speed = 0.0;
  double control = 0.0;
  double gap = 0.0;
};
LimitViolation measureViolation(const Trajectory& tr, const VehicleLimits& limits,
                                const Trajectory* predecessor, double gap, double step = 1e-3);

}  // namespace cavcoord
