#pragma once

#include <memory>
#include <vector>

#include "cavcoord/ocp.hpp"

namespace cavcoord::verify {

/// Direct transcription of the energy-optimal problem on a uniform grid:
/// piecewise-constant control, exact double-integrator steps, point
/// constraints at grid nodes, box limits on v and u and the rear-end bound
/// p_k <= p_lead(t_k) - gap. Boundary and interior times must sit on the grid.
struct QpProblem {
  BoundaryData boundary;
  VehicleLimits limits;
  std::shared_ptr<const Trajectory> predecessor;
  double gap = 0.0;
  double step = 1e-3;
  bool enforceLimits = true;
};

struct QpResult {
  bool converged = false;
  int iterations = 0;
  double cost = 0.0;  // 1/2 sum u_k^2 dt
  double primalResidual = 0.0;
  std::vector<double> t, p, v, u;
};

QpResult solveQpOracle(const QpProblem& problem);

}  // namespace cavcoord::verify
