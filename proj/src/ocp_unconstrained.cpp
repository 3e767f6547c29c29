#include "cavcoord/ocp.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace cavcoord {

void BoundaryData::validate() const {
  double tPrev = t0;
  double pPrev = p0;
  for (const auto& ip : interiorPoints) {
    if (!(ip.time > tPrev)) throw ValidationError("interior-point times must increase strictly");
    if (!(ip.position > pPrev)) {
      throw ValidationError("interior-point positions must increase strictly");
    }
    tPrev = ip.time;
    pPrev = ip.position;
  }
  if (!(tf > tPrev)) throw ValidationError("final time must exceed the last interior-point time");
  if (!(pf > pPrev)) throw ValidationError("final position must exceed the last interior point");
}

double applyTrackingMargin(const VehicleLimits& limits) {
  if (limits.trackingError < 0.0) throw ValidationError("tracking error epsilon must be >= 0");
  return limits.safeDistance + 2.0 * limits.trackingError;
}

namespace {

std::vector<double> knotTimes(const BoundaryData& b) {
  std::vector<double> t{b.t0};
  for (const auto& ip : b.interiorPoints) t.push_back(ip.time);
  t.push_back(b.tf);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) {
      throw SingularSystem("boundary times must increase strictly (t0 < t_1 < ... < tf)");
    }
  }
  return t;
}

Trajectory buildTrajectory(const BoundaryData& b, const Eigen::VectorXd& x) {
  const std::vector<double> T = knotTimes(b);
  const std::size_t m = T.size() - 1;
  std::vector<Arc> arcs;
  arcs.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Arc a;
    a.kind = ArcKind::Unconstrained;
    a.tBegin = T[j];
    a.tEnd = T[j + 1];
    a.lambdaP = x(4 * j);
    a.w = x(4 * j + 1);
    a.v = x(4 * j + 2);
    a.p = x(4 * j + 3);
    arcs.push_back(a);
  }
  Trajectory tr(std::move(arcs));
  for (std::size_t k = 0; k + 1 < m; ++k) {
    InteriorMultiplier mu;
    mu.time = T[k + 1];
    mu.position = b.interiorPoints[k].position;
    mu.pi1 = x(4 * m + k);
    mu.pi2 = unconstrainedHamiltonian(tr.arcs()[k + 1], mu.time) -
             unconstrainedHamiltonian(tr.arcs()[k], mu.time);
    tr.multipliers().push_back(mu);
  }
  return tr;
}

}  // namespace

LinearSystem assembleUnconstrained(const BoundaryData& b) {
  const std::vector<double> T = knotTimes(b);
  b.validate();
  const int m = static_cast<int>(T.size()) - 1;  // arcs
  const int nIp = m - 1;
  const int N = 4 * m + nIp;

  LinearSystem sys;
  sys.A = Eigen::MatrixXd::Zero(N, N);
  sys.b = Eigen::VectorXd::Zero(N);
  auto L = [](int j) { return 4 * j; };
  auto W = [](int j) { return 4 * j + 1; };
  auto V = [](int j) { return 4 * j + 2; };
  auto P = [](int j) { return 4 * j + 3; };

  int r = 0;
  sys.A(r, P(0)) = 1.0;
  sys.b(r++) = b.p0;
  sys.A(r, V(0)) = 1.0;
  sys.b(r++) = b.v0;

  for (int k = 0; k < nIp; ++k) {
    const double h = T[k + 1] - T[k];
    // position continuity
    sys.A(r, P(k)) = 1.0;
    sys.A(r, V(k)) = h;
    sys.A(r, W(k)) = h * h / 2.0;
    sys.A(r, L(k)) = h * h * h / 6.0;
    sys.A(r, P(k + 1)) = -1.0;
    ++r;
    // speed continuity
    sys.A(r, V(k)) = 1.0;
    sys.A(r, W(k)) = h;
    sys.A(r, L(k)) = h * h / 2.0;
    sys.A(r, V(k + 1)) = -1.0;
    ++r;
    // control continuity
    sys.A(r, W(k)) = 1.0;
    sys.A(r, L(k)) = h;
    sys.A(r, W(k + 1)) = -1.0;
    ++r;
    sys.A(r, P(k + 1)) = 1.0;
    sys.b(r++) = b.interiorPoints[k].position;
    // lambda_p(t-) = lambda_p(t+) + pi1
    sys.A(r, L(k)) = 1.0;
    sys.A(r, L(k + 1)) = -1.0;
    sys.A(r, 4 * m + k) = -1.0;
    ++r;
  }

  const int j = m - 1;
  const double h = T[m] - T[m - 1];
  sys.A(r, P(j)) = 1.0;
  sys.A(r, V(j)) = h;
  sys.A(r, W(j)) = h * h / 2.0;
  sys.A(r, L(j)) = h * h * h / 6.0;
  sys.b(r++) = b.pf;
  sys.A(r, W(j)) = 1.0;
  sys.A(r, L(j)) = h;
  sys.b(r++) = 0.0;
  return sys;
}

UnconstrainedSolution solveUnconstrained(const BoundaryData& b) {
  LinearSystem sys = assembleUnconstrained(b);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
  const double det = std::abs(lu.determinant());
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw SingularSystem("interior-point linear system is singular");
  }
  sys.x = lu.solve(sys.b);
  if (!sys.x.allFinite()) throw SingularSystem("interior-point linear system is singular");
  UnconstrainedSolution sol{buildTrajectory(b, sys.x), sys};
  return sol;
}

UnconstrainedSolution perturbSolution(const BoundaryData& b, const LinearSystem& sys,
                                      double relative) {
  LinearSystem out = sys;
  for (Eigen::Index i = 0; i < out.x.size(); ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    out.x(i) += sign * relative * (std::abs(out.x(i)) + 1.0);
  }
  return {buildTrajectory(b, out.x), out};
}

void dumpLinearSystem(const LinearSystem& sys, std::ostream& os) {
  const Eigen::Index n = sys.A.rows();
  os << std::setprecision(17);
  os << "row";
  for (Eigen::Index c = 0; c < sys.A.cols(); ++c) os << ",A" << c;
  os << ",b,x\n";
  for (Eigen::Index r = 0; r < n; ++r) {
    os << r;
    for (Eigen::Index c = 0; c < sys.A.cols(); ++c) os << ',' << sys.A(r, c);
    os << ',' << sys.b(r) << ',' << (r < sys.x.size() ? sys.x(r) : 0.0) << '\n';
  }
}

}  // namespace cavcoord
