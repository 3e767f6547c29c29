#include "qp_oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavcoord::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long gridIndex(double t, double t0, double dt) {
  const double k = (t - t0) / dt;
  const long r = std::lround(k);
  if (std::abs(k - static_cast<double>(r)) > 1e-6) {
    throw std::invalid_argument("oracle needs boundary times on the grid");
  }
  return r;
}

}  // namespace

QpResult solveQpOracle(const QpProblem& prob) {
  const BoundaryData& b = prob.boundary;
  const double dt = prob.step;
  const long N = gridIndex(b.tf, b.t0, dt);
  const int nz = static_cast<int>(3 * (N + 1));
  auto P = [](long k) { return static_cast<int>(3 * k); };
  auto V = [](long k) { return static_cast<int>(3 * k + 1); };
  auto U = [](long k) { return static_cast<int>(3 * k + 2); };
  auto cruise = [&](long k) { return b.p0 + b.v0 * k * dt; };

  // Equalities E z = e (positions relative to the entry cruise line).
  std::vector<Eigen::Triplet<double>> et;
  std::vector<double> e;
  auto row = [&](std::initializer_list<std::pair<int, double>> cs, double rhs) {
    const int r = static_cast<int>(e.size());
    for (const auto& [c, val] : cs) et.emplace_back(r, c, val);
    e.push_back(rhs);
  };
  row({{P(0), 1.0}}, 0.0);
  row({{V(0), 1.0}}, 0.0);
  for (long k = 0; k < N; ++k) {
    row({{P(k + 1), 1.0}, {P(k), -1.0}, {V(k), -dt}, {U(k), -dt * dt / 2.0}}, 0.0);
    row({{V(k + 1), 1.0}, {V(k), -1.0}, {U(k), -dt}}, 0.0);
  }
  std::vector<char> pinned(static_cast<std::size_t>(N + 1), 0);
  pinned[0] = pinned[static_cast<std::size_t>(N)] = 1;
  for (const auto& ip : b.interiorPoints) {
    const long k = gridIndex(ip.time, b.t0, dt);
    row({{P(k), 1.0}}, ip.position - cruise(k));
    pinned[static_cast<std::size_t>(k)] = 1;
  }
  row({{P(N), 1.0}}, b.pf - cruise(N));
  row({{U(N), 1.0}}, 0.0);
  const int ne = static_cast<int>(e.size());
  Eigen::SparseMatrix<double> E(ne, nz);
  E.setFromTriplets(et.begin(), et.end());
  const Eigen::Map<const Eigen::VectorXd> ev(e.data(), ne);

  Eigen::VectorXd H = Eigen::VectorXd::Zero(nz);
  for (long k = 0; k < N; ++k) H(U(k)) = dt;

  Eigen::VectorXd lo = Eigen::VectorXd::Constant(nz, -kInf);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(nz, kInf);
  const VehicleLimits& lim = prob.limits;
  if (prob.enforceLimits) {
    for (long k = 1; k <= N; ++k) {
      lo(V(k)) = lim.vMin - b.v0;
      hi(V(k)) = lim.vMax - b.v0;
    }
    for (long k = 0; k < N; ++k) {
      lo(U(k)) = lim.uMin;
      hi(U(k)) = lim.uMax;
    }
    if (prob.predecessor) {
      // Pinned positions carry no bound; an equality sitting on the bound
      // would leave no interior.
      for (long k = 1; k <= N; ++k) {
        if (pinned[static_cast<std::size_t>(k)]) continue;
        hi(P(k)) = prob.predecessor->evaluateExtended(b.t0 + k * dt).p - prob.gap - cruise(k);
      }
    }
  }

  std::vector<int> lowIdx, highIdx;
  for (int i = 0; i < nz; ++i) {
    if (std::isfinite(lo(i))) lowIdx.push_back(i);
    if (std::isfinite(hi(i))) highIdx.push_back(i);
  }
  const double nb = static_cast<double>(lowIdx.size() + highIdx.size());

  const double reg = 1e-10;
  const int nk = nz + ne;
  std::vector<Eigen::Triplet<double>> kt;
  kt.reserve(et.size() + static_cast<std::size_t>(nk));
  for (const auto& t : et) kt.emplace_back(nz + t.row(), t.col(), t.value());  // lower block
  const std::size_t diagStart = kt.size();
  for (int i = 0; i < nk; ++i) kt.emplace_back(i, i, 0.0);
  Eigen::SparseMatrix<double> K(nk, nk);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
  bool analyzed = false;
  Eigen::VectorXd sigmaDiag = Eigen::VectorXd::Zero(nz);

  auto factor = [&]() {
    for (int i = 0; i < nz; ++i) {
      kt[diagStart + static_cast<std::size_t>(i)] = {i, i, H(i) + sigmaDiag(i) + reg};
    }
    for (int i = 0; i < ne; ++i) {
      kt[diagStart + static_cast<std::size_t>(nz + i)] = {nz + i, nz + i, -reg};
    }
    K.setFromTriplets(kt.begin(), kt.end());
    if (!analyzed) {
      ldlt.analyzePattern(K);
      analyzed = true;
    }
    ldlt.factorize(K);
    return ldlt.info() == Eigen::Success;
  };
  // Solves (H+S) dz + E^T w = r1, E dz = r2, refining against the
  // unregularized matrix; returns dy = -w.
  auto solveKkt = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dz,
                      Eigen::VectorXd& dy) {
    Eigen::VectorXd rhs(nk);
    rhs << r1, r2;
    Eigen::VectorXd sol = ldlt.solve(rhs);
    for (int pass = 0; pass < 10; ++pass) {
      Eigen::VectorXd Kx(nk);
      const Eigen::VectorXd sz = sol.head(nz), sw = sol.tail(ne);
      Kx.head(nz) = (H + sigmaDiag).cwiseProduct(sz) + E.transpose() * sw;
      Kx.tail(ne) = E * sz;
      const Eigen::VectorXd err = rhs - Kx;
      if (err.lpNorm<Eigen::Infinity>() < 1e-12 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) break;
      sol += ldlt.solve(err);
    }
    dz = sol.head(nz);
    dy = -sol.tail(ne);
  };

  // Start from the equality-constrained minimizer pulled inside the bounds.
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nz);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ne);
  sigmaDiag.setConstant(1e-8);
  if (factor()) {
    Eigen::VectorXd z0, y0;
    solveKkt(Eigen::VectorXd::Zero(nz), ev, z0, y0);
    if (z0.allFinite()) z = z0;
  }
  for (int i = 0; i < nz; ++i) {
    const double l = lo(i), h = hi(i);
    const double margin = (std::isfinite(l) && std::isfinite(h)) ? std::min(1e-2, 0.25 * (h - l)) : 1e-2;
    if (std::isfinite(h)) z(i) = std::min(z(i), h - margin);
    if (std::isfinite(l)) z(i) = std::max(z(i), l + margin);
  }
  Eigen::VectorXd lamL = Eigen::VectorXd::Zero(nz), lamH = Eigen::VectorXd::Zero(nz);
  for (int i : lowIdx) lamL(i) = 1.0;
  for (int i : highIdx) lamH(i) = 1.0;

  QpResult res;
  auto complementarity = [&]() {
    double s = 0.0;
    for (int i : lowIdx) s += (z(i) - lo(i)) * lamL(i);
    for (int i : highIdx) s += (hi(i) - z(i)) * lamH(i);
    return nb > 0 ? s / nb : 0.0;
  };

  for (int it = 0; it < 200; ++it) {
    res.iterations = it;
    const Eigen::VectorXd grad = H.cwiseProduct(z) - E.transpose() * y;
    const Eigen::VectorXd rd = grad - lamL + lamH;
    const Eigen::VectorXd rp = E * z - ev;
    const double mu = complementarity();
    res.primalResidual = rp.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(mu) || !rd.allFinite()) break;
    if (res.primalResidual < 1e-9 && rd.lpNorm<Eigen::Infinity>() < 1e-8 && mu < 1e-12) {
      res.converged = true;
      break;
    }

    sigmaDiag.setZero();
    for (int i : lowIdx) sigmaDiag(i) += lamL(i) / (z(i) - lo(i));
    for (int i : highIdx) sigmaDiag(i) += lamH(i) / (hi(i) - z(i));
    if (!factor()) break;

    auto direction = [&](const Eigen::VectorXd& tl, const Eigen::VectorXd& th,
                         Eigen::VectorXd& dz, Eigen::VectorXd& dy, Eigen::VectorXd& dll,
                         Eigen::VectorXd& dlh) {
      Eigen::VectorXd r1 = -grad;
      for (int i : lowIdx) r1(i) += tl(i) / (z(i) - lo(i));
      for (int i : highIdx) r1(i) -= th(i) / (hi(i) - z(i));
      solveKkt(r1, -rp, dz, dy);
      dll = Eigen::VectorXd::Zero(nz);
      dlh = Eigen::VectorXd::Zero(nz);
      for (int i : lowIdx) {
        const double s = z(i) - lo(i);
        dll(i) = tl(i) / s - lamL(i) - lamL(i) / s * dz(i);
      }
      for (int i : highIdx) {
        const double s = hi(i) - z(i);
        dlh(i) = th(i) / s - lamH(i) + lamH(i) / s * dz(i);
      }
    };
    auto stepLengths = [&](const Eigen::VectorXd& dz, const Eigen::VectorXd& dll,
                           const Eigen::VectorXd& dlh, double frac, double& ap, double& ad) {
      ap = 1.0;
      ad = 1.0;
      for (int i : lowIdx) {
        if (dz(i) < 0) ap = std::min(ap, -frac * (z(i) - lo(i)) / dz(i));
        if (dll(i) < 0) ad = std::min(ad, -frac * lamL(i) / dll(i));
      }
      for (int i : highIdx) {
        if (dz(i) > 0) ap = std::min(ap, frac * (hi(i) - z(i)) / dz(i));
        if (dlh(i) < 0) ad = std::min(ad, -frac * lamH(i) / dlh(i));
      }
    };

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(nz);
    Eigen::VectorXd dz, dy, dll, dlh;
    direction(zero, zero, dz, dy, dll, dlh);
    double ap = 1.0, ad = 1.0;
    if (nb > 0) {
      stepLengths(dz, dll, dlh, 1.0, ap, ad);
      double muAff = 0.0;
      for (int i : lowIdx) muAff += (z(i) + ap * dz(i) - lo(i)) * (lamL(i) + ad * dll(i));
      for (int i : highIdx) muAff += (hi(i) - z(i) - ap * dz(i)) * (lamH(i) + ad * dlh(i));
      muAff /= nb;
      const double sigma = std::pow(muAff / mu, 3.0);
      Eigen::VectorXd tl = Eigen::VectorXd::Zero(nz), th = Eigen::VectorXd::Zero(nz);
      for (int i : lowIdx) tl(i) = sigma * mu - dz(i) * dll(i);
      for (int i : highIdx) th(i) = sigma * mu + dz(i) * dlh(i);
      direction(tl, th, dz, dy, dll, dlh);
      stepLengths(dz, dll, dlh, 0.995, ap, ad);
    }
    if (!dz.allFinite() || !dy.allFinite() || !dll.allFinite() || !dlh.allFinite()) break;
    z += ap * dz;
    y += ad * dy;
    lamL += ad * dll;
    lamH += ad * dlh;
  }

  res.cost = 0.0;
  for (long k = 0; k < N; ++k) res.cost += 0.5 * dt * z(U(k)) * z(U(k));
  res.t.resize(N + 1);
  res.p.resize(N + 1);
  res.v.resize(N + 1);
  res.u.resize(N + 1);
  for (long k = 0; k <= N; ++k) {
    res.t[k] = b.t0 + k * dt;
    res.p[k] = z(P(k)) + cruise(k);
    res.v[k] = z(V(k)) + b.v0;
    res.u[k] = z(U(k));
  }
  return res;
}

}  // namespace cavcoord::verify
