#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "cavcoord/scheduler.hpp"
#include "instances.hpp"
#include "qp_oracle.hpp"
#include "schedule_oracle.hpp"

namespace cavcoord::verify {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

bool ExactnessReport::passed() const {
  return systemResidual < kSystemResidualTol && positionError < kPositionTol &&
         continuityGap < kContinuityTol && terminalControl < kTerminalControlTol &&
         multiplierResidual < kMultiplierTol;
}

ExactnessReport exactness(const BoundaryData& b, const UnconstrainedSolution& sol) {
  ExactnessReport r;
  r.systemResidual = sol.system.residualInf();
  const Trajectory& tr = sol.trajectory;
  const auto& arcs = tr.arcs();
  for (std::size_t k = 0; k + 1 < arcs.size(); ++k) {
    const double t = arcs[k].tEnd;
    const KinematicState left = tr.evaluateOnArc(k, t);
    const KinematicState right = tr.evaluateOnArc(k + 1, t);
    r.continuityGap = std::max({r.continuityGap, std::abs(left.p - right.p),
                                std::abs(left.v - right.v), std::abs(left.u - right.u)});
    const double target = b.interiorPoints[k].position;
    r.positionError =
        std::max({r.positionError, std::abs(left.p - target), std::abs(right.p - target)});
  }
  const KinematicState end = tr.evaluateOnArc(arcs.size() - 1, tr.tf());
  r.positionError = std::max(r.positionError, std::abs(end.p - b.pf));
  r.terminalControl = std::abs(end.u);
  for (std::size_t k = 0; k < tr.multipliers().size(); ++k) {
    const InteriorMultiplier& mu = tr.multipliers()[k];
    const double v = tr.evaluateOnArc(k, mu.time).v;
    r.multiplierResidual = std::max(r.multiplierResidual, std::abs(mu.pi2 + mu.pi1 * v));
  }
  return r;
}

SuiteResult exactnessSuite(int count, std::uint64_t seed) {
  SuiteResult s;
  s.name = "solver exactness";
  const auto start = Clock::now();
  ExactnessReport worst;
  int failures = 0;
  for (const BoundaryData& b : exactnessInstances(count, seed)) {
    const ExactnessReport r = exactness(b, solveUnconstrained(b));
    failures += r.passed() ? 0 : 1;
    worst.systemResidual = std::max(worst.systemResidual, r.systemResidual);
    worst.positionError = std::max(worst.positionError, r.positionError);
    worst.continuityGap = std::max(worst.continuityGap, r.continuityGap);
    worst.terminalControl = std::max(worst.terminalControl, r.terminalControl);
    worst.multiplierResidual = std::max(worst.multiplierResidual, r.multiplierResidual);
    ++s.cases;
  }
  s.seconds = since(start);
  s.passed = failures == 0 && s.cases >= 100;
  s.detail = fmt("worst residual %.1e, position %.1e, continuity %.1e", worst.systemResidual,
                 worst.positionError, worst.continuityGap) +
             fmt(", u(tf) %.1e, multiplier %.1e", worst.terminalControl,
                 worst.multiplierResidual) +
             ", " + std::to_string(failures) + " failing";
  return s;
}

SuiteResult perturbationSuite(int count, std::uint64_t seed) {
  SuiteResult s;
  s.name = "perturbed solve rejected";
  const auto start = Clock::now();
  int caught = 0;
  double smallest = std::numeric_limits<double>::infinity();
  for (const BoundaryData& b : exactnessInstances(count, seed)) {
    const UnconstrainedSolution good = solveUnconstrained(b);
    const ExactnessReport r = exactness(b, perturbSolution(b, good.system, 1e-2));
    // n = 1 has one interior point, so the multiplier check always applies.
    if (r.multiplierResidual >= kMultiplierTol) ++caught;
    smallest = std::min(smallest, r.multiplierResidual);
    ++s.cases;
  }
  s.seconds = since(start);
  s.passed = caught == s.cases;
  s.detail = std::to_string(caught) + "/" + std::to_string(s.cases) +
             fmt(" caught, smallest multiplier residual %.1e", smallest);
  return s;
}

SuiteResult oracleEquivalenceSuite(bool liveQp) {
  SuiteResult s;
  s.name = "QP oracle equivalence";
  const auto start = Clock::now();
  int speedMax = 0, rearEnd = 0, failures = 0;
  double worst = 0.0, drift = 0.0;
  std::string firstFailure;
  for (const OracleInstance& inst : oracleInstances()) {
    ++s.cases;
    const auto pred = predecessorTrajectory(inst);
    double cost = 0.0;
    try {
      const Trajectory tr = solveConstrained(inst.boundary, inst.limits, pred, inst.gap);
      cost = tr.controlCost();
      speedMax += tr.hasArc(ArcKind::SpeedMax) ? 1 : 0;
      rearEnd += tr.hasArc(ArcKind::RearEndFollow) ? 1 : 0;
    } catch (const std::exception& e) {
      ++failures;
      if (firstFailure.empty()) firstFailure = inst.name + ": " + e.what();
      continue;
    }
    double rel = std::abs(cost - inst.qpCost) / inst.qpCost;
    if (liveQp) {
      QpProblem p;
      p.boundary = inst.boundary;
      p.limits = inst.limits;
      p.predecessor = pred;
      p.gap = inst.gap;
      p.step = 1e-3;
      const QpResult q = solveQpOracle(p);
      if (!q.converged) {
        ++failures;
        if (firstFailure.empty()) firstFailure = inst.name + ": QP did not converge";
        continue;
      }
      rel = std::max(rel, std::abs(cost - q.cost) / q.cost);
      drift = std::max(drift, std::abs(q.cost - inst.qpCost) / inst.qpCost);
    }
    worst = std::max(worst, rel);
    if (!(rel < kQpRelativeCostTol)) {
      ++failures;
      if (firstFailure.empty()) firstFailure = inst.name + fmt(": relative gap %.2e", rel);
    }
  }
  s.seconds = since(start);
  s.passed = failures == 0 && s.cases >= 20 && speedMax >= 3 && rearEnd >= 3;
  s.detail = std::to_string(s.cases) + " cases (" + std::to_string(speedMax) + " vMax, " +
             std::to_string(rearEnd) + " rear-end)" + fmt(", worst relative gap %.1e", worst) +
             (liveQp ? fmt(", QP drift vs frozen %.1e", drift) : std::string(", frozen QP only"));
  if (!firstFailure.empty()) s.detail += "; first failure " + firstFailure;
  return s;
}

SuiteResult schedulerSuite(int count, std::uint64_t seed) {
  SuiteResult s;
  s.name = "scheduler vs brute force";
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  int mismatch = 0, overlap = 0, rearEnd = 0, idle = 0, withPlans = 0;
  for (int i = 0; i < count; ++i) {
    const SchedulingContext ctx = schedulingCase(rng);
    ++s.cases;
    withPlans += (ctx.bookings.empty() && ctx.predecessorByLane.empty()) ? 0 : 1;
    const SchedulePlan plan = arrivalTimes(ctx, 1);
    const std::vector<double> brute = bruteForceArrivals(ctx, 1);
    for (std::size_t k = 0; k < brute.size(); ++k) {
      if (plan.arrivals[k] != brute[k]) ++mismatch;
      const int z = plan.zones[k];
      if (overlapsBooking(ctx, z, plan.arrivals[k], plan.occupancy[k])) ++overlap;
      const auto p = ctx.predecessorByLane.find(1);
      if (p != ctx.predecessorByLane.end()) {
        const auto a = p->second.arrivals.find(z);
        if (a != p->second.arrivals.end() &&
            plan.arrivals[k] < a->second + ctx.safeDistance / p->second.vAvg) {
          ++rearEnd;
        }
      }
    }
    const SchedulePlan zeroIdle = arrivalTimes(ctx, 1, idleTime(0.0, 2.0));
    if (zeroIdle.arrivals != plan.arrivals || zeroIdle.exitTime != plan.exitTime) ++idle;
  }
  s.seconds = since(start);
  s.passed = s.cases >= 1000 && mismatch == 0 && overlap == 0 && rearEnd == 0 && idle == 0;
  s.detail = std::to_string(s.cases) + " configurations (" + std::to_string(withPlans) +
             " with committed plans): " + std::to_string(mismatch) + " mismatches, " +
             std::to_string(overlap) + " overlaps, " + std::to_string(rearEnd) +
             " rear-end breaches, " + std::to_string(idle) + " idle-variant differences";
  return s;
}

std::vector<SuiteResult> runAllSuites(bool liveQp) {
  return {exactnessSuite(), perturbationSuite(), oracleEquivalenceSuite(liveQp),
          schedulerSuite()};
}

}  // namespace cavcoord::verify
