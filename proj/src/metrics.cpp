#include "cavcoord/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace cavcoord {

FuelModelCoefficients defaultFuelModel() {
  FuelModelCoefficients c;
  c.cruise = {0.1569, 2.450e-2, -7.415e-4, 5.975e-5};
  c.accel = {0.07224, 9.681e-2, 1.075e-3};
  c.source = "Kamal et al. 2013 (IEEE TCST 21(3)), typical passenger car";
  return c;
}

FuelModelCoefficients loadFuelModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open fuel coefficient file " + path);
  const auto j = nlohmann::json::parse(in);
  FuelModelCoefficients c;
  const auto cruise = j.at("cruise").get<std::vector<double>>();
  const auto accel = j.at("accel").get<std::vector<double>>();
  if (cruise.size() != 4 || accel.size() != 3) {
    throw ValidationError("fuel model needs 4 cruise and 3 accel coefficients");
  }
  std::copy(cruise.begin(), cruise.end(), c.cruise.begin());
  std::copy(accel.begin(), accel.end(), c.accel.begin());
  c.source = j.value("source", "");
  return c;
}

double fuelRate(const FuelModelCoefficients& c, double v, double u) {
  double f = c.cruise[0] + v * (c.cruise[1] + v * (c.cruise[2] + v * c.cruise[3]));
  if (u > 0.0) f += u * (c.accel[0] + v * (c.accel[1] + v * c.accel[2]));
  return std::max(f, 0.0);
}

double integrateFuel(const FuelModelCoefficients& c, const std::vector<double>& t,
                     const std::vector<double>& v, const std::vector<double>& u) {
  if (t.size() != v.size() || t.size() != u.size()) {
    throw std::invalid_argument("fuel samples have mismatched lengths");
  }
  double total = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    total += 0.5 * (t[k] - t[k - 1]) * (fuelRate(c, v[k - 1], u[k - 1]) + fuelRate(c, v[k], u[k]));
  }
  return total;
}

double timeDelay(double t0, double tf, double p0, double pf, double v0) {
  if (!(v0 > 0.0)) throw ValidationError("time delay needs an entry speed > 0");
  return (tf - t0) - (pf - p0) / v0;
}

double timeDelay(const Trajectory& tr) {
  const auto a = tr.evaluate(tr.t0());
  const auto b = tr.evaluate(tr.tf());
  return timeDelay(tr.t0(), tr.tf(), a.p, b.p, a.v);
}

RunSummary summarize(const RunArtifacts& run) {
  RunSummary s;
  s.mode = run.mode;
  s.scenario = run.scenario;
  s.volume = run.volume;
  s.seed = run.seed;
  s.vehicles = static_cast<int>(run.vehicles.size());
  s.violations = static_cast<int>(run.violations.size());
  if (run.vehicles.empty()) return s;
  double lat2 = 0.0;
  s.minSpeed = std::numeric_limits<double>::infinity();
  for (const auto& v : run.vehicles) {
    s.travelTime += v.travelTime;
    s.delay += v.delay;
    s.fuel += v.fuel;
    s.fuelRate += v.fuel / v.travelTime;
    s.latencyMeanMs += v.latencyMs;
    lat2 += v.latencyMs * v.latencyMs;
    s.minSpeed = std::min(s.minSpeed, v.minSpeed);
  }
  const double n = s.vehicles;
  s.travelTime /= n;
  s.delay /= n;
  s.fuel /= n;
  s.fuelRate /= n;
  s.latencyMeanMs /= n;
  s.latencyStdMs = std::sqrt(std::max(0.0, lat2 / n - s.latencyMeanMs * s.latencyMeanMs));
  return s;
}

int improvementPercent(double baseline, double optimal) {
  if (!(baseline > 0.0)) throw std::invalid_argument("improvement needs a positive baseline");
  return static_cast<int>(std::lround(100.0 * (baseline - optimal) / baseline));
}

namespace {

void checkSameScenario(const std::vector<RunSummary>& runs) {
  for (const auto& r : runs) {
    if (r.scenario != runs.front().scenario) {
      throw ValidationError("cannot aggregate runs of scenarios '" + runs.front().scenario +
                            "' and '" + r.scenario + "'");
    }
  }
}

}  // namespace

std::vector<ComparisonRow> aggregate(const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
  checkSameScenario(runs);
  struct Acc {
    int n = 0;
    double vehicles = 0, travel = 0, delay = 0, fuelRate = 0, fuel = 0;
  };
  std::map<double, std::map<std::string, Acc>> acc;
  for (const auto& r : runs) {
    Acc& a = acc[r.volume][r.mode];
    ++a.n;
    a.vehicles += r.vehicles;
    a.travel += r.travelTime;
    a.delay += r.delay;
    a.fuelRate += r.fuelRate;
    a.fuel += r.fuel;
  }
  std::vector<ComparisonRow> rows;
  for (auto& [volume, modes] : acc) {
    ComparisonRow row;
    row.volume = volume;
    auto mean = [](const Acc& a, double Acc::*f) { return a.n ? a.*f / a.n : 0.0; };
    const Acc& o = modes["optimal"];
    const Acc& b = modes["baseline"];
    row.seeds = std::max(o.n, b.n);
    row.vehicles = o.n ? mean(o, &Acc::vehicles) : mean(b, &Acc::vehicles);
    row.optTravel = mean(o, &Acc::travel);
    row.baseTravel = mean(b, &Acc::travel);
    row.optDelay = mean(o, &Acc::delay);
    row.baseDelay = mean(b, &Acc::delay);
    row.optFuelRate = mean(o, &Acc::fuelRate);
    row.baseFuelRate = mean(b, &Acc::fuelRate);
    row.optFuel = mean(o, &Acc::fuel);
    row.baseFuel = mean(b, &Acc::fuel);
    if (o.n && b.n) {
      row.travelPct = improvementPercent(row.baseTravel, row.optTravel);
      row.delayPct = improvementPercent(row.baseDelay, row.optDelay);
      row.fuelPct = improvementPercent(row.baseFuel, row.optFuel);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<LatencyRow> latencyTable(const std::vector<RunSummary>& runs) {
  std::map<double, LatencyRow> best;
  for (const auto& r : runs) {
    if (r.mode != "optimal") continue;
    auto it = best.find(r.volume);
    if (it == best.end() || r.latencyMeanMs > it->second.meanMs) {
      best[r.volume] = {r.volume, r.seed, r.latencyMeanMs, r.latencyStdMs};
    }
  }
  std::vector<LatencyRow> out;
  for (auto& [v, row] : best) out.push_back(row);
  return out;
}

}  // namespace cavcoord
