// Release gate: one PASS/FAIL line per criterion, exit 1 if any fails.
// Tolerances and budgets are pinned here.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cavcoord/config.hpp"
#include "cavcoord/metrics.hpp"
#include "cavcoord/sweep.hpp"
#include "suites.hpp"

namespace {

using namespace cavcoord;
namespace fs = std::filesystem;

constexpr double kExactnessBudgetS = 10.0;
constexpr double kOracleBudgetS = 120.0;
constexpr double kSchedulerBudgetS = 30.0;
constexpr double kSweepBudgetS = 600.0;
constexpr double kLatencyBoundMs = 5.0;
constexpr int kTravelBand[2] = {10, 45};
constexpr int kDelayBand[2] = {40, 95};
constexpr int kFuelBand[2] = {25, 75};
constexpr double kBandVolume = 600.0;
constexpr double kDelayFloor = -1e-9;        // round-off on (tf - t0) - L / v0
constexpr double kUnconflictedDelay = 1e-6;
const std::vector<double> kVolumes{600, 800, 1000, 1200, 1400};
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

void suite(int n, const verify::SuiteResult& s, double budget) {
  const bool ok = s.passed && s.seconds < budget;
  report(n, ok, s.name,
         s.detail + fmt(" [%.2f s, budget %.0f s]", s.seconds, budget));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ScenarioSweep {
  ScenarioConfig config;
  SweepResult result;
};

}  // namespace

int main() {
  suite(1, verify::exactnessSuite(), kExactnessBudgetS);
  suite(2, verify::oracleEquivalenceSuite(true), kOracleBudgetS);
  suite(3, verify::schedulerSuite(), kSchedulerBudgetS);

  // 4. full sweep, both scenarios, both modes
  std::vector<ScenarioSweep> sweeps;
  double wall = 0.0;
  int runs = 0, violations = 0, failed = 0;
  std::string firstFailure;
  for (const ScenarioConfig& cfg : {scenarioOne(), scenarioTwo()}) {
    SweepRequest req;
    req.config = cfg;
    req.volumes = kVolumes;
    req.seeds = kSeeds;
    ScenarioSweep s{cfg, runSweep(req)};
    wall += s.result.wallSeconds;
    runs += static_cast<int>(s.result.runs.size());
    failed += static_cast<int>(s.result.failures.size());
    for (const RunFailure& f : s.result.failures) {
      if (firstFailure.empty()) {
        firstFailure = cfg.name + " " + f.mode + fmt(" v%.0f s%.0f: ", f.volume, f.seed) + f.what;
      }
    }
    for (const RunArtifacts& r : s.result.runs) violations += static_cast<int>(r.violations.size());
    sweeps.push_back(std::move(s));
  }
  {
    const int expected = 2 * 2 * static_cast<int>(kVolumes.size() * kSeeds.size());
    const bool ok = failed == 0 && violations == 0 && runs == expected && wall < kSweepBudgetS;
    std::string d = std::to_string(runs) + "/" + std::to_string(expected) + " runs, " +
                    std::to_string(failed) + " failed, " + std::to_string(violations) +
                    " monitor violations" + fmt(" [%.1f s, budget %.0f s]", wall, kSweepBudgetS);
    if (!firstFailure.empty()) d += "; first: " + firstFailure;
    report(4, ok, "safety at scale", d);
  }

  // 5. latency
  {
    bool ok = true;
    std::string d;
    for (const ScenarioSweep& s : sweeps) {
      const auto summaries = s.result.summaries();
      double worstMean = 0.0;
      for (const RunSummary& r : summaries) {
        if (r.mode == "optimal") worstMean = std::max(worstMean, r.latencyMeanMs);
      }
      const auto table = latencyTable(summaries);
      bool increasing = table.size() >= 2;
      for (std::size_t k = 1; k < table.size(); ++k) {
        increasing = increasing && table[k].meanMs > table[k - 1].meanMs;
      }
      ok = ok && worstMean < kLatencyBoundMs && !increasing;
      d += s.config.name + ": worst mean " + fmt("%.3f ms, series", worstMean);
      for (const LatencyRow& l : table) d += fmt(" %.3f", l.meanMs);
      d += increasing ? " (monotone); " : " (not monotone); ";
    }
    d += fmt("bound %.0f ms", kLatencyBoundMs);
    report(5, ok, "solve latency", d);
  }

  // 6. improvement bands at 600 veh/h, direction on every run
  {
    bool ok = true;
    std::string d;
    int directional = 0, pairs = 0;
    for (const ScenarioSweep& s : sweeps) {
      for (const ComparisonRow& row : aggregate(s.result.summaries())) {
        if (row.volume != kBandVolume) continue;
        const bool in = row.travelPct >= kTravelBand[0] && row.travelPct <= kTravelBand[1] &&
                        row.delayPct >= kDelayBand[0] && row.delayPct <= kDelayBand[1] &&
                        row.fuelPct >= kFuelBand[0] && row.fuelPct <= kFuelBand[1];
        ok = ok && in;
        d += s.config.name + ": travel " + std::to_string(row.travelPct) + "%, delay " +
             std::to_string(row.delayPct) + "%, fuel " + std::to_string(row.fuelPct) + "%; ";
      }
      std::map<std::pair<double, std::uint64_t>, std::map<std::string, RunSummary>> byRun;
      for (const RunSummary& r : s.result.summaries()) byRun[{r.volume, r.seed}][r.mode] = r;
      for (auto& [key, modes] : byRun) {
        if (!modes.count("optimal") || !modes.count("baseline")) continue;
        ++pairs;
        const RunSummary& o = modes["optimal"];
        const RunSummary& b = modes["baseline"];
        if (o.travelTime <= b.travelTime && o.fuel <= b.fuel) ++directional;
      }
    }
    ok = ok && pairs > 0 && directional == pairs;
    d += "optimal <= baseline on " + std::to_string(directional) + "/" + std::to_string(pairs) +
         " runs";
    report(6, ok, "relative improvement", d);
  }

  // 7. delay metric
  {
    int vehicles = 0, negative = 0, unconflicted = 0, unconflictedBad = 0;
    double minDelay = 0.0, worstUnconflicted = 0.0;
    for (const ScenarioSweep& s : sweeps) {
      for (const RunArtifacts& r : s.result.runs) {
        if (r.mode != "optimal") continue;
        for (const VehicleResult& v : r.vehicles) {
          ++vehicles;
          minDelay = std::min(minDelay, v.delay);
          negative += v.delay < kDelayFloor ? 1 : 0;
          if (v.unconflicted) {
            ++unconflicted;
            worstUnconflicted = std::max(worstUnconflicted, std::abs(v.delay));
            unconflictedBad += std::abs(v.delay) < kUnconflictedDelay ? 0 : 1;
          }
        }
      }
    }
    const bool ok = vehicles > 0 && unconflicted > 0 && negative == 0 && unconflictedBad == 0;
    report(7, ok, "delay metric",
           std::to_string(vehicles) + " vehicles" + fmt(", min delay %.2e s", minDelay) + ", " +
               std::to_string(unconflicted) + " unconflicted" +
               fmt(" with max |delay| %.2e s", worstUnconflicted));
  }

  // 8. determinism of the CLI
  {
    const fs::path base = fs::temp_directory_path() / "cavcoord_acceptance";
    fs::remove_all(base);
    bool ran = true;
    for (const char* run : {"a", "b"}) {
      const std::string cmd = std::string("\"") + CAVCOORD_CLI +
                              "\" run --preset scenario1 --mode both --volumes 600,1000 "
                              "--seeds 1..2 --out \"" +
                              (base / run).string() + "\" >/dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      ran = ran && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    }
    int compared = 0, differing = 0;
    if (ran) {
      for (const auto& e : fs::directory_iterator(base / "a" / "metrics")) {
        if (e.path().extension() != ".csv") continue;
        ++compared;
        const fs::path other = base / "b" / "metrics" / e.path().filename();
        differing += slurp(e.path()) == slurp(other) ? 0 : 1;
      }
    }
    const bool ok = ran && compared >= 3 && differing == 0;
    report(8, ok, "determinism",
           std::string(ran ? "" : "CLI failed; ") + std::to_string(compared) +
               " metrics CSVs compared, " + std::to_string(differing) + " differ");
    fs::remove_all(base);
  }

  std::printf("%s\n", failures == 0 ? "all criteria pass" :
                                      (std::to_string(failures) + " criteria fail").c_str());
  return failures == 0 ? 0 : 1;
}
