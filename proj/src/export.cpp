#include "cavcoord/export.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "json.hpp"

#ifndef CAVCOORD_VERSION
#define CAVCOORD_VERSION "0.0.0"
#endif

namespace cavcoord {

namespace fs = std::filesystem;

namespace {

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string vol(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string movementName(const Movement& m) {
  std::string s = approachName(m.approach);
  if (m.crossing >= 0) s += "@" + std::to_string(m.crossing + 1);
  return s;
}

std::string runDirName(const RunArtifacts& r) {
  return r.mode + "_v" + vol(r.volume) + "_s" + std::to_string(r.seed);
}

}  // namespace

std::string softwareVersion() { return CAVCOORD_VERSION; }

void writeTrajectoryCsv(std::ostream& out, const RunArtifacts& run) {
  out << "vehicle_id,t,p,v,u,lane,zone_flag\n";
  for (const Frame& f : run.frames) {
    for (const VehicleSnapshot& s : f.vehicles) {
      out << s.id << ',' << num(f.t, 3) << ',' << num(s.p) << ',' << num(s.v) << ','
          << num(s.u) << ',' << s.lane << ',' << s.zone << '\n';
    }
  }
}

void writeEventsJsonl(std::ostream& out, const RunArtifacts& run) {
  for (const Event& e : run.events) {
    nlohmann::ordered_json j;
    j["t"] = std::stod(num(e.t));
    j["event"] = e.event;
    j["vehicle_id"] = e.vehicle;
    j["detail"] = e.detail;
    out << j.dump() << '\n';
  }
}

void writeEnvelopeCsv(std::ostream& out, const RunArtifacts& run) {
  out << "t,count,v_min,v_mean,v_max\n";
  for (const EnvelopeSample& e : run.envelope) {
    out << num(e.t, 3) << ',' << e.count << ',' << num(e.vMin) << ',' << num(e.vMean) << ','
        << num(e.vMax) << '\n';
  }
}

void writeVehicleCsv(std::ostream& out, const std::vector<RunArtifacts>& runs) {
  out << "mode,scenario,volume,seed,vehicle_id,movement,entry_lane,final_lane,t0,v0,tf,"
         "path_length,travel_time,delay,fuel_ml,min_speed,reschedules,unconflicted,arcs\n";
  for (const RunArtifacts& r : runs) {
    for (const VehicleResult& v : r.vehicles) {
      out << r.mode << ',' << r.scenario << ',' << vol(r.volume) << ',' << r.seed << ','
          << v.id << ',' << movementName(v.movement) << ',' << v.entryLane << ','
          << v.finalLane << ',' << num(v.t0) << ',' << num(v.v0) << ',' << num(v.tf) << ','
          << num(v.pathLength) << ',' << num(v.travelTime) << ',' << num(v.delay) << ','
          << num(v.fuel) << ',' << num(v.minSpeed) << ',' << v.reschedules << ','
          << (v.unconflicted ? 1 : 0) << ',' << v.arcs << '\n';
    }
  }
}

void writeRunSummaryCsv(std::ostream& out, const std::vector<RunSummary>& runs) {
  out << "mode,scenario,volume,seed,vehicles,travel_time,delay,fuel_ml,fuel_rate_ml_s,"
         "min_speed,violations\n";
  for (const RunSummary& s : runs) {
    out << s.mode << ',' << s.scenario << ',' << vol(s.volume) << ',' << s.seed << ','
        << s.vehicles << ',' << num(s.travelTime) << ',' << num(s.delay) << ',' << num(s.fuel)
        << ',' << num(s.fuelRate) << ',' << num(s.minSpeed) << ',' << s.violations << '\n';
  }
}

void writeComparisonCsv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "volume,seeds,vehicles,baseline_travel_time,optimal_travel_time,travel_time_pct,"
         "baseline_delay,optimal_delay,delay_pct,baseline_fuel_rate,optimal_fuel_rate,"
         "baseline_fuel_ml,optimal_fuel_ml,fuel_pct\n";
  for (const ComparisonRow& r : rows) {
    out << vol(r.volume) << ',' << r.seeds << ',' << num(r.vehicles, 2) << ','
        << num(r.baseTravel) << ',' << num(r.optTravel) << ',' << r.travelPct << ','
        << num(r.baseDelay) << ',' << num(r.optDelay) << ',' << r.delayPct << ','
        << num(r.baseFuelRate) << ',' << num(r.optFuelRate) << ',' << num(r.baseFuel) << ','
        << num(r.optFuel) << ',' << r.fuelPct << '\n';
  }
}

void writeLatencyCsv(std::ostream& out, const std::vector<RunSummary>& runs) {
  out << "volume,seed,mean_ms,std_ms,worst_seed\n";
  const auto worst = latencyTable(runs);
  for (const RunSummary& s : runs) {
    if (s.mode != "optimal") continue;
    bool w = false;
    for (const auto& row : worst) w = w || (row.volume == s.volume && row.seed == s.seed);
    out << vol(s.volume) << ',' << s.seed << ',' << num(s.latencyMeanMs, 4) << ','
        << num(s.latencyStdMs, 4) << ',' << (w ? 1 : 0) << '\n';
  }
}

std::string summaryJson(const ScenarioConfig& config, const std::vector<RunSummary>& runs) {
  nlohmann::ordered_json j;
  j["scenario"] = config.name;
  j["config_hash"] = configHash(config);
  j["version"] = softwareVersion();
  auto& rs = j["runs"] = nlohmann::ordered_json::array();
  for (const RunSummary& s : runs) {
    rs.push_back({{"mode", s.mode},
                  {"volume", s.volume},
                  {"seed", s.seed},
                  {"vehicles", s.vehicles},
                  {"travel_time", s.travelTime},
                  {"delay", s.delay},
                  {"fuel_ml", s.fuel},
                  {"fuel_rate_ml_s", s.fuelRate},
                  {"min_speed", s.minSpeed},
                  {"latency_mean_ms", s.latencyMeanMs},
                  {"latency_std_ms", s.latencyStdMs},
                  {"violations", s.violations}});
  }
  auto& cs = j["comparison"] = nlohmann::ordered_json::array();
  if (!runs.empty()) {
    for (const ComparisonRow& r : aggregate(runs)) {
      cs.push_back({{"volume", r.volume},
                    {"seeds", r.seeds},
                    {"vehicles", r.vehicles},
                    {"baseline_travel_time", r.baseTravel},
                    {"optimal_travel_time", r.optTravel},
                    {"travel_time_pct", r.travelPct},
                    {"baseline_delay", r.baseDelay},
                    {"optimal_delay", r.optDelay},
                    {"delay_pct", r.delayPct},
                    {"baseline_fuel_ml", r.baseFuel},
                    {"optimal_fuel_ml", r.optFuel},
                    {"fuel_pct", r.fuelPct}});
    }
  }
  auto& ls = j["latency"] = nlohmann::ordered_json::array();
  for (const LatencyRow& r : latencyTable(runs)) {
    ls.push_back({{"volume", r.volume}, {"seed", r.seed}, {"mean_ms", r.meanMs},
                  {"std_ms", r.stdMs}});
  }
  return j.dump(2);
}

void printComparison(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << std::left << std::setw(8) << "volume" << std::setw(10) << "vehicles" << std::setw(12)
      << "base tt" << std::setw(12) << "opt tt" << std::setw(7) << "tt%" << std::setw(12)
      << "base delay" << std::setw(12) << "opt delay" << std::setw(7) << "dl%" << std::setw(12)
      << "base fuel" << std::setw(12) << "opt fuel" << "fuel%\n";
  for (const ComparisonRow& r : rows) {
    out << std::setw(8) << vol(r.volume) << std::setw(10) << num(r.vehicles, 1) << std::setw(12)
        << num(r.baseTravel, 2) << std::setw(12) << num(r.optTravel, 2) << std::setw(7)
        << r.travelPct << std::setw(12) << num(r.baseDelay, 2) << std::setw(12)
        << num(r.optDelay, 2) << std::setw(7) << r.delayPct << std::setw(12)
        << num(r.baseFuel, 2) << std::setw(12) << num(r.optFuel, 2) << r.fuelPct << '\n';
  }
}

std::vector<std::string> exportSweep(const std::string& dir, const ScenarioConfig& config,
                                     const SweepResult& sweep, const std::vector<double>& volumes,
                                     const std::vector<std::uint64_t>& seeds,
                                     const ExportOptions& options) {
  std::vector<std::string> written;
  fs::create_directories(dir);
  auto open = [&](const std::string& rel) {
    const fs::path p = fs::path(dir) / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    written.push_back(rel);
    return f;
  };

  const auto summaries = sweep.summaries();
  {
    auto f = open("metrics/vehicles.csv");
    writeVehicleCsv(f, sweep.runs);
  }
  {
    auto f = open("metrics/runs.csv");
    writeRunSummaryCsv(f, summaries);
  }
  if (!summaries.empty()) {
    auto f = open("metrics/comparison.csv");
    writeComparisonCsv(f, aggregate(summaries));
  }
  {
    auto f = open("latency.csv");
    writeLatencyCsv(f, summaries);
  }
  {
    auto f = open("summary.json");
    f << summaryJson(config, summaries) << '\n';
  }
  for (const RunArtifacts& r : sweep.runs) {
    const std::string base = "runs/" + runDirName(r) + "/";
    if (options.trajectories) {
      auto f = open(base + "trajectory.csv");
      writeTrajectoryCsv(f, r);
    }
    if (options.events) {
      auto f = open(base + "events.jsonl");
      writeEventsJsonl(f, r);
    }
    if (options.envelopes) {
      auto f = open(base + "envelope.csv");
      writeEnvelopeCsv(f, r);
    }
  }
  if (!sweep.failures.empty()) {
    auto f = open("failures.jsonl");
    for (const RunFailure& e : sweep.failures) {
      nlohmann::ordered_json j;
      j["mode"] = e.mode;
      j["volume"] = e.volume;
      j["seed"] = e.seed;
      j["error"] = e.what;
      auto& vs = j["violations"] = nlohmann::ordered_json::array();
      for (const Violation& v : e.violations) {
        vs.push_back({{"t", v.t}, {"kind", v.kind}, {"leader", v.leader},
                      {"follower", v.follower}, {"zone", v.zone}, {"value", v.value}});
      }
      f << j.dump() << '\n';
    }
  }

  nlohmann::ordered_json m;
  m["software"] = "cavcoord";
  m["version"] = softwareVersion();
  m["scenario"] = config.name;
  m["config_hash"] = configHash(config);
  m["config"] = nlohmann::json::parse(scenarioJson(config));
  m["volumes"] = volumes;
  m["seeds"] = seeds;
  m["files"] = written;
  std::ofstream mf(fs::path(dir) / "manifest.json", std::ios::binary);
  mf << m.dump(2) << '\n';
  written.push_back("manifest.json");
  return written;
}

}  // namespace cavcoord
