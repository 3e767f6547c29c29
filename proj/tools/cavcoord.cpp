// Command-line front end: run sweeps, export single runs, run the oracle
// suites.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavcoord/config.hpp"
#include "cavcoord/export.hpp"
#include "cavcoord/sweep.hpp"
#include "json.hpp"
#include "suites.hpp"

namespace {

using namespace cavcoord;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int fail(int code, const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return code;
}

// "1..5" or "1,2,7".
std::vector<std::uint64_t> parseSeeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto a = std::stoull(text.substr(0, dots));
    const auto b = std::stoull(text.substr(dots + 2));
    if (b < a) throw ValidationError("seed range " + text + " is reversed");
    for (auto s = a; s <= b; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  if (out.empty()) throw ValidationError("empty seed list");
  return out;
}

std::vector<double> parseVolumes(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw ValidationError("bad volume '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty volume list");
  return out;
}

std::string defaultOutDir() {
  const char* env = std::getenv("CAVCOORD_OUT");
  return env && *env ? env : "cavcoord_out";
}

struct Common {
  std::string scenario;
  std::string preset;
  std::string mode = "both";
  std::string volumes;
  std::string seeds;
  std::string out;
  std::string fuelFile;
  bool idleTime = false;
  double epsilon = -1.0;
  double playbackStep = 0.01;
  bool serial = false;
};

void addCommon(CLI::App* cmd, Common& c) {
  auto* src = cmd->add_option("--scenario", c.scenario, "Scenario JSON file")
                  ->check(CLI::ExistingFile);
  cmd->add_option("--preset", c.preset, "Built-in scenario instead of a file")
      ->check(CLI::IsMember({"scenario1", "scenario2"}))
      ->excludes(src);
  cmd->add_option("--mode", c.mode, "Which runs to execute")
      ->check(CLI::IsMember({"optimal", "baseline", "both"}));
  cmd->add_option("--volumes", c.volumes,
                  "Comma-separated veh/h per lane per entry (default: the scenario's list)");
  cmd->add_option("--seeds", c.seeds, "Seed range a..b or comma list (default: scenario seed)");
  cmd->add_option("--out", c.out, "Output directory (default: $CAVCOORD_OUT or ./cavcoord_out)");
  cmd->add_option("--fuel", c.fuelFile, "Fuel coefficient JSON (default: built-in set)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--idle-time", c.idleTime, "Buffer schedule comparisons by 2 epsilon / vMin");
  cmd->add_option("--epsilon", c.epsilon, "Override the tracking-error bound, m");
  cmd->add_option("--playback-step", c.playbackStep, "Playback and baseline step, s")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--serial", c.serial, "Disable OpenMP across runs");
}

SweepRequest buildRequest(const Common& c) {
  SweepRequest req;
  if (!c.scenario.empty()) {
    req.config = loadScenario(c.scenario);
  } else {
    req.config = c.preset == "scenario2" ? scenarioTwo() : scenarioOne();
  }
  if (c.epsilon >= 0.0) req.config.limits.trackingError = c.epsilon;
  req.config.validate();
  if (!c.volumes.empty()) req.volumes = parseVolumes(c.volumes);
  req.seeds = c.seeds.empty() ? std::vector<std::uint64_t>{req.config.seed} : parseSeeds(c.seeds);
  if (req.volumes.empty()) req.volumes = req.config.volumes;
  for (double v : req.volumes) req.config.flow(v, 1).validate(req.config.limits);
  req.optimal = c.mode != "baseline";
  req.baseline = c.mode != "optimal";
  req.sim.idleTime = c.idleTime;
  req.sim.playbackStep = c.playbackStep;
  req.base.step = c.playbackStep;
  req.parallel = !c.serial;
  if (!c.fuelFile.empty()) req.fuel = loadFuelModel(c.fuelFile);
  return req;
}

int reportFailures(const SweepResult& sweep) {
  for (const RunFailure& f : sweep.failures) {
    std::cerr << "run failed: " << f.mode << " volume " << f.volume << " seed " << f.seed
              << ": " << f.what << '\n';
  }
  return sweep.failures.empty() ? 0 : kExitFailure;
}

int cmdRun(const Common& c, bool trajectories) {
  const SweepRequest req = buildRequest(c);
  SweepRequest r = req;
  r.sim.keepFrames = trajectories;
  r.base.keepFrames = trajectories;
  const SweepResult sweep = runSweep(r);
  const std::string dir = c.out.empty() ? defaultOutDir() : c.out;
  ExportOptions opt;
  opt.trajectories = trajectories;
  const auto files = exportSweep(dir, req.config, sweep, req.volumes, req.seeds, opt);
  const auto summaries = sweep.summaries();
  if (!summaries.empty()) {
    std::cout << req.config.name << ": " << sweep.runs.size() << " runs in " << sweep.wallSeconds
              << " s\n";
    printComparison(std::cout, aggregate(summaries));
    std::cout << "latency (worst seed per volume):\n";
    for (const LatencyRow& l : latencyTable(summaries)) {
      std::cout << "  " << l.volume << " veh/h seed " << l.seed << ": mean " << l.meanMs
                << " ms, std " << l.stdMs << " ms\n";
    }
  }
  std::cout << files.size() << " files written to " << dir << '\n';
  return reportFailures(sweep);
}

int cmdVerify(bool frozenOnly) {
  bool ok = true;
  for (const auto& s : verify::runAllSuites(!frozenOnly)) {
    std::cout << (s.passed ? "PASS " : "FAIL ") << s.name << " (" << s.cases << " cases, "
              << s.seconds << " s): " << s.detail << '\n';
    ok = ok && s.passed;
  }
  return ok ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordination of connected automated vehicles across adjacent signal-free "
               "intersections, with a fixed-time signal baseline."};
  app.set_version_flag("--version", softwareVersion());
  app.require_subcommand(1);

  Common run;
  auto* runCmd = app.add_subcommand("run", "Run a volume x seed sweep and write metrics");
  addCommon(runCmd, run);
  bool runTraj = false;
  runCmd->add_flag("--trajectories", runTraj, "Also write per-run trajectory CSVs (large)");

  Common exp;
  auto* expCmd = app.add_subcommand(
      "export", "Run and write full artifacts (trajectories, events, envelopes)");
  addCommon(expCmd, exp);

  bool frozenOnly = false;
  auto* verCmd = app.add_subcommand("verify", "Run the oracle suites, print pass/fail");
  verCmd->add_flag("--frozen-only", frozenOnly,
                   "Compare against recorded QP costs without re-solving the QP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*runCmd) return cmdRun(run, runTraj);
    if (*expCmd) return cmdRun(exp, true);
    if (*verCmd) return cmdVerify(frozenOnly);
  } catch (const ValidationError& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::out_of_range& e) {
    return fail(kExitConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kExitFailure, "runtime", e.what());
  }
  return 0;
}
