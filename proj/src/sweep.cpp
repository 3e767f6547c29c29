#include "cavcoord/sweep.hpp"

#include <chrono>
#include <optional>

namespace cavcoord {

std::vector<RunSummary> SweepResult::summaries() const {
  std::vector<RunSummary> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(summarize(r));
  return out;
}

namespace {

struct Job {
  std::string mode;
  double volume = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace

SweepResult runSweep(const SweepRequest& req) {
  req.config.validate();
  const Corridor corridor = buildCorridor(req.config.corridor);
  const std::vector<double> volumes = req.volumes.empty() ? req.config.volumes : req.volumes;
  const std::vector<std::uint64_t> seeds =
      req.seeds.empty() ? std::vector<std::uint64_t>{req.config.seed} : req.seeds;

  std::vector<Job> jobs;
  for (double v : volumes) {
    for (std::uint64_t s : seeds) {
      if (req.optimal) jobs.push_back({"optimal", v, s});
      if (req.baseline) jobs.push_back({"baseline", v, s});
    }
  }

  std::vector<std::optional<RunArtifacts>> done(jobs.size());
  std::vector<std::optional<RunFailure>> failed(jobs.size());
  SimOptions sim = req.sim;
  if (req.parallel) sim.parallel = false;  // one level of threads is enough

  auto execute = [&](long i) {
    const Job& job = jobs[i];
    const FlowSpec flow = req.config.flow(job.volume, job.seed);
    try {
      RunArtifacts run =
          job.mode == "optimal"
              ? runOptimal(corridor, req.config.limits, flow, sim, req.fuel)
              : runBaseline(corridor, req.config.limits, flow, req.config.signal,
                            req.config.carFollowing, req.base, req.fuel);
      run.scenario = req.config.name;
      done[i] = std::move(run);
    } catch (const MonitorFailure& e) {
      failed[i] = RunFailure{job.mode, job.volume, job.seed, e.what(), e.violations()};
    } catch (const std::exception& e) {
      failed[i] = RunFailure{job.mode, job.volume, job.seed, e.what(), {}};
    }
  };

  const auto start = std::chrono::steady_clock::now();
  const long n = static_cast<long>(jobs.size());
  if (req.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) execute(i);
  } else {
    for (long i = 0; i < n; ++i) execute(i);
  }

  SweepResult out;
  out.wallSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (long i = 0; i < n; ++i) {
    if (done[i]) out.runs.push_back(std::move(*done[i]));
    if (failed[i]) out.failures.push_back(std::move(*failed[i]));
  }
  return out;
}

}  // namespace cavcoord
