// Serial vs OpenMP kernels: playback, monitor, and a small sweep.

#include <benchmark/benchmark.h>

#include "cavcoord/config.hpp"
#include "cavcoord/monitor.hpp"
#include "cavcoord/sim.hpp"
#include "cavcoord/sweep.hpp"

namespace {

using namespace cavcoord;

struct Fixture {
  ScenarioConfig cfg = scenarioOne();
  Corridor corridor = buildCorridor(cfg.corridor);
  RunArtifacts run;

  Fixture() {
    SimOptions o;
    o.keepFrames = true;
    o.parallel = false;
    run = runOptimal(corridor, cfg.limits, cfg.flow(1400.0, 1), o);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Monitor(benchmark::State& state) {
  const Fixture& f = fixture();
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(monitorFrames(f.run.frames, f.corridor, 6.0, parallel));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.run.frames.size()));
}
BENCHMARK(BM_Monitor)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_OptimalRun(benchmark::State& state) {
  const Fixture& f = fixture();
  SimOptions o;
  o.parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(runOptimal(f.corridor, f.cfg.limits, f.cfg.flow(1000.0, 2), o));
  }
}
BENCHMARK(BM_OptimalRun)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  SweepRequest r;
  r.config = scenarioOne();
  r.volumes = {600.0, 1000.0};
  r.seeds = {1, 2};
  r.baseline = false;
  r.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(runSweep(r));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
