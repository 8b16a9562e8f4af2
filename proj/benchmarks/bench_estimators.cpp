#include <benchmark/benchmark.h>

#include "pnest/baselines.hpp"
#include "pnest/estimators.hpp"
#include "pnest/harness.hpp"

namespace {

using namespace pnest;

BlockRealization make_block(Index n_c) {
  OfdmScenario s;
  s.n_c = n_c;
  s.noise = SnrDb{35.0};
  s.trials = 1;
  s.master_seed = 5;
  return generate_block(s, 0);
}

void BM_Objective(benchmark::State& state) {
  const BlockRealization block = make_block(state.range(0));
  const ProjectorB b = ProjectorB::build(block.symbols, block.channel.size());
  const ComplexVector u = ComplexVector::Ones(block.n_c());
  for (auto _ : state) benchmark::DoNotOptimize(objective(u, block.received_time, b));
}
BENCHMARK(BM_Objective)->Arg(512)->Arg(1024)->Arg(4096);

void BM_TqmStep(benchmark::State& state) {
  const BlockRealization block = make_block(state.range(0));
  const ProjectorB b = ProjectorB::build(block.symbols, block.channel.size());
  ComplexVector u = ComplexVector::Ones(block.n_c());
  for (auto _ : state) {
    u = tqm_step(u, block.received_time, b);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_TqmStep)->Arg(512)->Arg(1024)->Arg(4096);

void BM_Estimator(benchmark::State& state, const char* name) {
  const BlockRealization block = make_block(state.range(0));
  const EstimatorSpec spec = EstimatorSpec::parse(name);
  const SolverSettings settings;
  for (auto _ : state) {
    const EstimateResult result = run_estimator(spec, block, settings);
    benchmark::DoNotOptimize(result.u_star.data());
  }
  state.SetLabel(name);
}
BENCHMARK_CAPTURE(BM_Estimator, tqm, "tqm")->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, tqm_pct32, "tqm-pct:32")
    ->Arg(512)
    ->Arg(1024)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, tqm_optpct, "tqm-optpct")
    ->Arg(512)
    ->Arg(1024)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, altmm, "altmm")->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, altmm_pct32, "altmm-pct:32")
    ->Arg(512)
    ->Arg(1024)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
