// Serial vs OpenMP timings for the two parallel kernels: multistart restarts
// and the SEUT grid scan.

#include <benchmark/benchmark.h>

#include "qdu/baselines.hpp"
#include "qdu/choice.hpp"
#include "qdu/machina.hpp"

namespace {

qdu::Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? qdu::Execution::Serial : qdu::Execution::Parallel;
}

void BM_MarginalFit(benchmark::State& state) {
  qdu::ChoiceFitOptions o;
  o.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(qdu::fit_marginals(0.68, 0.69, 1, o).residual);
}
BENCHMARK(BM_MarginalFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MachinaPatternSearch(benchmark::State& state) {
  qdu::MachinaSearchOptions o;
  o.execution = mode(state);
  const auto exp = qdu::machina_urn();
  const auto pattern = qdu::PreferencePattern::parse("f1>f2,f4>f3");
  for (auto _ : state)
    benchmark::DoNotOptimize(qdu::machina_pattern_search(exp, pattern, qdu::Mechanism::Rotated, 1, o).search.value);
}
BENCHMARK(BM_MachinaPatternSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SeutGridMachina(benchmark::State& state) {
  const auto pattern = qdu::PreferencePattern::parse("f1>f2,f4>f3");
  for (auto _ : state) benchmark::DoNotOptimize(qdu::machina_seut_infeasibility(pattern, 401, mode(state)).feasible);
}
BENCHMARK(BM_SeutGridMachina)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
