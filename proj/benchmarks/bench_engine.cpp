#include <benchmark/benchmark.h>

#include "mfdfa/engine.hpp"
#include "mfdfa/surrogate.hpp"
#include "mfdfa/synth.hpp"

using namespace mfdfa;

static void BM_FluctuationSurface(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = white_noise(n, 1);
  const auto cfg = default_config(n);
  for (auto _ : state) benchmark::DoNotOptimize(fluctuation_surface(x, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FluctuationSurface)->RangeMultiplier(4)->Range(1 << 12, 1 << 16)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_ShuffleEnsemble(benchmark::State& state) {
  const auto x = ReturnSeries::from_values(white_noise(8192, 2));
  const auto cfg = default_config(x.size());
  EnsembleSpec spec;
  spec.jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_hurst(x, spec, cfg, default_fit_range(x.size())));
}
BENCHMARK(BM_ShuffleEnsemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
