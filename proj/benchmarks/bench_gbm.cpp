#include <benchmark/benchmark.h>

#include "mfdfa/gbm.hpp"

using namespace mfdfa;

static void BM_FitGbm(benchmark::State& state) {
  HurstSpectrum s;
  s.q_grid = default_q_grid();
  for (double q : s.q_grid) s.h.push_back(gbm_h(q, GbmParams(0.575, 0.904)));
  s.h_err.assign(s.q_grid.size(), 0.01);
  s.r2.assign(s.q_grid.size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gbm(s));
}
BENCHMARK(BM_FitGbm);

static void BM_GbmSeries(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gbm_series(GbmParams(0.6, 0.9), static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_GbmSeries)->Arg(14)->Arg(20);
