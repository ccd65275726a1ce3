#include <benchmark/benchmark.h>

#include "mfdfa/fft.hpp"
#include "mfdfa/random.hpp"
#include "mfdfa/surrogate.hpp"
#include "mfdfa/synth.hpp"

using namespace mfdfa;

// Powers of two take the radix-2 path; other lengths go through Bluestein.
static void BM_DftReal(benchmark::State& state) {
  const auto x = white_noise(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(dft_real(x));
}
BENCHMARK(BM_DftReal)->Arg(1 << 14)->Arg((1 << 14) + 1)->Arg(99991);

static void BM_Aaft(benchmark::State& state) {
  const auto x = ReturnSeries::from_values(symmetric_pareto(static_cast<std::size_t>(state.range(0)), 2.0, 4));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(seed++);
    benchmark::DoNotOptimize(aaft(x, rng));
  }
}
BENCHMARK(BM_Aaft)->Arg(4096)->Arg(16384);
