#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "mfdfa/fft.hpp"
#include "mfdfa/gbm.hpp"
#include "mfdfa/random.hpp"
#include "mfdfa/stats.hpp"
#include "mfdfa/surrogate.hpp"
#include "mfdfa/synth.hpp"
#include "oracles.hpp"

using namespace mfdfa;

namespace {

std::vector<double> sorted(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

double width(const HurstSpectrum& h) {
  return singularity_spectrum(tau_from_h(h)).width_at_zero.width;
}

}  // namespace

TEST_SUITE("random") {
  TEST_CASE("engine reference output") {
    RngStream rng(5489);  // the standard's default seed
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next_u64();
    CHECK(v == 9981545732273789042ULL);
  }

  TEST_CASE("derived variates") {
    RngStream rng(1);
    double sum = 0, sum2 = 0, umin = 1, umax = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      sum += z;
      sum2 += z * z;
      const double u = rng.uniform();
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      const double p = rng.uniform_pos();
      CHECK_MESSAGE((p > 0 && p <= 1), "uniform_pos out of range");
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(umin >= 0.0);
    CHECK(umax < 1.0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  }
}

TEST_SUITE("fft") {
  TEST_CASE("matches the direct transform") {
    RngStream rng(3);
    for (std::size_t n : {1, 2, 3, 5, 8, 12, 17, 64, 100, 127}) {
      std::vector<Complex> x(n);
      for (auto& v : x) v = {rng.normal(), rng.normal()};
      const auto got = dft(x), want = oracle::dft(x);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-9 * n);
      const auto inv = inverse_dft(x), want_inv = oracle::dft(x, true);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(inv[k] - want_inv[k]) <= 1e-9);
    }
  }

  TEST_CASE("roundtrip on long and awkward lengths") {
    RngStream rng(4);
    for (std::size_t n : {std::size_t{1} << 20, (std::size_t{1} << 20) - 3, std::size_t{99991}}) {
      std::vector<double> x(n);
      for (double& v : x) v = rng.normal();
      const auto back = inverse_dft(dft_real(x));
      double err = 0, norm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        err = std::max(err, std::abs(back[i] - Complex(x[i], 0)));
        norm = std::max(norm, std::abs(x[i]));
      }
      CHECK(err <= 1e-9 * norm);
    }
  }
}

TEST_SUITE("surrogate") {
  TEST_CASE("shuffle is a reproducible permutation") {
    const auto x = ReturnSeries::from_values({1, 2, 3, 4, 5});
    RngStream a(42), b(42);
    const auto s1 = shuffle(x, a), s2 = shuffle(x, b);
    CHECK(std::vector<double>(s1.values().begin(), s1.values().end()) ==
          std::vector<double>(s2.values().begin(), s2.values().end()));
    CHECK(sorted(s1.values()) == sorted(x.values()));
    // Fisher-Yates keeps every permutation reachable: with many seeds all 120 appear.
    std::set<std::vector<double>> seen;
    for (std::uint64_t seed = 0; seed < 3000; ++seed) {
      RngStream r(seed);
      const auto s = shuffle(x, r);
      seen.insert({s.values().begin(), s.values().end()});
    }
    CHECK(seen.size() == 120);
  }

  TEST_CASE("stable ranks break ties by index") {
    CHECK(stable_ranks(std::vector<double>{3, 1, 3, 2, 1}) ==
          std::vector<std::size_t>{3, 0, 4, 2, 1});
  }

  TEST_CASE("aaft preserves the values bit for bit") {
    for (std::size_t n : {8, 9, 1000, 4097}) {
      const auto x = ReturnSeries::from_values(symmetric_pareto(n, 2.0, n));
      RngStream rng(7);
      CHECK(sorted(aaft(x, rng).values()) == sorted(x.values()));
    }
    const auto tied = ReturnSeries::from_values({0, 0, 0, 1, 1, 2, 0, 0, 3, 3});
    RngStream rng(1);
    CHECK(sorted(aaft(tied, rng).values()) == sorted(tied.values()));
    CHECK_THROWS(aaft(ReturnSeries::from_values({1, 2, 3}), rng));
  }

  TEST_CASE("aaft keeps linear correlations") {
    const auto x = normalize(ReturnSeries::from_values(exponential_correlated_noise(8192, 0.7, 2)));
    RngStream rng(3);
    const auto s = normalize(aaft(x, rng));
    const auto ca = autocorrelation(x, 20), cb = autocorrelation(s, 20);
    for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(ca.c[i] - cb.c[i]) < 0.1);
  }

  TEST_CASE("aaft of white noise stays white") {
    const std::size_t n = 10000;
    const auto x = ReturnSeries::from_values(white_noise(n, 12));
    RngStream rng(13);
    const auto c = autocorrelation(normalize(aaft(x, rng)), 20);
    std::size_t inside = 0;
    for (double v : c.c) inside += std::abs(v) < 3 / std::sqrt(double(n));
    CHECK(inside == 20);
  }

  TEST_CASE("make_surrogate dispatch") {
    const auto x = ReturnSeries::from_values(white_noise(64, 1));
    RngStream r(9);
    const auto direct = shuffle(x, r);
    const auto via = make_surrogate(x, SurrogateMethod::shuffle, 9);
    CHECK(sorted(via.values()) == sorted(x.values()));
    CHECK(std::equal(direct.values().begin(), direct.values().end(), via.values().begin()));
    CHECK(parse_surrogate_method("aaft") == SurrogateMethod::aaft);
    CHECK(to_string(SurrogateMethod::shuffle) == "shuffle");
    CHECK_THROWS(parse_surrogate_method("iaaft"));
  }

  TEST_CASE("single-realisation ensemble equals one run") {
    const auto x = ReturnSeries::from_values(white_noise(3000, 5));
    const auto cfg = default_config(x.size());
    const auto range = default_fit_range(x.size());
    EnsembleSpec spec;
    spec.n_realizations = 1;
    spec.base_seed = 77;
    const auto ens = run_ensemble(x, spec, cfg, range);
    const auto one = hurst_spectrum(fluctuation_surface(make_surrogate(x, spec.method, 77), cfg), range);
    CHECK(ens.hurst.h == one.h);
    CHECK(ens.seeds == std::vector<std::uint64_t>{77});
  }

  TEST_CASE("ensemble is independent of the thread count") {
    const auto x = ReturnSeries::from_values(symmetric_pareto(3000, 2, 5));
    const auto cfg = default_config(x.size());
    EnsembleSpec spec;
    spec.n_realizations = 4;
    spec.method = SurrogateMethod::aaft;
    const auto a = run_ensemble(x, spec, cfg, default_fit_range(x.size()));
    spec.jobs = 4;
    const auto b = run_ensemble(x, spec, cfg, default_fit_range(x.size()));
    CHECK(a.hurst.h == b.hurst.h);
    CHECK(a.hurst.h_err == b.hurst.h_err);
    CHECK(a.mean_surface.values == b.mean_surface.values);
    CHECK(a.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});
  }

  TEST_CASE("ensemble throws when every realisation fails") {
    // Mostly zeros: every shuffle leaves whole segments on linear stretches
    // of the profile, which strict mode refuses.
    std::vector<double> x(2000, 0.0);
    for (std::size_t i = 0; i < 2000; i += 50) x[i] = 1.0;
    auto cfg = default_config(x.size());
    cfg.strict = true;
    EnsembleSpec spec;
    spec.n_realizations = 3;
    CHECK_THROWS(run_ensemble(ReturnSeries::from_values(x), spec, cfg, default_fit_range(x.size())));
  }

  TEST_CASE("shuffling removes the cascade's correlations") {
    const auto x = ReturnSeries::from_values(gbm_series(GbmParams(0.6, 0.9), 14));
    EnsembleSpec spec;
    const auto h = ensemble_hurst(x, spec, default_config(x.size()), default_fit_range(x.size()));
    CHECK(std::abs(h.at(2.0) - 0.5) <= 0.05);
    const auto [lo, hi] = std::minmax_element(h.h.begin(), h.h.end());
    MESSAGE("shuffled cascade h spread over q: " << *hi - *lo);
    CHECK(*hi - *lo < 0.1);
  }

  TEST_CASE("shuffling keeps distribution-driven multifractality") {
    const std::size_t n = 16384;
    const auto x = ReturnSeries::from_values(symmetric_pareto(n, 1.5, 31));
    const auto cfg = default_config(n);
    const auto range = default_fit_range(n);
    const double original = width(hurst_spectrum(fluctuation_surface(x, cfg), range));
    EnsembleSpec spec;
    spec.base_seed = 31;
    const double shuffled = width(ensemble_hurst(x, spec, cfg, range));
    CHECK(shuffled >= 0.7 * original);
  }
}
