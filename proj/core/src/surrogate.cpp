#include "mfdfa/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "mfdfa/fft.hpp"
#include "mfdfa/parallel.hpp"

namespace mfdfa {

std::vector<std::size_t> stable_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return x[l] < x[r]; });
  std::vector<std::size_t> rank(x.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
  return rank;
}

ReturnSeries shuffle(const ReturnSeries& x, RngStream& rng) {
  if (x.size() < 2) throw std::invalid_argument("shuffle: need at least 2 values");
  std::vector<double> v(x.values().begin(), x.values().end());
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(v[i], v[j]);
  }
  return x.with_values(std::move(v));
}

ReturnSeries aaft(const ReturnSeries& x, RngStream& rng) {
  const std::size_t n = x.size();
  if (n < 8) throw std::invalid_argument("aaft: need at least 8 values");
  const auto values = x.values();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  // Gaussian noise placed in the rank order of the data.
  std::vector<double> gauss(n);
  for (double& g : gauss) g = rng.normal();
  std::sort(gauss.begin(), gauss.end());
  const auto rank_x = stable_ranks(values);
  std::vector<double> gaussianised(n);
  for (std::size_t i = 0; i < n; ++i) gaussianised[i] = gauss[rank_x[i]];

  // Phase randomisation with Hermitian symmetry.
  auto spectrum = dft_real(gaussianised);
  for (std::size_t k = 1; 2 * k < n; ++k) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    spectrum[k] = std::polar(std::abs(spectrum[k]), phase);
    spectrum[n - k] = std::conj(spectrum[k]);
  }
  const auto inverse = inverse_dft(spectrum);
  std::vector<double> randomized(n);
  for (std::size_t i = 0; i < n; ++i) randomized[i] = inverse[i].real();

  const auto rank_y = stable_ranks(randomized);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sorted[rank_y[i]];
  return x.with_values(std::move(out));
}

std::string_view to_string(SurrogateMethod m) {
  return m == SurrogateMethod::shuffle ? "shuffle" : "aaft";
}

SurrogateMethod parse_surrogate_method(std::string_view s) {
  if (s == "shuffle") return SurrogateMethod::shuffle;
  if (s == "aaft") return SurrogateMethod::aaft;
  throw std::invalid_argument("unknown surrogate method '" + std::string(s) + "'");
}

ReturnSeries make_surrogate(const ReturnSeries& x, SurrogateMethod method, std::uint64_t seed) {
  RngStream rng(seed);
  return method == SurrogateMethod::shuffle ? shuffle(x, rng) : aaft(x, rng);
}

EnsembleResult run_ensemble(const ReturnSeries& x, const EnsembleSpec& spec,
                            const MfdfaConfig& cfg, const FitRange& range) {
  if (spec.n_realizations < 1) throw std::invalid_argument("ensemble needs >= 1 realisation");
  const std::size_t n = spec.n_realizations;

  struct Outcome {
    std::optional<FluctuationSurface> surface;
    std::optional<HurstSpectrum> hurst;
    std::string error;
  };
  std::vector<Outcome> outcomes(n);
  parallel_for(n, spec.jobs, [&](std::size_t i) {
    const std::uint64_t seed = spec.base_seed + i;
    try {
      const auto series = make_surrogate(x, spec.method, seed);
      auto surface = fluctuation_surface(series, cfg);
      auto hurst = hurst_spectrum(surface, range);
      outcomes[i].surface = std::move(surface);
      outcomes[i].hurst = std::move(hurst);
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });

  EnsembleResult result;
  std::vector<const Outcome*> ok;
  for (std::size_t i = 0; i < n; ++i) {
    result.seeds.push_back(spec.base_seed + i);
    if (outcomes[i].hurst)
      ok.push_back(&outcomes[i]);
    else
      result.failures.push_back("seed " + std::to_string(spec.base_seed + i) + ": " +
                                outcomes[i].error);
  }
  if (ok.empty())
    throw std::runtime_error("every " + std::string(to_string(spec.method)) +
                             " realisation failed: " + result.failures.front());

  const auto& first = *ok.front()->hurst;
  const std::size_t nq = first.q_grid.size();
  const double count = static_cast<double>(ok.size());
  HurstSpectrum& mean_h = result.hurst;
  mean_h.q_grid = first.q_grid;
  mean_h.fit_range = first.fit_range;
  mean_h.scales_used = first.scales_used;
  mean_h.excluded_realizations = n - ok.size();
  mean_h.h.assign(nq, 0.0);
  mean_h.h_err.assign(nq, 0.0);
  mean_h.r2.assign(nq, 0.0);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    double sum = 0.0, r2 = 0.0;
    for (const auto* o : ok) {
      sum += o->hurst->h[iq];
      r2 += o->hurst->r2[iq];
    }
    const double mu = sum / count;
    double ss = 0.0;
    for (const auto* o : ok) ss += (o->hurst->h[iq] - mu) * (o->hurst->h[iq] - mu);
    mean_h.h[iq] = mu;
    mean_h.r2[iq] = r2 / count;
    mean_h.h_err[iq] = ok.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
  }

  // Geometric-mean surface on the scales every realisation kept.
  std::vector<std::size_t> common = ok.front()->surface->scale_grid;
  for (const auto* o : ok) {
    std::vector<std::size_t> next;
    std::set_intersection(common.begin(), common.end(), o->surface->scale_grid.begin(),
                          o->surface->scale_grid.end(), std::back_inserter(next));
    common = std::move(next);
  }
  FluctuationSurface& surf = result.mean_surface;
  surf.q_grid = first.q_grid;
  surf.scale_grid = common;
  surf.values.assign(nq, std::vector<double>(common.size(), 0.0));
  surf.segment_counts.resize(common.size());
  for (std::size_t c = 0; c < common.size(); ++c) {
    for (const auto* o : ok) {
      const auto& sg = o->surface->scale_grid;
      const auto is = static_cast<std::size_t>(
          std::lower_bound(sg.begin(), sg.end(), common[c]) - sg.begin());
      surf.segment_counts[c] = o->surface->segment_counts[is];
      for (std::size_t iq = 0; iq < nq; ++iq)
        surf.values[iq][c] += std::log(o->surface->values[iq][is]);
    }
    for (std::size_t iq = 0; iq < nq; ++iq)
      surf.values[iq][c] = std::exp(surf.values[iq][c] / count);
  }
  return result;
}

HurstSpectrum ensemble_hurst(const ReturnSeries& x, const EnsembleSpec& spec,
                             const MfdfaConfig& cfg, const FitRange& range) {
  return run_ensemble(x, spec, cfg, range).hurst;
}

}  // namespace mfdfa
