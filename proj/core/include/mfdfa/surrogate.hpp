#pragma once

// Shuffled and amplitude-adjusted Fourier transform (AAFT) surrogates, and
// ensemble-averaged Hurst spectra over many realisations.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfdfa/engine.hpp"
#include "mfdfa/random.hpp"
#include "mfdfa/series.hpp"
#include "mfdfa/spectra.hpp"

namespace mfdfa {

/// Fisher-Yates permutation of the values; timestamps stay in place.
ReturnSeries shuffle(const ReturnSeries& x, RngStream& rng);

/// Single-pass AAFT: Gaussianise by rank, randomise Fourier phases (DC and,
/// for even length, Nyquist left untouched), then map the original values
/// back onto the ranks of the result. The output is a permutation of x.
ReturnSeries aaft(const ReturnSeries& x, RngStream& rng);

/// rank[i] = position of x[i] in ascending order; equal values are ordered
/// by index.
std::vector<std::size_t> stable_ranks(std::span<const double> x);

enum class SurrogateMethod { shuffle, aaft };
std::string_view to_string(SurrogateMethod m);
SurrogateMethod parse_surrogate_method(std::string_view s);

ReturnSeries make_surrogate(const ReturnSeries& x, SurrogateMethod method, std::uint64_t seed);

struct EnsembleSpec {
  std::size_t n_realizations = 10;
  SurrogateMethod method = SurrogateMethod::shuffle;
  std::uint64_t base_seed = 0;
  /// Realisations processed concurrently; the result does not depend on it.
  unsigned jobs = 1;
};

struct EnsembleResult {
  /// Per-q mean of h; h_err = sample standard deviation / sqrt(n).
  HurstSpectrum hurst;
  /// exp of the mean ln F_q(s) over realisations, on the scales all share.
  FluctuationSurface mean_surface;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> failures;
};

/// Realisation i uses seed base_seed + i. Failed realisations are excluded
/// and counted; throws if none succeed.
EnsembleResult run_ensemble(const ReturnSeries& x, const EnsembleSpec& spec,
                            const MfdfaConfig& cfg, const FitRange& range);

HurstSpectrum ensemble_hurst(const ReturnSeries& x, const EnsembleSpec& spec,
                             const MfdfaConfig& cfg, const FitRange& range);

}  // namespace mfdfa
