#pragma once

// Synthetic series with known scaling, used as test oracles and exposed by
// the `synth` subcommand.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mfdfa {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed);

/// sign * U^{-1/tail_index}: |x| >= 1 with P(|x| > v) = v^{-tail_index}.
std::vector<double> symmetric_pareto(std::size_t n, double tail_index, std::uint64_t seed);

/// Gaussian noise shaped in Fourier space so its circular autocorrelation is
/// phi^|s| (the spectrum of an AR(1) process). |phi| < 1.
std::vector<double> exponential_correlated_noise(std::size_t n, double phi, std::uint64_t seed);

/// Gaussian noise with power spectrum ~ f^{-(1 - gamma)}, i.e. C(s) ~ s^{-gamma}
/// and Hurst exponent 1 - gamma / 2. 0 < gamma < 1.
std::vector<double> power_law_correlated_noise(std::size_t n, double gamma, std::uint64_t seed);

}  // namespace mfdfa
