#include "mfdfa/synth.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "mfdfa/fft.hpp"
#include "mfdfa/random.hpp"

namespace mfdfa {

namespace {

// White Gaussian noise filtered by sqrt(power(f)), f = k / n in [0, 1/2].
std::vector<double> fourier_filtered(std::size_t n, std::uint64_t seed,
                                     const std::function<double(double)>& power) {
  if (n < 2) throw std::invalid_argument("filtered noise needs n >= 2");
  auto spectrum = dft_real(white_noise(n, seed));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kk = std::min(k, n - k);
    const double f = static_cast<double>(kk) / static_cast<double>(n);
    spectrum[k] *= std::sqrt(power(f));
  }
  const auto back = inverse_dft(spectrum);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = back[i].real();
  return out;
}

}  // namespace

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return x;
}

std::vector<double> symmetric_pareto(std::size_t n, double tail_index, std::uint64_t seed) {
  if (!(tail_index > 0.0)) throw std::invalid_argument("tail index must be positive");
  RngStream rng(seed);
  std::vector<double> x(n);
  for (double& v : x) {
    const double magnitude = std::pow(rng.uniform_pos(), -1.0 / tail_index);
    v = (rng.next_u64() >> 63) ? -magnitude : magnitude;
  }
  return x;
}

std::vector<double> exponential_correlated_noise(std::size_t n, double phi, std::uint64_t seed) {
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("|phi| must be < 1");
  return fourier_filtered(n, seed, [phi](double f) {
    return (1.0 - phi * phi) /
           (1.0 - 2.0 * phi * std::cos(2.0 * std::numbers::pi * f) + phi * phi);
  });
}

std::vector<double> power_law_correlated_noise(std::size_t n, double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  const double beta = 1.0 - gamma;
  const double f_min = 1.0 / static_cast<double>(n);
  return fourier_filtered(n, seed, [beta, f_min](double f) {
    return std::pow(std::max(f, f_min), -beta);
  });
}

}  // namespace mfdfa
