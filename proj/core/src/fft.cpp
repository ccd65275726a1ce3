#include "mfdfa/fft.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace mfdfa {

namespace {

// In-place radix-2 transform; sign = -1 forward, +1 backward (unscaled).
void radix2(std::vector<Complex>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<Complex> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k)
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                                     static_cast<double>(n));
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Complex u = a[start + k];
        const Complex v = a[start + k + len / 2] * twiddle[k * stride];
        a[start + k] = u + v;
        a[start + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<Complex> bluestein(std::span<const Complex> x, int sign) {
  const std::size_t n = x.size();
  const std::size_t m = std::bit_ceil(2 * n - 1);
  // chirp[k] = exp(sign * i pi k^2 / n); k^2 is reduced mod 2n to keep the
  // argument small for long inputs.
  std::vector<Complex> chirp(n);
  const auto two_n = static_cast<std::uint64_t>(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t kk = (static_cast<std::uint64_t>(k) * k) % two_n;
    chirp[k] = std::polar(1.0, sign * std::numbers::pi * static_cast<double>(kk) /
                                   static_cast<double>(n));
  }
  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  radix2(a, -1);
  radix2(b, -1);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  radix2(a, +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
  return out;
}

std::vector<Complex> transform(std::span<const Complex> x, int sign) {
  if (x.empty()) return {};
  if (std::has_single_bit(x.size())) {
    std::vector<Complex> a(x.begin(), x.end());
    radix2(a, sign);
    return a;
  }
  return bluestein(x, sign);
}

}  // namespace

std::vector<Complex> dft(std::span<const Complex> x) { return transform(x, -1); }

std::vector<Complex> inverse_dft(std::span<const Complex> x) {
  auto out = transform(x, +1);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (auto& v : out) v *= inv_n;
  return out;
}

std::vector<Complex> dft_real(std::span<const double> x) {
  std::vector<Complex> c(x.begin(), x.end());
  return dft(c);
}

}  // namespace mfdfa
