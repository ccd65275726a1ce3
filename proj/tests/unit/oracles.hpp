#pragma once

// Brute-force reference implementations. They follow the textbook formulas
// literally (raw normal equations, O(N^2) transforms) and share no code with
// the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

// Least-squares polynomial of order m through (i, y_i), i = 1..s, solved from
// the raw normal equations in long double with partial pivoting. Returns the
// mean squared residual.
inline double detrend_variance(const std::vector<double>& y, int m) {
  const std::size_t s = y.size(), k = static_cast<std::size_t>(m) + 1;
  // Scale the abscissa to [0, 1] so the raw system stays solvable in long double.
  std::vector<long double> t(s);
  for (std::size_t i = 0; i < s; ++i) t[i] = static_cast<long double>(i + 1) / s;
  std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0.0L));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t i = 0; i < s; ++i) a[r][c] += std::pow(t[i], static_cast<int>(r + c));
    for (std::size_t i = 0; i < s; ++i) a[r][k] += std::pow(t[i], static_cast<int>(r)) * y[i];
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const long double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  long double ssr = 0;
  for (std::size_t i = 0; i < s; ++i) {
    long double fit = 0;
    for (std::size_t c = 0; c < k; ++c) fit += a[c][k] / a[c][c] * std::pow(t[i], static_cast<int>(c));
    ssr += (y[i] - fit) * (y[i] - fit);
  }
  return static_cast<double>(ssr / s);
}

inline std::vector<double> profile(const std::vector<double>& x) {
  double mean = 0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> y;
  double acc = 0;
  for (double v : x) y.push_back(acc += v - mean);
  return y;
}

// Segment variances by explicit 1-based index arithmetic: forward segments
// start at (p-1)s + 1, backward ones at N - (p - N_s) s + 1 for
// p = N_s+1..2N_s.
inline std::vector<double> segment_variances(const std::vector<double>& y, std::size_t s, int m) {
  const std::size_t n = y.size(), ns = n / s;
  std::vector<double> out;
  for (std::size_t p = 1; p <= 2 * ns; ++p) {
    const std::size_t start = p <= ns ? (p - 1) * s + 1 : n - (p - ns) * s + 1;
    std::vector<double> seg;
    for (std::size_t i = 1; i <= s; ++i) seg.push_back(y[start + i - 2]);
    out.push_back(detrend_variance(seg, m));
  }
  return out;
}

inline double fq(const std::vector<double>& var, double q) {
  const double n = static_cast<double>(var.size());
  if (q == 0.0) {
    double acc = 0;
    for (double v : var) acc += std::log(v);
    return std::exp(acc / (2.0 * n));
  }
  double acc = 0;
  for (double v : var) acc += std::pow(v, q / 2.0);
  return std::pow(acc / n, 1.0 / q);
}

inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x,
                                             bool inverse = false) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const long double ang =
          sign * 2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * j) % n) / n;
      acc += std::complex<long double>(x[j].real(), x[j].imag()) *
             std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    if (inverse) acc /= static_cast<long double>(n);
    out[k] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  return out;
}

// Raw form ln(a^q + b^q), no log-sum-exp tricks.
inline double gbm_h_raw(double q, double a, double b) {
  return 1.0 / q - std::log(std::pow(a, q) + std::pow(b, q)) / (q * std::log(2.0));
}
inline double gbm_tau_raw(double q, double a, double b) {
  return -std::log(std::pow(a, q) + std::pow(b, q)) / std::log(2.0);
}
// Analytic derivative of gbm_tau_raw.
inline double gbm_alpha_raw(double q, double a, double b) {
  const double aq = std::pow(a, q), bq = std::pow(b, q);
  return -(aq * std::log(a) + bq * std::log(b)) / ((aq + bq) * std::log(2.0));
}

}  // namespace oracle
