#pragma once

// Multifractal detrended fluctuation analysis: profile, two-ended
// segmentation, polynomial detrending and the q-th order fluctuation surface.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfdfa/series.hpp"

namespace mfdfa {

struct ProfileSeries {
  std::vector<double> values;  // Y(1..N), stored 0-based
  std::size_t source_len = 0;
};

struct MfdfaConfig {
  int detrend_order = 2;
  std::vector<double> q_grid;
  std::vector<std::size_t> scale_grid;
  std::uint64_t seed = 0;
  /// Worker threads for the (q, s) grid. Output does not depend on it.
  unsigned jobs = 1;
  /// When true a degenerate scale aborts the computation instead of being
  /// excluded from the surface.
  bool strict = false;

  /// Throws std::invalid_argument if any invariant fails for a series of
  /// length n: s >= m + 2, s <= floor(n / 4), q grid sorted and holding 0 and 2.
  void validate(std::size_t n) const;
};

/// q_min, q_min + step, ..., q_max. Values within 1e-9 of an integer
/// multiple of `step` are snapped onto it, so 0 and 2 come out exact.
std::vector<double> make_q_grid(double q_min, double q_max, double step);
std::vector<double> default_q_grid();

/// About `count` integer scales, log-spaced on [max(s_min, m + 2), s_max],
/// deduplicated. s_max = 0 selects floor(n / 5).
std::vector<std::size_t> make_scale_grid(std::size_t n, int order, std::size_t s_min = 6,
                                         std::size_t s_max = 0, std::size_t count = 30);

/// Defaults (m = 2, q in [-10, 10] step 0.5, log-spaced scales) for length n.
MfdfaConfig default_config(std::size_t n);

/// A zero residual variance meets a non-positive q, so F_q(s) is undefined.
class DegenerateSegmentError : public std::runtime_error {
 public:
  DegenerateSegmentError(double q, std::size_t scale);
  double q() const noexcept { return q_; }
  std::size_t scale() const noexcept { return scale_; }

 private:
  double q_;
  std::size_t scale_;
};

ProfileSeries compute_profile(std::span<const double> x);
inline ProfileSeries compute_profile(const ReturnSeries& x) {
  return compute_profile(x.values());
}

/// Least-squares polynomial in the centred abscissa u = (i - center) / half_width,
/// i = 1..s. Coefficients are in the power basis of u.
struct PolynomialFit {
  std::vector<double> coefficients;
  double center = 0.0;
  double half_width = 1.0;
  double residual_variance = 0.0;

  double evaluate(double i) const;
};

/// Orthonormal polynomial basis on the points 1..s, built once per scale and
/// reused for every segment of that length.
class SegmentDetrender {
 public:
  SegmentDetrender(std::size_t length, int order);

  std::size_t length() const noexcept { return length_; }
  int order() const noexcept { return order_; }

  /// (1/s) * sum of squared residuals after removing the best polynomial.
  double residual_variance(std::span<const double> segment) const;
  PolynomialFit fit(std::span<const double> segment) const;

 private:
  std::size_t length_;
  int order_;
  double center_;
  double half_width_;
  std::vector<double> basis_;  // (order+1) columns of length s, column-major
  std::vector<double> r_;      // upper-triangular (order+1)^2, row-major
};

PolynomialFit detrend_segment(std::span<const double> segment, int order);

/// 2 N_s residual variances: N_s segments from the start of the profile, then
/// N_s from the end, in the order the two-ended scheme enumerates them.
std::vector<double> segment_variances(const ProfileSeries& profile, std::size_t scale,
                                      int order);

/// Generalised mean of the segment variances; the q = 0 case uses the
/// logarithmic (geometric) form. Throws DegenerateSegmentError when a zero
/// variance meets q <= 0 or every variance is zero. `scale` is context only.
double fluctuation_at(std::span<const double> variances, double q, std::size_t scale = 0);

struct FluctuationSurface {
  std::vector<double> q_grid;
  std::vector<std::size_t> scale_grid;
  /// values[iq][is] = F_q(s)
  std::vector<std::vector<double>> values;
  std::vector<std::size_t> segment_counts;
  /// Scales dropped because some segment had zero residual variance.
  std::vector<std::size_t> excluded_scales;
  std::vector<std::string> warnings;
};

FluctuationSurface fluctuation_surface(std::span<const double> x, const MfdfaConfig& cfg);
inline FluctuationSurface fluctuation_surface(const ReturnSeries& x, const MfdfaConfig& cfg) {
  return fluctuation_surface(x.values(), cfg);
}

/// Columns `s`, then `F_q=<q>` per q; values in 10-significant-digit
/// scientific notation.
void write_surface_tsv(std::ostream& out, const FluctuationSurface& surface);

/// Compact textual form of a q value used in column labels ("-9.5", "0", "2").
std::string format_q(double q);

}  // namespace mfdfa
