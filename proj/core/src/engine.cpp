#include "mfdfa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mfdfa/parallel.hpp"

namespace mfdfa {

namespace {

// Residual variances at or below (kZeroVarianceRel * max|Y|)^2 are rounding
// noise from an exactly polynomial stretch of the profile.
constexpr double kZeroVarianceRel = 1e-10;

bool contains(const std::vector<double>& grid, double v) {
  return std::find(grid.begin(), grid.end(), v) != grid.end();
}

}  // namespace

void MfdfaConfig::validate(std::size_t n) const {
  if (detrend_order < 0) throw std::invalid_argument("detrend order must be >= 0");
  if (q_grid.empty()) throw std::invalid_argument("q grid is empty");
  if (!std::is_sorted(q_grid.begin(), q_grid.end()) ||
      std::adjacent_find(q_grid.begin(), q_grid.end()) != q_grid.end())
    throw std::invalid_argument("q grid must be strictly increasing");
  if (!contains(q_grid, 0.0) || !contains(q_grid, 2.0))
    throw std::invalid_argument("q grid must contain 0 and 2");
  if (scale_grid.empty()) throw std::invalid_argument("scale grid is empty");
  if (!std::is_sorted(scale_grid.begin(), scale_grid.end()) ||
      std::adjacent_find(scale_grid.begin(), scale_grid.end()) != scale_grid.end())
    throw std::invalid_argument("scale grid must be strictly increasing");
  const auto min_scale = static_cast<std::size_t>(detrend_order) + 2;
  if (scale_grid.front() < min_scale)
    throw std::invalid_argument("scale " + std::to_string(scale_grid.front()) +
                                " is below order + 2 = " + std::to_string(min_scale));
  if (scale_grid.back() > n / 4)
    throw std::invalid_argument("scale " + std::to_string(scale_grid.back()) +
                                " exceeds N/4 = " + std::to_string(n / 4));
}

std::vector<double> make_q_grid(double q_min, double q_max, double step) {
  if (!(step > 0.0) || !(q_max >= q_min))
    throw std::invalid_argument("q grid needs q_max >= q_min and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((q_max - q_min) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    double q = q_min + static_cast<double>(i) * step;
    const double snapped = std::round(q / step) * step;
    if (std::abs(q - snapped) < 1e-9) q = snapped;
    if (std::abs(q) < 1e-9) q = 0.0;
    if (std::abs(q - std::round(q)) < 1e-9) q = std::round(q);
    grid[i] = q;
  }
  return grid;
}

std::vector<double> default_q_grid() { return make_q_grid(-10.0, 10.0, 0.5); }

std::vector<std::size_t> make_scale_grid(std::size_t n, int order, std::size_t s_min,
                                         std::size_t s_max, std::size_t count) {
  const auto floor_scale = static_cast<std::size_t>(std::max(order, 0)) + 2;
  s_min = std::max(s_min, floor_scale);
  if (s_max == 0) s_max = n / 5;
  s_max = std::min(s_max, n / 4);
  if (s_max < s_min)
    throw std::invalid_argument("series of length " + std::to_string(n) +
                                " is too short for the requested scale range");
  if (count < 2 || s_max == s_min) return {s_min};
  std::vector<std::size_t> grid;
  const double lo = std::log(static_cast<double>(s_min));
  const double hi = std::log(static_cast<double>(s_max));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    auto s = static_cast<std::size_t>(std::llround(std::exp(t)));
    s = std::clamp(s, s_min, s_max);
    if (grid.empty() || grid.back() != s) grid.push_back(s);
  }
  return grid;
}

MfdfaConfig default_config(std::size_t n) {
  MfdfaConfig cfg;
  cfg.q_grid = default_q_grid();
  cfg.scale_grid = make_scale_grid(n, cfg.detrend_order);
  return cfg;
}

DegenerateSegmentError::DegenerateSegmentError(double q, std::size_t scale)
    : std::runtime_error("degenerate segment: zero residual variance at scale " +
                         std::to_string(scale) + " with q = " + format_q(q)),
      q_(q),
      scale_(scale) {}

ProfileSeries compute_profile(std::span<const double> x) {
  if (x.size() < 4) throw std::invalid_argument("profile: need at least 4 values");
  const double mu = mean(x);
  ProfileSeries profile;
  profile.source_len = x.size();
  profile.values.resize(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] - mu;
    profile.values[i] = acc;
  }
  return profile;
}

double PolynomialFit::evaluate(double i) const {
  const double u = (i - center) / half_width;
  double acc = 0.0;
  for (auto c = coefficients.rbegin(); c != coefficients.rend(); ++c) acc = acc * u + *c;
  return acc;
}

SegmentDetrender::SegmentDetrender(std::size_t length, int order)
    : length_(length), order_(order) {
  if (order < 0) throw std::invalid_argument("detrend order must be >= 0");
  const auto cols = static_cast<std::size_t>(order) + 1;
  if (length < cols + 1)
    throw std::invalid_argument("segment of length " + std::to_string(length) +
                                " is too short for order " + std::to_string(order));
  center_ = 0.5 * static_cast<double>(length + 1);
  half_width_ = 0.5 * static_cast<double>(length - 1);
  basis_.assign(cols * length, 0.0);
  r_.assign(cols * cols, 0.0);

  // Modified Gram-Schmidt on the monomials of u, with one re-orthogonalisation
  // pass; V = Q R with Q orthonormal.
  std::vector<double> v(length);
  for (std::size_t k = 0; k < cols; ++k) {
    for (std::size_t i = 0; i < length; ++i) {
      const double u = (static_cast<double>(i + 1) - center_) / half_width_;
      v[i] = std::pow(u, static_cast<double>(k));
    }
    const double norm0 = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < k; ++j) {
        const double* qj = &basis_[j * length];
        double dot = 0.0;
        for (std::size_t i = 0; i < length; ++i) dot += qj[i] * v[i];
        r_[j * cols + k] += dot;
        for (std::size_t i = 0; i < length; ++i) v[i] -= dot * qj[i];
      }
    }
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (!(norm > 1e-12 * norm0))
      throw std::runtime_error("degenerate normal system in polynomial detrending");
    r_[k * cols + k] = norm;
    for (std::size_t i = 0; i < length; ++i) basis_[k * length + i] = v[i] / norm;
  }
}

double SegmentDetrender::residual_variance(std::span<const double> segment) const {
  if (segment.size() != length_)
    throw std::invalid_argument("segment length does not match detrender");
  const auto cols = static_cast<std::size_t>(order_) + 1;
  double proj[16];
  std::vector<double> proj_heap;
  double* beta = proj;
  if (cols > 16) {
    proj_heap.resize(cols);
    beta = proj_heap.data();
  }
  for (std::size_t k = 0; k < cols; ++k) {
    const double* qk = &basis_[k * length_];
    double dot = 0.0;
    for (std::size_t i = 0; i < length_; ++i) dot += qk[i] * segment[i];
    beta[k] = dot;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < length_; ++i) {
    double fitted = 0.0;
    for (std::size_t k = 0; k < cols; ++k) fitted += beta[k] * basis_[k * length_ + i];
    const double r = segment[i] - fitted;
    ss += r * r;
  }
  return ss / static_cast<double>(length_);
}

PolynomialFit SegmentDetrender::fit(std::span<const double> segment) const {
  if (segment.size() != length_)
    throw std::invalid_argument("segment length does not match detrender");
  const auto cols = static_cast<std::size_t>(order_) + 1;
  std::vector<double> beta(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    const double* qk = &basis_[k * length_];
    beta[k] = std::inner_product(qk, qk + length_, segment.begin(), 0.0);
  }
  // Back-substitute R c = Q^T y.
  PolynomialFit fit;
  fit.center = center_;
  fit.half_width = half_width_;
  fit.coefficients.assign(cols, 0.0);
  for (std::size_t k = cols; k-- > 0;) {
    double acc = beta[k];
    for (std::size_t j = k + 1; j < cols; ++j) acc -= r_[k * cols + j] * fit.coefficients[j];
    fit.coefficients[k] = acc / r_[k * cols + k];
  }
  fit.residual_variance = residual_variance(segment);
  return fit;
}

PolynomialFit detrend_segment(std::span<const double> segment, int order) {
  if (order < 0) throw std::invalid_argument("detrend order must be >= 0");
  if (segment.size() < static_cast<std::size_t>(order) + 2)
    throw std::invalid_argument("segment length must be at least order + 2");
  return SegmentDetrender(segment.size(), order).fit(segment);
}

std::vector<double> segment_variances(const ProfileSeries& profile, std::size_t scale,
                                      int order) {
  const auto& y = profile.values;
  const std::size_t n = y.size();
  if (scale < static_cast<std::size_t>(order) + 2)
    throw std::invalid_argument("scale must be at least order + 2");
  const std::size_t segments = scale == 0 ? 0 : n / scale;
  if (segments == 0) throw std::invalid_argument("scale exceeds profile length");
  const SegmentDetrender detrender(scale, order);
  std::vector<double> out(2 * segments);
  const std::span<const double> all(y);
  for (std::size_t p = 0; p < segments; ++p) {
    out[p] = detrender.residual_variance(all.subspan(p * scale, scale));
    out[segments + p] = detrender.residual_variance(all.subspan(n - (p + 1) * scale, scale));
  }
  return out;
}

double fluctuation_at(std::span<const double> variances, double q, std::size_t scale) {
  if (variances.empty()) throw std::invalid_argument("fluctuation_at: no variances");
  const bool any_zero =
      std::any_of(variances.begin(), variances.end(), [](double v) { return v <= 0.0; });
  const bool all_zero =
      std::all_of(variances.begin(), variances.end(), [](double v) { return v <= 0.0; });
  if (all_zero || (any_zero && q <= 0.0)) throw DegenerateSegmentError(q, scale);

  const double count = static_cast<double>(variances.size());
  if (q == 0.0) {
    double acc = 0.0;
    for (double v : variances) acc += std::log(v);
    return std::exp(acc / (2.0 * count));
  }
  // log-sum-exp of (q/2) ln v keeps |q| = 10 free of overflow.
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : variances)
    if (v > 0.0) peak = std::max(peak, 0.5 * q * std::log(v));
  double acc = 0.0;
  for (double v : variances)
    if (v > 0.0) acc += std::exp(0.5 * q * std::log(v) - peak);
  return std::exp((peak + std::log(acc / count)) / q);
}

FluctuationSurface fluctuation_surface(std::span<const double> x, const MfdfaConfig& cfg) {
  cfg.validate(x.size());
  const ProfileSeries profile = compute_profile(x);
  double y_scale = 0.0;
  for (double v : profile.values) y_scale = std::max(y_scale, std::abs(v));
  const double zero_floor = (kZeroVarianceRel * y_scale) * (kZeroVarianceRel * y_scale);

  const std::size_t n_scales = cfg.scale_grid.size();
  const std::size_t n_q = cfg.q_grid.size();
  struct Column {
    std::vector<double> f;
    std::size_t segments = 0;
    bool degenerate = false;
    double bad_q = 0.0;
  };
  std::vector<Column> columns(n_scales);

  parallel_for(n_scales, cfg.jobs, [&](std::size_t is) {
    const std::size_t s = cfg.scale_grid[is];
    auto variances = segment_variances(profile, s, cfg.detrend_order);
    for (double& v : variances)
      if (v <= zero_floor) v = 0.0;
    Column& col = columns[is];
    col.segments = variances.size();
    col.f.resize(n_q);
    for (std::size_t iq = 0; iq < n_q; ++iq) {
      try {
        col.f[iq] = fluctuation_at(variances, cfg.q_grid[iq], s);
      } catch (const DegenerateSegmentError& e) {
        col.degenerate = true;
        col.bad_q = e.q();
        return;
      }
    }
  });

  FluctuationSurface surface;
  surface.q_grid = cfg.q_grid;
  surface.values.assign(n_q, {});
  for (std::size_t is = 0; is < n_scales; ++is) {
    const std::size_t s = cfg.scale_grid[is];
    if (columns[is].degenerate) {
      if (cfg.strict) throw DegenerateSegmentError(columns[is].bad_q, s);
      surface.excluded_scales.push_back(s);
      surface.warnings.push_back("scale " + std::to_string(s) +
                                 " excluded: zero residual variance with q = " +
                                 format_q(columns[is].bad_q));
      continue;
    }
    surface.scale_grid.push_back(s);
    surface.segment_counts.push_back(columns[is].segments);
    for (std::size_t iq = 0; iq < n_q; ++iq) surface.values[iq].push_back(columns[is].f[iq]);
  }
  return surface;
}

std::string format_q(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

void write_surface_tsv(std::ostream& out, const FluctuationSurface& surface) {
  out << 's';
  for (double q : surface.q_grid) out << "\tF_q=" << format_q(q);
  out << '\n';
  char buf[32];
  for (std::size_t is = 0; is < surface.scale_grid.size(); ++is) {
    out << surface.scale_grid[is];
    for (std::size_t iq = 0; iq < surface.q_grid.size(); ++iq) {
      std::snprintf(buf, sizeof buf, "%.9e", surface.values[iq][is]);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

}  // namespace mfdfa
