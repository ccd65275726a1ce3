#include "mfdfa/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mfdfa {

FitRange default_fit_range(std::size_t n) {
  if (n < kShortSeriesThreshold) return {10, 60};
  return {50, 800};
}

double HurstSpectrum::at(double q) const {
  for (std::size_t i = 0; i < q_grid.size(); ++i)
    if (q_grid[i] == q) return h[i];
  throw std::out_of_range("q = " + format_q(q) + " is not on the spectrum grid");
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: length mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_line: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate regressor");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ssr += r * r;
  }
  fit.slope_err = std::sqrt(ssr / (n - 2.0) / sxx);
  fit.r2 = syy > 0.0 ? std::max(0.0, 1.0 - ssr / syy) : 1.0;
  return fit;
}

HurstSpectrum hurst_spectrum(const FluctuationSurface& surface, const FitRange& range) {
  if (!(range.lo < range.hi)) throw std::invalid_argument("fit range needs lo < hi");
  std::vector<std::size_t> cols;
  for (std::size_t is = 0; is < surface.scale_grid.size(); ++is) {
    const auto s = surface.scale_grid[is];
    if (s >= range.lo && s <= range.hi) cols.push_back(is);
  }
  if (cols.size() < kMinFitScales)
    throw std::invalid_argument("fit range [" + std::to_string(range.lo) + ", " +
                                std::to_string(range.hi) + "] holds " +
                                std::to_string(cols.size()) + " scales, need " +
                                std::to_string(kMinFitScales));
  std::vector<double> log_s(cols.size()), log_f(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k)
    log_s[k] = std::log(static_cast<double>(surface.scale_grid[cols[k]]));

  HurstSpectrum out;
  out.q_grid = surface.q_grid;
  out.fit_range = range;
  out.scales_used = cols.size();
  const std::size_t nq = surface.q_grid.size();
  out.h.resize(nq);
  out.h_err.resize(nq);
  out.r2.resize(nq);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    for (std::size_t k = 0; k < cols.size(); ++k)
      log_f[k] = std::log(surface.values[iq][cols[k]]);
    const LineFit fit = fit_line(log_s, log_f);
    out.h[iq] = fit.slope;
    out.h_err[iq] = fit.slope_err;
    out.r2[iq] = fit.r2;
  }
  return out;
}

TauSpectrum tau_from_h(const HurstSpectrum& h) {
  TauSpectrum t;
  t.q_grid = h.q_grid;
  t.tau.resize(h.q_grid.size());
  t.tau_err.resize(h.q_grid.size());
  for (std::size_t i = 0; i < h.q_grid.size(); ++i) {
    const double q = h.q_grid[i];
    t.tau[i] = q == 0.0 ? -1.0 : q * h.h[i] - 1.0;
    t.tau_err[i] = std::abs(q) * h.h_err[i];
  }
  return t;
}

SingularitySpectrum singularity_spectrum(const TauSpectrum& tau) {
  const auto& q = tau.q_grid;
  const std::size_t n = q.size();
  if (n < 3) throw std::invalid_argument("singularity spectrum needs at least 3 q values");
  if (tau.tau.size() != n) throw std::invalid_argument("tau spectrum length mismatch");
  const double dq = (q.back() - q.front()) / static_cast<double>(n - 1);
  if (!(dq > 0.0)) throw std::invalid_argument("q grid must be increasing");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((q[i] - q[i - 1]) - dq) > 1e-9 * std::max(1.0, dq))
      throw std::invalid_argument("singularity spectrum needs a uniform q grid");

  SingularitySpectrum ss;
  ss.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double alpha;
    if (i == 0)
      alpha = (tau.tau[1] - tau.tau[0]) / (q[1] - q[0]);
    else if (i == n - 1)
      alpha = (tau.tau[n - 1] - tau.tau[n - 2]) / (q[n - 1] - q[n - 2]);
    else
      alpha = (tau.tau[i + 1] - tau.tau[i - 1]) / (q[i + 1] - q[i - 1]);
    ss.points[i] = {alpha, q[i] * alpha - tau.tau[i], q[i]};
  }
  ss.width_at_zero = spectrum_width(ss);
  return ss;
}

namespace {

// Outermost alpha of one branch. `order` walks from the spectrum maximum
// outward; `outward` is +1 for the large-alpha branch and -1 for the other.
double branch_extreme(const std::vector<SpectrumPoint>& pts, const std::vector<std::size_t>& order,
                      int outward) {
  const SpectrumPoint* prev = &pts[order.front()];
  for (std::size_t k = 1; k < order.size(); ++k) {
    const SpectrumPoint& cur = pts[order[k]];
    if (cur.f <= 0.0) {
      if (prev->f == cur.f) return cur.alpha;
      const double t = prev->f / (prev->f - cur.f);
      return prev->alpha + t * (cur.alpha - prev->alpha);
    }
    prev = &cur;
  }
  const SpectrumPoint& end = pts[order.back()];
  if (order.size() < 2) return end.alpha;
  const SpectrumPoint& inner = pts[order[order.size() - 2]];
  const double step = end.alpha - inner.alpha;
  const bool moves_out = step * outward > 0.0;
  const bool descends = end.f < inner.f;
  if (moves_out && descends && end.f < kExtrapolationCeiling)
    return end.alpha + step * end.f / (inner.f - end.f);
  return end.alpha;
}

}  // namespace

SpectrumWidth spectrum_width(const SingularitySpectrum& ss) {
  const auto& pts = ss.points;
  if (pts.size() < 3) throw std::invalid_argument("spectrum width needs at least 3 points");
  SpectrumWidth w;
  const auto [lo, hi] = std::minmax_element(
      pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  w.alpha_min = lo->alpha;
  w.alpha_max = hi->alpha;
  const double scale = std::max({1.0, std::abs(lo->alpha), std::abs(hi->alpha)});
  if (hi->alpha - lo->alpha <= 1e-9 * scale) {
    w.monofractal = true;
    w.width = 0.0;
    return w;
  }

  // Branches split at q = 0 when present, otherwise at the maximum of f.
  std::size_t apex = 0;
  auto zero = std::find_if(pts.begin(), pts.end(), [](const auto& p) { return p.q == 0.0; });
  if (zero != pts.end()) {
    apex = static_cast<std::size_t>(zero - pts.begin());
  } else {
    apex = static_cast<std::size_t>(
        std::max_element(pts.begin(), pts.end(),
                         [](const auto& a, const auto& b) { return a.f < b.f; }) -
        pts.begin());
  }
  // Points are stored by increasing q: negative q maps to large alpha.
  std::vector<std::size_t> left, right;
  for (std::size_t i = apex + 1; i-- > 0;) left.push_back(i);
  for (std::size_t i = apex; i < pts.size(); ++i) right.push_back(i);

  w.alpha_max = std::max(w.alpha_max, branch_extreme(pts, left, +1));
  w.alpha_min = std::min(w.alpha_min, branch_extreme(pts, right, -1));
  w.width = std::max(0.0, w.alpha_max - w.alpha_min);
  return w;
}

TsvTable hurst_table(const HurstSpectrum& h) {
  TsvTable t;
  t.add("q", h.q_grid);
  t.add("h", h.h);
  t.add("h_err", h.h_err);
  t.add("r2", h.r2);
  return t;
}

TsvTable tau_table(const TauSpectrum& tau) {
  TsvTable t;
  t.add("q", tau.q_grid);
  t.add("tau", tau.tau);
  t.add("tau_err", tau.tau_err);
  return t;
}

TsvTable singularity_table(const SingularitySpectrum& s) {
  std::vector<double> q, alpha, f;
  for (const auto& p : s.points) {
    q.push_back(p.q);
    alpha.push_back(p.alpha);
    f.push_back(p.f);
  }
  TsvTable t;
  t.add("q", std::move(q));
  t.add("alpha", std::move(alpha));
  t.add("f", std::move(f));
  return t;
}

}  // namespace mfdfa
