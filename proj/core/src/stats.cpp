#include "mfdfa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfdfa/spectra.hpp"

namespace mfdfa {

AcfResult autocorrelation(const ReturnSeries& x, std::size_t max_lag, std::size_t first_lag) {
  const auto v = x.values();
  const std::size_t n = v.size();
  if (n < 4) throw std::invalid_argument("autocorrelation: series too short");
  if (max_lag < first_lag) throw std::invalid_argument("autocorrelation: max_lag < first lag");
  if (max_lag > n / 4)
    throw std::invalid_argument("autocorrelation: max_lag " + std::to_string(max_lag) +
                                " exceeds N/4 = " + std::to_string(n / 4));
  const double mu = mean(v);
  const double var = variance(v);
  if (std::abs(mu) > 1e-6 || std::abs(var - 1.0) > 1e-6)
    throw std::invalid_argument("autocorrelation: input is not normalised (mean " +
                                std::to_string(mu) + ", variance " + std::to_string(var) + ")");
  AcfResult out;
  for (std::size_t s = first_lag; s <= max_lag; ++s) {
    double acc = 0.0;
    for (std::size_t i = 0; i + s < n; ++i) acc += v[i] * v[i + s];
    out.lags.push_back(s);
    out.c.push_back(acc / static_cast<double>(n - s));
  }
  return out;
}

std::vector<CcdfPoint> empirical_ccdf(const ReturnSeries& x) {
  std::vector<double> mags;
  mags.reserve(x.size());
  for (double v : x.values()) mags.push_back(std::abs(v));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  const double n = static_cast<double>(mags.size());
  std::vector<CcdfPoint> out(mags.size());
  for (std::size_t k = 0; k < mags.size(); ++k)
    out[k] = {mags[k], static_cast<double>(k + 1) / n};
  return out;
}

std::string_view to_string(TailMethod m) { return m == TailMethod::hill ? "hill" : "ccdf-ols"; }

std::pair<double, double> hill_estimator(const std::vector<CcdfPoint>& ccdf, std::size_t k) {
  if (k < 1 || k >= ccdf.size()) throw std::invalid_argument("hill: k out of range");
  const double threshold = ccdf[k].value;
  if (!(threshold > 0.0)) throw std::invalid_argument("hill: non-positive threshold");
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(ccdf[i].value / threshold);
  if (!(acc > 0.0)) throw std::invalid_argument("hill: tail has no spread");
  const double zeta = static_cast<double>(k) / acc;
  return {zeta, zeta / std::sqrt(static_cast<double>(k))};
}

TailFit tail_exponent(const std::vector<CcdfPoint>& ccdf, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  const auto n_tail = static_cast<std::size_t>(
      std::floor(tail_fraction * static_cast<double>(ccdf.size())));
  if (n_tail < kMinTailPoints)
    throw std::invalid_argument("tail holds " + std::to_string(n_tail) + " points, need " +
                                std::to_string(kMinTailPoints));
  std::vector<double> lx(n_tail), lp(n_tail);
  for (std::size_t k = 0; k < n_tail; ++k) {
    if (!(ccdf[k].value > 0.0)) throw std::invalid_argument("tail contains non-positive values");
    lx[k] = std::log(ccdf[k].value);
    lp[k] = std::log(ccdf[k].probability);
  }
  const LineFit line = fit_line(lx, lp);
  TailFit fit;
  fit.method = TailMethod::ccdf_ols;
  fit.zeta = -line.slope;
  fit.zeta_err = line.slope_err;
  fit.r2 = line.r2;
  fit.tail_fraction = tail_fraction;
  fit.n_tail = n_tail;
  fit.power_law = fit.r2 >= kPowerLawR2;
  if (n_tail < ccdf.size()) {
    const auto [hz, he] = hill_estimator(ccdf, n_tail);
    fit.hill_zeta = hz;
    fit.hill_err = he;
  } else {
    const auto [hz, he] = hill_estimator(ccdf, n_tail - 1);
    fit.hill_zeta = hz;
    fit.hill_err = he;
  }
  if (!(fit.zeta > 0.0)) throw std::invalid_argument("tail regression slope is not negative");
  return fit;
}

TsvTable acf_table(const AcfResult& acf) {
  TsvTable t;
  t.add("lag", std::vector<double>(acf.lags.begin(), acf.lags.end()));
  t.add("c", acf.c);
  return t;
}

TsvTable ccdf_table(const std::vector<CcdfPoint>& ccdf) {
  std::vector<double> v, p;
  for (const auto& pt : ccdf) {
    v.push_back(pt.value);
    p.push_back(pt.probability);
  }
  TsvTable t;
  t.add("value", std::move(v));
  t.add("probability", std::move(p));
  return t;
}

}  // namespace mfdfa
