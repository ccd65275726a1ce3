#pragma once

// Autocorrelation of normalised returns and power-law tail estimation on the
// complementary cumulative distribution of |r|.

#include <cstddef>
#include <string_view>
#include <vector>

#include "mfdfa/series.hpp"
#include "mfdfa/tsv.hpp"

namespace mfdfa {

struct AcfResult {
  std::vector<std::size_t> lags;
  std::vector<double> c;
};

/// C(s) = 1/(N - s) * sum_{i < N - s} x_i x_{i+s}, s = first_lag..max_lag.
/// Input must already be normalised (|mean| and |var - 1| within 1e-6).
AcfResult autocorrelation(const ReturnSeries& x, std::size_t max_lag, std::size_t first_lag = 1);

struct CcdfPoint {
  double value;
  double probability;
};

/// Point k (1-based) is (|r|_(k), k / N) with |r| sorted descending.
std::vector<CcdfPoint> empirical_ccdf(const ReturnSeries& x);

enum class TailMethod { ccdf_ols, hill };
std::string_view to_string(TailMethod m);

struct TailFit {
  double zeta = 0.0;
  double zeta_err = 0.0;
  double tail_fraction = 0.0;
  TailMethod method = TailMethod::ccdf_ols;
  std::size_t n_tail = 0;
  double r2 = 0.0;
  /// False when the log-log CCDF is visibly curved (r2 below kPowerLawR2).
  bool power_law = false;
  /// Hill estimate over the same tail points.
  double hill_zeta = 0.0;
  double hill_err = 0.0;
};

inline constexpr double kPowerLawR2 = 0.98;
inline constexpr double kDefaultTailFraction = 0.05;
inline constexpr std::size_t kMinTailPoints = 20;

/// OLS of ln P on ln |r| over the largest tail_fraction of the CCDF points;
/// zeta = -slope. The Hill estimator on the same points is reported alongside.
TailFit tail_exponent(const std::vector<CcdfPoint>& ccdf, double tail_fraction = kDefaultTailFraction);

/// Hill estimator using the k largest values of the CCDF (k + 1 order
/// statistics): zeta = k / sum ln(x_(i) / x_(k+1)), err = zeta / sqrt(k).
std::pair<double, double> hill_estimator(const std::vector<CcdfPoint>& ccdf, std::size_t k);

TsvTable acf_table(const AcfResult& acf);
TsvTable ccdf_table(const std::vector<CcdfPoint>& ccdf);

}  // namespace mfdfa
