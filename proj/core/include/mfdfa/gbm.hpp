#pragma once

// Generalised binomial multifractal (GBM) cascade: series generation, the
// closed-form h(q), tau(q) and f(alpha), and a two-parameter least-squares
// fit of (a, b) to an empirical h(q).

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfdfa/spectra.hpp"

namespace mfdfa {

struct GbmParams {
  double a = 0.5;
  double b = 0.5;

  GbmParams() = default;
  /// Throws unless a > 0 and b > 0.
  GbmParams(double a, double b);

  /// The model is symmetric under a <-> b; the canonical form has a <= b.
  GbmParams canonical() const;
};

inline constexpr unsigned kGbmMaxLevels = 24;

/// x_k = a^{n(k-1)} b^{n_max - n(k-1)}, k = 1..2^n_max, with n(.) the number
/// of set bits.
std::vector<double> gbm_series(const GbmParams& params, unsigned n_max);

double gbm_h(double q, const GbmParams& params);
double gbm_tau(double q, const GbmParams& params);
/// d tau / d q.
double gbm_alpha(double q, const GbmParams& params);
double gbm_f(double q, const GbmParams& params);

/// |ln a - ln b| / ln 2.
double delta_alpha(const GbmParams& params);

/// f(alpha) evaluated in closed form at each q of the grid.
SingularitySpectrum gbm_singularity_spectrum(const GbmParams& params,
                                             const std::vector<double>& q_grid);

struct GbmFitOptions {
  bool weighted = false;  // weight residuals by 1 / h_err^2
  double rejection_threshold = 0.01;  // on rss / n_points
  double domain_lo = 0.3;
  double domain_hi = 1.0;
  double grid_step = 0.005;
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

struct GbmFitResult {
  GbmParams params;
  double a_err = 0.0;
  double b_err = 0.0;
  double delta_alpha = 0.0;
  double delta_alpha_err = 0.0;
  /// Unweighted residual sum of squares of h(q).
  double rss = 0.0;
  std::size_t n_points = 0;
  std::size_t iterations = 0;
  bool accepted = false;
  bool monofractal = false;
  std::vector<std::string> warnings;
};

inline constexpr double kMonofractalDeltaAlpha = 1e-3;

class GbmFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coarse grid over the open domain followed by Nelder-Mead refinement.
/// Deterministic: no random restarts. Throws GbmFitError if the refinement
/// exceeds the iteration cap.
GbmFitResult fit_gbm(const HurstSpectrum& h, const GbmFitOptions& options = {});

}  // namespace mfdfa
