#pragma once

// Generalised Hurst exponents from log-log regression, the mass exponent
// tau(q) = q h(q) - 1 and the singularity spectrum f(alpha).

#include <cstddef>
#include <vector>

#include "mfdfa/engine.hpp"
#include "mfdfa/tsv.hpp"

namespace mfdfa {

/// Inclusive scale window used for the log-log regression.
struct FitRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

/// Regression windows for long and short series: [50, 800] when n >= 2000,
/// otherwise [10, 60].
FitRange default_fit_range(std::size_t n);
inline constexpr std::size_t kShortSeriesThreshold = 2000;
inline constexpr std::size_t kMinFitScales = 5;

struct HurstSpectrum {
  std::vector<double> q_grid;
  std::vector<double> h;
  std::vector<double> h_err;
  std::vector<double> r2;
  FitRange fit_range;
  std::size_t scales_used = 0;
  /// Realisations that failed and were left out of an ensemble average.
  std::size_t excluded_realizations = 0;

  double at(double q) const;
};

struct TauSpectrum {
  std::vector<double> q_grid;
  std::vector<double> tau;
  std::vector<double> tau_err;
};

struct SpectrumPoint {
  double alpha = 0.0;
  double f = 0.0;
  double q = 0.0;
};

struct SpectrumWidth {
  double width = 0.0;
  bool monofractal = false;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
};

struct SingularitySpectrum {
  std::vector<SpectrumPoint> points;
  SpectrumWidth width_at_zero;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least 3 points
/// and a non-constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

HurstSpectrum hurst_spectrum(const FluctuationSurface& surface, const FitRange& range);
TauSpectrum tau_from_h(const HurstSpectrum& h);

/// Central differences of tau on a uniform q grid (one-sided at the ends).
SingularitySpectrum singularity_spectrum(const TauSpectrum& tau);

/// Width of f(alpha) at f = 0, from the outermost point of each branch. A
/// branch that crosses f = 0 inside the grid is interpolated to the crossing;
/// one that has descended below kExtrapolationCeiling but stops short of zero
/// is extended linearly along its last chord. Spectra whose alpha values are
/// all equal get width 0 and the monofractal flag.
SpectrumWidth spectrum_width(const SingularitySpectrum& ss);
inline constexpr double kExtrapolationCeiling = 0.5;

TsvTable hurst_table(const HurstSpectrum& h);
TsvTable tau_table(const TauSpectrum& t);
TsvTable singularity_table(const SingularitySpectrum& s);

}  // namespace mfdfa
