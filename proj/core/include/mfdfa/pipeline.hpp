#pragma once

// End-to-end analysis: ingest -> returns -> period slices -> MF-DFA on the
// original series and on shuffled / AAFT ensembles -> spectra, GBM fits,
// tail exponents and autocorrelations -> JSON report and TSV plot data.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfdfa/engine.hpp"
#include "mfdfa/gbm.hpp"
#include "mfdfa/series.hpp"
#include "mfdfa/spectra.hpp"
#include "mfdfa/stats.hpp"

namespace mfdfa {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "1.0.0";

/// Invalid or unusable configuration (exit code 2 at the command line).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisConfig {
  /// CSV files or directories (every *.csv inside, sorted by name).
  std::vector<std::string> inputs;
  /// Empty means one period named "full" covering each series.
  std::vector<AnalysisPeriod> periods;
  int order = 2;
  double q_min = -10.0;
  double q_max = 10.0;
  double q_step = 0.5;
  std::size_t s_min = 6;
  std::size_t s_max = 0;  // 0: floor(N / 5)
  std::size_t n_scales = 30;
  std::size_t fit_lo = 0;  // 0 with fit_hi = 0: chosen by series length
  std::size_t fit_hi = 0;
  std::size_t ensemble_n = 10;
  std::uint64_t seed = 42;
  double tail_fraction = kDefaultTailFraction;
  std::size_t window_r = 5;
  std::size_t max_lag = 50;
  bool weighted_fit = false;
  std::string output_dir = "mfdfa-out";
  unsigned jobs = 1;
  bool svg = false;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// Accepts a bare config object or a full report (its "config" echo).
AnalysisConfig config_from_json(const std::string& text);
std::string config_to_json(const AnalysisConfig& cfg);

/// Expands directories; throws ConfigError when nothing is found.
std::vector<std::string> resolve_inputs(const AnalysisConfig& cfg);

struct AcfSummary {
  std::size_t window_r = 0;
  AcfResult returns;
  AcfResult window_max;
  AcfResult window_min;
};

struct VariantReport {
  std::string variant;  // original | shuffled | surrogate
  std::string error;    // empty when the block succeeded
  std::vector<std::string> warnings;
  std::vector<std::uint64_t> seeds;
  std::size_t excluded_realizations = 0;
  FluctuationSurface surface;
  HurstSpectrum hurst;
  TauSpectrum tau;
  SingularitySpectrum singularity;
  std::optional<GbmFitResult> gbm;
  std::vector<CcdfPoint> ccdf;
  std::optional<TailFit> tail;
  std::optional<AcfSummary> acf;

  bool ok() const { return error.empty(); }
};

struct PeriodReport {
  std::string name;
  std::string start;
  std::string end;
  std::size_t n_returns = 0;
  FitRange fit_range;
  std::string error;
  std::vector<VariantReport> variants;
};

struct SeriesReport {
  std::string label;
  std::string source;
  std::size_t n_prices = 0;
  std::string error;
  std::vector<PeriodReport> periods;
};

struct AnalysisReport {
  AnalysisConfig config;
  std::vector<SeriesReport> series;

  /// Every failure message, prefixed with its series/period/variant.
  std::vector<std::string> errors() const;
  bool ok() const { return errors().empty(); }
};

/// Block failures are recorded in the report rather than thrown; only
/// configuration problems throw (ConfigError).
AnalysisReport run_pipeline(const AnalysisConfig& cfg);

std::string report_to_json(const AnalysisReport& report);

/// Writes `<series>_<period>_<variant>_<quantity>.tsv` for the quantities
/// ccdf, acf, fluctuation, hurst, tau and singularity (plus .svg charts when
/// the config asks for them). Returns the paths in write order.
std::vector<std::filesystem::path> emit_plot_data(const AnalysisReport& report,
                                                  const std::filesystem::path& dir);

/// report.json plus the plot data under cfg.output_dir.
std::vector<std::filesystem::path> write_outputs(const AnalysisReport& report,
                                                 const std::filesystem::path& dir);

/// 0 when every block succeeded, 1 otherwise.
int exit_code(const AnalysisReport& report);

}  // namespace mfdfa
