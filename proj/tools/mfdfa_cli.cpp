// mfdfa: command-line front end. Every analysis step is a subcommand; the
// `pipeline` subcommand runs them all and writes a JSON report plus plot data.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfdfa/engine.hpp"
#include "mfdfa/gbm.hpp"
#include "mfdfa/pipeline.hpp"
#include "mfdfa/series.hpp"
#include "mfdfa/spectra.hpp"
#include "mfdfa/stats.hpp"
#include "mfdfa/surrogate.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/tsv.hpp"

using namespace mfdfa;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// Flags shared by the analysis subcommands. Unset flags leave the config
// (defaults or --config file) untouched.
struct Flags {
  std::optional<int> order;
  std::optional<double> q_min, q_max, q_step, tail_fraction;
  std::optional<std::size_t> s_min, s_max, n_scales, fit_lo, fit_hi, ensemble_n, window_r,
      max_lag;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::vector<std::string> periods;
  std::string config;
  std::string out_dir;
  bool svg = false;
  bool weighted = false;
};

void add_mfdfa_flags(CLI::App* app, Flags& f) {
  app->add_option("--order", f.order, "Detrending polynomial order m (default 2)");
  app->add_option("--q-min", f.q_min, "Smallest q (default -10)");
  app->add_option("--q-max", f.q_max, "Largest q (default 10)");
  app->add_option("--q-step", f.q_step, "q grid step (default 0.5)");
  app->add_option("--s-min", f.s_min, "Smallest scale (default 6)");
  app->add_option("--s-max", f.s_max, "Largest scale (default N/5)");
  app->add_option("--n-scales", f.n_scales, "Number of log-spaced scales (default 30)");
  app->add_option("--jobs", f.jobs, "Worker threads (default 1)");
}

void add_fit_flags(CLI::App* app, Flags& f) {
  app->add_option("--fit-lo", f.fit_lo, "Lower end of the regression window (default 50, or 10 when N < 2000)");
  app->add_option("--fit-hi", f.fit_hi, "Upper end of the regression window (default 800, or 60 when N < 2000)");
}

void add_period_flag(CLI::App* app, Flags& f) {
  app->add_option("--period", f.periods, "Analysis period name:YYYY-MM-DD:YYYY-MM-DD (repeatable)");
}

AnalysisConfig build_config(const Flags& f) {
  AnalysisConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file " + f.config);
    std::ostringstream text;
    text << in.rdbuf();
    c = config_from_json(text.str());
  }
  if (f.order) c.order = *f.order;
  if (f.q_min) c.q_min = *f.q_min;
  if (f.q_max) c.q_max = *f.q_max;
  if (f.q_step) c.q_step = *f.q_step;
  if (f.s_min) c.s_min = *f.s_min;
  if (f.s_max) c.s_max = *f.s_max;
  if (f.n_scales) c.n_scales = *f.n_scales;
  if (f.fit_lo) c.fit_lo = *f.fit_lo;
  if (f.fit_hi) c.fit_hi = *f.fit_hi;
  if (f.ensemble_n) c.ensemble_n = *f.ensemble_n;
  if (f.seed) c.seed = *f.seed;
  if (f.tail_fraction) c.tail_fraction = *f.tail_fraction;
  if (f.window_r) c.window_r = *f.window_r;
  if (f.max_lag) c.max_lag = *f.max_lag;
  if (f.jobs) c.jobs = *f.jobs;
  if (!f.out_dir.empty()) c.output_dir = f.out_dir;
  if (f.svg) c.svg = true;
  if (f.weighted) c.weighted_fit = true;
  if (!f.periods.empty()) {
    c.periods.clear();
    for (const auto& p : f.periods) {
      try {
        c.periods.push_back(parse_period(p));
      } catch (const std::exception& e) {
        throw ConfigError("bad --period '" + p + "': " + e.what());
      }
    }
  }
  c.validate();
  return c;
}

ReturnSeries load_returns(const std::string& path, const std::vector<AnalysisPeriod>& periods) {
  auto r = log_returns(load_price_csv_file(path));
  if (periods.size() > 1) throw ConfigError("this subcommand takes at most one --period");
  if (!periods.empty()) r = slice_period(r, periods.front());
  return r;
}

MfdfaConfig engine_config(const AnalysisConfig& c, std::size_t n) {
  MfdfaConfig m;
  m.detrend_order = c.order;
  m.q_grid = make_q_grid(c.q_min, c.q_max, c.q_step);
  m.scale_grid = make_scale_grid(n, c.order, c.s_min, c.s_max, c.n_scales);
  m.jobs = c.jobs;
  m.seed = c.seed;
  m.validate(n);
  return m;
}

FitRange fit_range(const AnalysisConfig& c, std::size_t n) {
  return c.fit_lo ? FitRange{c.fit_lo, c.fit_hi} : default_fit_range(n);
}

// Opens `path` for writing, or returns std::cout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_table(const std::string& path, const TsvTable& t,
                 const std::vector<std::string>& ints = {}) {
  Output out(path);
  write_tsv(out.stream(), t, ints);
}

HurstSpectrum read_hurst_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string name;
    while (std::getline(hs, name, '\t')) names.push_back(name);
  }
  auto col = [&](const std::string& n) -> int {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == n) return static_cast<int>(i);
    return -1;
  };
  const int iq = col("q"), ih = col("h"), ie = col("h_err"), ir = col("r2");
  if (iq < 0 || ih < 0) throw std::runtime_error(path + ": expected columns q and h");
  HurstSpectrum h;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != names.size())
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": wrong column count");
    h.q_grid.push_back(v[iq]);
    h.h.push_back(v[ih]);
    h.h_err.push_back(ie >= 0 ? v[ie] : 0.0);
    h.r2.push_back(ir >= 0 ? v[ir] : 1.0);
  }
  return h;
}

Json gbm_json(const GbmFitResult& g) {
  return Json{{"a", g.params.a},
              {"a_err", g.a_err},
              {"b", g.params.b},
              {"b_err", g.b_err},
              {"delta_alpha", g.delta_alpha},
              {"delta_alpha_err", g.delta_alpha_err},
              {"rss", g.rss},
              {"n_points", g.n_points},
              {"accepted", g.accepted},
              {"monofractal", g.monofractal},
              {"warnings", g.warnings}};
}

Date default_start() {
  return Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{1}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multifractal detrended fluctuation analysis of financial time series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolkitVersion);

  // ingest -------------------------------------------------------------------
  Flags ingest_f;
  std::string ingest_in, ingest_out;
  bool ingest_norm = false;
  auto* ingest = app.add_subcommand("ingest", "Validate a date,price CSV and write its log-returns");
  ingest->add_option("input", ingest_in, "Price CSV")->required();
  ingest->add_option("-o,--output", ingest_out, "Returns TSV (default stdout)");
  ingest->add_flag("--normalize", ingest_norm, "Zero mean, unit variance");
  add_period_flag(ingest, ingest_f);

  // mfdfa --------------------------------------------------------------------
  Flags mfdfa_f;
  std::string mfdfa_in, mfdfa_out;
  bool strict = false;
  auto* mfdfa = app.add_subcommand("mfdfa", "Fluctuation functions F_q(s) of a price series' returns");
  mfdfa->add_option("input", mfdfa_in, "Price CSV")->required();
  mfdfa->add_option("-o,--output", mfdfa_out, "Fluctuation TSV (default stdout)");
  mfdfa->add_flag("--strict", strict, "Fail on degenerate scales instead of dropping them");
  mfdfa->add_option("--config", mfdfa_f.config, "JSON config file");
  add_mfdfa_flags(mfdfa, mfdfa_f);
  add_period_flag(mfdfa, mfdfa_f);

  // spectra ------------------------------------------------------------------
  Flags spectra_f;
  std::string spectra_in, spectra_prefix = "spectra";
  auto* spectra = app.add_subcommand("spectra", "h(q), tau(q) and f(alpha) of a price series' returns");
  spectra->add_option("input", spectra_in, "Price CSV")->required();
  spectra->add_option("--prefix", spectra_prefix, "Output file prefix (default 'spectra')");
  spectra->add_option("--out-dir", spectra_f.out_dir, "Output directory (default .)");
  spectra->add_option("--config", spectra_f.config, "JSON config file");
  add_mfdfa_flags(spectra, spectra_f);
  add_fit_flags(spectra, spectra_f);
  add_period_flag(spectra, spectra_f);

  // gbm-fit ------------------------------------------------------------------
  std::string gbm_in;
  bool gbm_weighted = false;
  auto* gbm = app.add_subcommand("gbm-fit", "Fit the binomial cascade model to an h(q) table");
  gbm->add_option("input", gbm_in, "TSV with columns q, h (and optionally h_err, r2)")->required();
  gbm->add_flag("--weighted", gbm_weighted, "Weight residuals by 1/h_err^2");

  // surrogate ----------------------------------------------------------------
  std::string sur_in, sur_out, sur_method = "aaft";
  std::uint64_t sur_seed = 42;
  auto* sur = app.add_subcommand("surrogate", "Shuffled or AAFT surrogate of a price series");
  sur->add_option("input", sur_in, "Price CSV")->required();
  sur->add_option("-o,--output", sur_out, "Price CSV (default stdout)");
  sur->add_option("--method", sur_method, "shuffle | aaft (default aaft)")
      ->check(CLI::IsMember({"shuffle", "aaft"}));
  sur->add_option("--seed", sur_seed, "Random seed (default 42)");

  // acf ----------------------------------------------------------------------
  Flags acf_f;
  std::string acf_in, acf_out;
  auto* acf = app.add_subcommand("acf", "Autocorrelation of normalised returns and of window extrema");
  acf->add_option("input", acf_in, "Price CSV")->required();
  acf->add_option("-o,--output", acf_out, "TSV lag, c, c_max, c_min (default stdout)");
  acf->add_option("--max-lag", acf_f.max_lag, "Largest lag (default 50, capped at N/4)");
  acf->add_option("--window-r", acf_f.window_r, "Window length for extrema (default 5)");
  add_period_flag(acf, acf_f);

  // tail ---------------------------------------------------------------------
  Flags tail_f;
  std::string tail_in, tail_ccdf;
  auto* tail = app.add_subcommand("tail", "Power-law tail exponent of the |normalised return| CCDF");
  tail->add_option("input", tail_in, "Price CSV")->required();
  tail->add_option("--tail-fraction", tail_f.tail_fraction, "Fraction of largest values used (default 0.05)");
  tail->add_option("--ccdf", tail_ccdf, "Also write the CCDF as TSV");
  add_period_flag(tail, tail_f);

  // pipeline -----------------------------------------------------------------
  Flags pipe_f;
  std::vector<std::string> pipe_inputs;
  auto* pipe = app.add_subcommand("pipeline", "Full analysis: original, shuffled and surrogate variants");
  pipe->add_option("inputs", pipe_inputs, "Price CSVs or directories (overrides the config)");
  pipe->add_option("--config", pipe_f.config, "JSON config file (a previous report.json also works)");
  pipe->add_option("--out-dir", pipe_f.out_dir, "Output directory (default mfdfa-out)");
  pipe->add_option("--ensemble-n", pipe_f.ensemble_n, "Realisations per ensemble (default 10)");
  pipe->add_option("--seed", pipe_f.seed, "Base seed (default 42)");
  pipe->add_option("--tail-fraction", pipe_f.tail_fraction, "Tail fraction (default 0.05)");
  pipe->add_option("--window-r", pipe_f.window_r, "Window length for extrema ACF (default 5)");
  pipe->add_option("--max-lag", pipe_f.max_lag, "Largest ACF lag (default 50)");
  pipe->add_flag("--svg", pipe_f.svg, "Also write SVG charts");
  pipe->add_flag("--weighted", pipe_f.weighted, "Weight GBM residuals by 1/h_err^2");
  add_mfdfa_flags(pipe, pipe_f);
  add_fit_flags(pipe, pipe_f);
  add_period_flag(pipe, pipe_f);

  // synth --------------------------------------------------------------------
  std::string syn_kind, syn_out;
  std::size_t syn_n = 8192;
  unsigned syn_nmax = 14;
  double syn_a = 0.6, syn_b = 0.9, syn_tail = 3.0, syn_phi = 0.8, syn_gamma = 0.4, syn_scale = 0.01;
  std::uint64_t syn_seed = 42;
  bool syn_raw = false;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic series with known scaling");
  syn->add_option("kind", syn_kind, "gbm | white | pareto | expcorr | powercorr")
      ->required()
      ->check(CLI::IsMember({"gbm", "white", "pareto", "expcorr", "powercorr"}));
  syn->add_option("-o,--output", syn_out, "Output file (default stdout)");
  syn->add_option("-n", syn_n, "Length (ignored for gbm; default 8192)");
  syn->add_option("--n-max", syn_nmax, "Cascade levels for gbm, length 2^n_max (default 14)");
  syn->add_option("--a", syn_a, "Cascade parameter a (default 0.6)");
  syn->add_option("--b", syn_b, "Cascade parameter b (default 0.9)");
  syn->add_option("--tail-index", syn_tail, "Pareto tail index (default 3)");
  syn->add_option("--phi", syn_phi, "Correlation of expcorr, C(s) = phi^s (default 0.8)");
  syn->add_option("--gamma", syn_gamma, "powercorr exponent, C(s) ~ s^-gamma (default 0.4)");
  syn->add_option("--seed", syn_seed, "Random seed (default 42)");
  syn->add_option("--scale", syn_scale, "Returns are value * scale when writing prices (default 0.01)");
  syn->add_flag("--raw", syn_raw, "Write the raw values, one per line, instead of a price CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*ingest) {
      auto c = build_config(ingest_f);
      auto r = load_returns(ingest_in, c.periods);
      if (ingest_norm) r = normalize(r);
      Output out(ingest_out);
      out.stream() << "date\treturn\n";
      char buf[64];
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r.values()[i]);
        out.stream() << format_iso_date(r.dates()[i]) << '\t' << buf << '\n';
      }
      std::fprintf(stderr, "%zu returns\n", r.size());
    } else if (*mfdfa) {
      auto c = build_config(mfdfa_f);
      const auto r = load_returns(mfdfa_in, c.periods);
      auto m = engine_config(c, r.size());
      m.strict = strict;
      const auto surface = fluctuation_surface(r, m);
      for (const auto& w : surface.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      Output out(mfdfa_out);
      write_surface_tsv(out.stream(), surface);
    } else if (*spectra) {
      auto c = build_config(spectra_f);
      const auto r = load_returns(spectra_in, c.periods);
      const auto surface = fluctuation_surface(r, engine_config(c, r.size()));
      for (const auto& w : surface.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      const auto h = hurst_spectrum(surface, fit_range(c, r.size()));
      const auto tau = tau_from_h(h);
      const auto ss = singularity_spectrum(tau);
      const fs::path dir = spectra_f.out_dir.empty() ? fs::path(".") : fs::path(spectra_f.out_dir);
      fs::create_directories(dir);
      write_table((dir / (spectra_prefix + "_hurst.tsv")).string(), hurst_table(h));
      write_table((dir / (spectra_prefix + "_tau.tsv")).string(), tau_table(tau));
      write_table((dir / (spectra_prefix + "_singularity.tsv")).string(), singularity_table(ss));
      std::printf("h(2) = %.6f  delta_alpha = %.6f%s\n", h.at(2.0), ss.width_at_zero.width,
                  ss.width_at_zero.monofractal ? "  (monofractal)" : "");
    } else if (*gbm) {
      GbmFitOptions opt;
      opt.weighted = gbm_weighted;
      const auto fit = fit_gbm(read_hurst_tsv(gbm_in), opt);
      std::cout << gbm_json(fit).dump(2) << '\n';
      if (!fit.accepted) std::fprintf(stderr, "GBM cannot describe this series\n");
    } else if (*sur) {
      const auto prices = load_price_csv_file(sur_in);
      const auto r = log_returns(prices);
      const auto s = make_surrogate(r, parse_surrogate_method(sur_method), sur_seed);
      Output out(sur_out);
      write_price_csv(out.stream(), cumulative_prices(s, prices.prices().front(), prices.dates().front()));
    } else if (*acf) {
      auto c = build_config(acf_f);
      const auto r = load_returns(acf_in, c.periods);
      std::size_t lag = std::min(c.max_lag, r.size() / 4);
      if (c.window_r > 1) lag = std::min(lag, (r.size() / c.window_r) / 4);
      if (lag < 1) throw std::invalid_argument("series too short for the requested window");
      auto t = acf_table(autocorrelation(normalize(r), lag));
      t.add("c_max", autocorrelation(normalize(window_extrema(r, c.window_r, ExtremumMode::max)), lag).c);
      t.add("c_min", autocorrelation(normalize(window_extrema(r, c.window_r, ExtremumMode::min)), lag).c);
      write_table(acf_out, t, {"lag"});
    } else if (*tail) {
      auto c = build_config(tail_f);
      const auto r = load_returns(tail_in, c.periods);
      const auto ccdf = empirical_ccdf(normalize(r));
      if (!tail_ccdf.empty()) write_table(tail_ccdf, ccdf_table(ccdf));
      const auto t = tail_exponent(ccdf, c.tail_fraction);
      std::cout << Json{{"zeta", t.zeta},         {"zeta_err", t.zeta_err},
                        {"method", to_string(t.method)}, {"r2", t.r2},
                        {"power_law", t.power_law}, {"tail_fraction", t.tail_fraction},
                        {"n_tail", t.n_tail},     {"hill_zeta", t.hill_zeta},
                        {"hill_err", t.hill_err}}
                       .dump(2)
                << '\n';
    } else if (*pipe) {
      auto c = build_config(pipe_f);
      if (!pipe_inputs.empty()) c.inputs = pipe_inputs;
      if (c.inputs.empty()) throw ConfigError("no inputs given");
      const auto report = run_pipeline(c);
      write_outputs(report, c.output_dir);
      for (const auto& e : report.errors()) std::fprintf(stderr, "error: %s\n", e.c_str());
      std::fprintf(stderr, "report written to %s\n", (fs::path(c.output_dir) / "report.json").c_str());
      return exit_code(report);
    } else if (*syn) {
      std::vector<double> x;
      if (syn_kind == "gbm") {
        if (syn_nmax > kGbmMaxLevels) throw ConfigError("--n-max must be <= 24");
        x = gbm_series(GbmParams(syn_a, syn_b), syn_nmax);
      } else if (syn_kind == "white") {
        x = white_noise(syn_n, syn_seed);
      } else if (syn_kind == "pareto") {
        x = symmetric_pareto(syn_n, syn_tail, syn_seed);
      } else if (syn_kind == "expcorr") {
        x = exponential_correlated_noise(syn_n, syn_phi, syn_seed);
      } else {
        x = power_law_correlated_noise(syn_n, syn_gamma, syn_seed);
      }
      Output out(syn_out);
      if (syn_raw) {
        char buf[64];
        for (double v : x) {
          std::snprintf(buf, sizeof buf, "%.17g\n", v);
          out.stream() << buf;
        }
      } else {
        // Log-returns of the written prices reproduce scale * x (up to
        // rounding); MF-DFA exponents do not depend on the scale.
        for (double& v : x) v *= syn_scale;
        write_price_csv(out.stream(), cumulative_prices(ReturnSeries::from_values(std::move(x)),
                                                        100.0, default_start()));
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
