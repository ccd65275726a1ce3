#include "mfdfa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"
#include "mfdfa/parallel.hpp"
#include "mfdfa/surrogate.hpp"
#include "mfdfa/svg.hpp"

namespace mfdfa {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// configuration

void AnalysisConfig::validate() const {
  if (order < 0 || order > 8) throw ConfigError("order must lie in [0, 8]");
  if (!(q_step > 0.0) || !(q_max > q_min)) throw ConfigError("q range needs q_max > q_min, step > 0");
  try {
    const auto grid = make_q_grid(q_min, q_max, q_step);
    if (std::find(grid.begin(), grid.end(), 0.0) == grid.end() ||
        std::find(grid.begin(), grid.end(), 2.0) == grid.end())
      throw ConfigError("q grid must contain 0 and 2");
    if (grid.size() < 8) throw ConfigError("q grid needs at least 8 points");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_scales < 2) throw ConfigError("n_scales must be >= 2");
  if ((fit_lo == 0) != (fit_hi == 0)) throw ConfigError("set both fit_lo and fit_hi, or neither");
  if (fit_lo != 0 && !(fit_lo < fit_hi)) throw ConfigError("fit_lo must be < fit_hi");
  if (ensemble_n < 1) throw ConfigError("ensemble_n must be >= 1");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("tail_fraction must lie in (0, 1]");
  if (window_r < 1) throw ConfigError("window_r must be >= 1");
  if (max_lag < 1) throw ConfigError("max_lag must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

namespace {

Json config_json(const AnalysisConfig& c) {
  Json periods = Json::array();
  for (const auto& p : c.periods)
    periods.push_back({{"name", p.name},
                       {"start", format_iso_date(p.start)},
                       {"end", format_iso_date(p.end)}});
  // Execution details (jobs, output_dir) are left out: they do not change
  // the analysis and would make otherwise identical reports differ.
  return Json{{"inputs", c.inputs},       {"periods", periods},
              {"order", c.order},         {"q_min", c.q_min},
              {"q_max", c.q_max},         {"q_step", c.q_step},
              {"s_min", c.s_min},         {"s_max", c.s_max},
              {"n_scales", c.n_scales},   {"fit_lo", c.fit_lo},
              {"fit_hi", c.fit_hi},       {"ensemble_n", c.ensemble_n},
              {"seed", c.seed},           {"tail_fraction", c.tail_fraction},
              {"window_r", c.window_r},   {"max_lag", c.max_lag},
              {"weighted_fit", c.weighted_fit}, {"svg", c.svg}};
}

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

AnalysisConfig config_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("schema_version") && j.contains("config")) j = j["config"];
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "inputs",   "periods",  "order",      "q_min",         "q_max",      "q_step",
      "s_min",    "s_max",    "n_scales",   "fit_lo",        "fit_hi",     "ensemble_n",
      "seed",     "tail_fraction", "window_r", "max_lag",     "weighted_fit", "output_dir",
      "jobs",     "svg"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config field '" + key + "'");

  AnalysisConfig c;
  read_field(j, "inputs", c.inputs);
  read_field(j, "order", c.order);
  read_field(j, "q_min", c.q_min);
  read_field(j, "q_max", c.q_max);
  read_field(j, "q_step", c.q_step);
  read_field(j, "s_min", c.s_min);
  read_field(j, "s_max", c.s_max);
  read_field(j, "n_scales", c.n_scales);
  read_field(j, "fit_lo", c.fit_lo);
  read_field(j, "fit_hi", c.fit_hi);
  read_field(j, "ensemble_n", c.ensemble_n);
  read_field(j, "seed", c.seed);
  read_field(j, "tail_fraction", c.tail_fraction);
  read_field(j, "window_r", c.window_r);
  read_field(j, "max_lag", c.max_lag);
  read_field(j, "weighted_fit", c.weighted_fit);
  read_field(j, "output_dir", c.output_dir);
  read_field(j, "jobs", c.jobs);
  read_field(j, "svg", c.svg);
  if (j.contains("periods")) {
    if (!j["periods"].is_array()) throw ConfigError("periods must be an array");
    for (const auto& p : j["periods"]) {
      try {
        auto start = parse_iso_date(p.at("start").get<std::string>());
        auto end = parse_iso_date(p.at("end").get<std::string>());
        if (!start || !end) throw ConfigError("period has a malformed date");
        c.periods.emplace_back(*start, *end, p.at("name").get<std::string>());
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw ConfigError(std::string("bad period entry: ") + e.what());
      }
    }
  }
  return c;
}

std::string config_to_json(const AnalysisConfig& cfg) { return config_json(cfg).dump(2); }

std::vector<std::string> resolve_inputs(const AnalysisConfig& cfg) {
  std::vector<std::string> files;
  for (const auto& in : cfg.inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
          found.push_back(entry.path().string());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(in, ec)) {
      files.push_back(in);
    } else {
      throw ConfigError("input not found: " + in);
    }
  }
  if (files.empty()) throw ConfigError("no inputs: no CSV files were found");
  return files;
}

// ---------------------------------------------------------------------------
// pipeline

std::vector<std::string> AnalysisReport::errors() const {
  std::vector<std::string> out;
  for (const auto& s : series) {
    if (!s.error.empty()) out.push_back(s.label + ": " + s.error);
    for (const auto& p : s.periods) {
      if (!p.error.empty()) out.push_back(s.label + "/" + p.name + ": " + p.error);
      for (const auto& v : p.variants)
        if (!v.error.empty())
          out.push_back(s.label + "/" + p.name + "/" + v.variant + ": " + v.error);
    }
  }
  return out;
}

int exit_code(const AnalysisReport& report) { return report.ok() ? 0 : 1; }

namespace {

enum class Variant { original, shuffled, surrogate };
constexpr Variant kVariants[] = {Variant::original, Variant::shuffled, Variant::surrogate};

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::original: return "original";
    case Variant::shuffled: return "shuffled";
    default: return "surrogate";
  }
}

void append_error(VariantReport& r, const std::string& stage, const std::exception& e) {
  if (!r.error.empty()) r.error += "; ";
  r.error += stage + ": " + e.what();
}

AcfSummary acf_summary(const ReturnSeries& r, const AnalysisConfig& cfg) {
  const std::size_t n = r.size();
  std::size_t lag = std::min(cfg.max_lag, n / 4);
  if (cfg.window_r > 1) lag = std::min(lag, (n / cfg.window_r) / 4);
  if (lag < 1) throw std::invalid_argument("series too short for the autocorrelation window");
  AcfSummary s;
  s.window_r = cfg.window_r;
  s.returns = autocorrelation(normalize(r), lag);
  s.window_max = autocorrelation(normalize(window_extrema(r, cfg.window_r, ExtremumMode::max)), lag);
  s.window_min = autocorrelation(normalize(window_extrema(r, cfg.window_r, ExtremumMode::min)), lag);
  return s;
}

VariantReport compute_variant(const ReturnSeries& r, Variant v, const AnalysisConfig& cfg,
                              const MfdfaConfig& mcfg, const FitRange& range) {
  VariantReport out;
  out.variant = variant_name(v);
  ReturnSeries sample = r;
  try {
    if (v == Variant::original) {
      out.surface = fluctuation_surface(r, mcfg);
      out.hurst = hurst_spectrum(out.surface, range);
    } else {
      EnsembleSpec spec;
      spec.n_realizations = cfg.ensemble_n;
      spec.method = v == Variant::shuffled ? SurrogateMethod::shuffle : SurrogateMethod::aaft;
      spec.base_seed = cfg.seed;
      auto ens = run_ensemble(r, spec, mcfg, range);
      out.surface = std::move(ens.mean_surface);
      out.hurst = std::move(ens.hurst);
      out.seeds = std::move(ens.seeds);
      out.excluded_realizations = out.hurst.excluded_realizations;
      for (auto& f : ens.failures) out.warnings.push_back("excluded realisation " + f);
      sample = make_surrogate(r, spec.method, cfg.seed);
    }
    for (const auto& w : out.surface.warnings) out.warnings.push_back(w);
    out.tau = tau_from_h(out.hurst);
    out.singularity = singularity_spectrum(out.tau);
  } catch (const std::exception& e) {
    append_error(out, "mfdfa", e);
    return out;
  }
  try {
    GbmFitOptions opt;
    opt.weighted = cfg.weighted_fit;
    out.gbm = fit_gbm(out.hurst, opt);
    for (const auto& w : out.gbm->warnings) out.warnings.push_back("gbm: " + w);
  } catch (const std::exception& e) {
    append_error(out, "gbm", e);
  }
  try {
    out.ccdf = empirical_ccdf(normalize(sample));
    out.tail = tail_exponent(out.ccdf, cfg.tail_fraction);
  } catch (const std::exception& e) {
    append_error(out, "tail", e);
  }
  try {
    out.acf = acf_summary(sample, cfg);
  } catch (const std::exception& e) {
    append_error(out, "acf", e);
  }
  return out;
}

}  // namespace

AnalysisReport run_pipeline(const AnalysisConfig& cfg) {
  cfg.validate();
  const auto files = resolve_inputs(cfg);
  AnalysisReport report;
  report.config = cfg;

  struct Block {
    std::size_t series, period, variant;
    ReturnSeries returns;
    MfdfaConfig mcfg;
    FitRange range;
  };
  std::vector<Block> blocks;
  const auto q_grid = make_q_grid(cfg.q_min, cfg.q_max, cfg.q_step);

  for (const auto& file : files) {
    SeriesReport sr;
    sr.source = file;
    std::optional<ReturnSeries> returns;
    try {
      const auto prices = load_price_csv_file(file);
      sr.label = prices.label();
      sr.n_prices = prices.size();
      returns = log_returns(prices);
    } catch (const std::exception& e) {
      sr.label = fs::path(file).stem().string();
      sr.error = e.what();
    }
    if (returns) {
      std::vector<AnalysisPeriod> periods = cfg.periods;
      if (periods.empty() && returns->size() >= 2)
        periods.emplace_back(returns->dates().front(), returns->dates().back(), "full");
      for (const auto& period : periods) {
        PeriodReport pr;
        pr.name = period.name;
        pr.start = format_iso_date(period.start);
        pr.end = format_iso_date(period.end);
        try {
          auto sliced = slice_period(*returns, period);
          pr.n_returns = sliced.size();
          MfdfaConfig mcfg;
          mcfg.detrend_order = cfg.order;
          mcfg.q_grid = q_grid;
          mcfg.seed = cfg.seed;
          mcfg.scale_grid = make_scale_grid(sliced.size(), cfg.order, cfg.s_min, cfg.s_max,
                                            cfg.n_scales);
          mcfg.validate(sliced.size());
          pr.fit_range = cfg.fit_lo ? FitRange{cfg.fit_lo, cfg.fit_hi}
                                    : default_fit_range(sliced.size());
          for (std::size_t v = 0; v < std::size(kVariants); ++v)
            blocks.push_back({report.series.size(), sr.periods.size(), v, sliced, mcfg,
                              pr.fit_range});
          pr.variants.resize(std::size(kVariants));
        } catch (const std::exception& e) {
          pr.error = e.what();
        }
        sr.periods.push_back(std::move(pr));
      }
    }
    report.series.push_back(std::move(sr));
  }

  parallel_for(blocks.size(), cfg.jobs, [&](std::size_t i) {
    const Block& b = blocks[i];
    auto result = compute_variant(b.returns, kVariants[b.variant], cfg, b.mcfg, b.range);
    report.series[b.series].periods[b.period].variants[b.variant] = std::move(result);
  });
  return report;
}

// ---------------------------------------------------------------------------
// serialisation

namespace {

Json tail_json(const TailFit& t) {
  return Json{{"zeta", t.zeta},       {"zeta_err", t.zeta_err},   {"method", to_string(t.method)},
              {"r2", t.r2},           {"power_law", t.power_law}, {"tail_fraction", t.tail_fraction},
              {"n_tail", t.n_tail},   {"hill_zeta", t.hill_zeta}, {"hill_err", t.hill_err}};
}

Json acf_series_json(const AcfResult& a) { return Json(a.c); }

Json variant_json(const VariantReport& v) {
  Json j;
  j["status"] = v.ok() ? "ok" : "error";
  if (!v.ok()) j["error"] = v.error;
  Json hurst = Json::array(), tau = Json::array(), sing = Json::array();
  for (std::size_t i = 0; i < v.hurst.q_grid.size(); ++i)
    hurst.push_back({{"q", v.hurst.q_grid[i]},
                     {"h", v.hurst.h[i]},
                     {"h_err", v.hurst.h_err[i]},
                     {"r2", v.hurst.r2[i]}});
  for (std::size_t i = 0; i < v.tau.q_grid.size(); ++i)
    tau.push_back({{"q", v.tau.q_grid[i]}, {"tau", v.tau.tau[i]}, {"tau_err", v.tau.tau_err[i]}});
  for (const auto& p : v.singularity.points)
    sing.push_back({{"q", p.q}, {"alpha", p.alpha}, {"f", p.f}});
  j["hurst"] = std::move(hurst);
  j["tau"] = std::move(tau);
  j["singularity"] = std::move(sing);
  if (!v.hurst.q_grid.empty()) {
    j["fit_range"] = {{"lo", v.hurst.fit_range.lo}, {"hi", v.hurst.fit_range.hi}};
    j["scales_used"] = v.hurst.scales_used;
    j["delta_alpha"] = v.singularity.width_at_zero.width;
    j["monofractal"] = v.singularity.width_at_zero.monofractal;
  }
  if (v.gbm) {
    const auto& g = *v.gbm;
    j["gbm"] = {{"a", g.params.a},
                {"a_err", g.a_err},
                {"b", g.params.b},
                {"b_err", g.b_err},
                {"delta_alpha", g.delta_alpha},
                {"delta_alpha_err", g.delta_alpha_err},
                {"rss", g.rss},
                {"accepted", g.accepted},
                {"monofractal", g.monofractal},
                {"n_points", g.n_points}};
  } else {
    j["gbm"] = nullptr;
  }
  j["tail"] = v.tail ? tail_json(*v.tail) : Json(nullptr);
  if (v.acf) {
    const auto& a = *v.acf;
    Json acf{{"max_lag", a.returns.lags.empty() ? 0 : a.returns.lags.back()},
             {"window_r", a.window_r},
             {"returns", acf_series_json(a.returns)},
             {"window_max", acf_series_json(a.window_max)},
             {"window_min", acf_series_json(a.window_min)}};
    if (!v.hurst.q_grid.empty()) {
      // Correlation exponent implied by h(2) through H = 1 - gamma / 2, with
      // C(s) ~ s^{-gamma} (decaying convention).
      const double h2 = v.hurst.at(2.0);
      acf["gamma_from_h2"] = 2.0 - 2.0 * h2;
    }
    j["acf"] = std::move(acf);
  } else {
    j["acf"] = nullptr;
  }
  j["seeds"] = v.seeds;
  j["excluded_realizations"] = v.excluded_realizations;
  j["excluded_scales"] = v.surface.excluded_scales;
  j["warnings"] = v.warnings;
  return j;
}

}  // namespace

std::string report_to_json(const AnalysisReport& report) {
  Json root;
  root["schema_version"] = kSchemaVersion;
  root["toolkit_version"] = kToolkitVersion;
  root["config"] = config_json(report.config);
  Json series = Json::array();
  for (const auto& s : report.series) {
    Json sj{{"label", s.label}, {"source", s.source}, {"n_prices", s.n_prices}};
    if (!s.error.empty()) sj["error"] = s.error;
    Json periods = Json::array();
    for (const auto& p : s.periods) {
      Json pj{{"name", p.name}, {"start", p.start}, {"end", p.end}, {"n_returns", p.n_returns}};
      if (!p.error.empty()) {
        pj["error"] = p.error;
      } else {
        pj["fit_range"] = {{"lo", p.fit_range.lo}, {"hi", p.fit_range.hi}};
        Json variants = Json::object();
        for (const auto& v : p.variants) variants[v.variant] = variant_json(v);
        pj["variants"] = std::move(variants);
      }
      periods.push_back(std::move(pj));
    }
    sj["periods"] = std::move(periods);
    series.push_back(std::move(sj));
  }
  root["series"] = std::move(series);
  root["errors"] = report.errors();
  return root.dump(2) + "\n";
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out.empty() ? "series" : out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string tsv_text(const TsvTable& t, const std::vector<std::string>& ints = {}) {
  std::ostringstream s;
  write_tsv(s, t, ints);
  return s.str();
}

std::vector<double> column(const std::vector<double>& q, const std::function<double(double)>& f) {
  std::vector<double> out;
  for (double v : q) out.push_back(f(v));
  return out;
}

}  // namespace

std::vector<fs::path> emit_plot_data(const AnalysisReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
  std::vector<fs::path> written;
  auto emit = [&](const std::string& stem, const std::string& quantity, const std::string& ext,
                  const std::string& text) {
    const fs::path path = dir / (stem + "_" + quantity + ext);
    write_text(path, text);
    written.push_back(path);
  };

  for (const auto& s : report.series) {
    for (const auto& p : s.periods) {
      for (const auto& v : p.variants) {
        if (v.hurst.q_grid.empty()) continue;
        const std::string stem = sanitize(s.label) + "_" + sanitize(p.name) + "_" + v.variant;
        const bool overlay = v.gbm && v.gbm->accepted;
        const auto& q = v.hurst.q_grid;

        emit(stem, "ccdf", ".tsv", tsv_text(ccdf_table(v.ccdf)));

        TsvTable acf;
        if (v.acf) {
          acf = acf_table(v.acf->returns);
          acf.add("c_max", v.acf->window_max.c);
          acf.add("c_min", v.acf->window_min.c);
        } else {
          acf.add("lag", {});
          acf.add("c", {});
          acf.add("c_max", {});
          acf.add("c_min", {});
        }
        emit(stem, "acf", ".tsv", tsv_text(acf, {"lag"}));

        std::ostringstream surf;
        write_surface_tsv(surf, v.surface);
        emit(stem, "fluctuation", ".tsv", surf.str());

        TsvTable hurst = hurst_table(v.hurst);
        TsvTable tau = tau_table(v.tau);
        TsvTable sing = singularity_table(v.singularity);
        if (overlay) {
          const GbmParams g = v.gbm->params;
          hurst.add("h_gbm", column(q, [&](double x) { return gbm_h(x, g); }));
          tau.add("tau_gbm", column(q, [&](double x) { return gbm_tau(x, g); }));
          sing.add("alpha_gbm", column(q, [&](double x) { return gbm_alpha(x, g); }));
          sing.add("f_gbm", column(q, [&](double x) { return gbm_f(x, g); }));
        }
        emit(stem, "hurst", ".tsv", tsv_text(hurst));
        emit(stem, "tau", ".tsv", tsv_text(tau));
        emit(stem, "singularity", ".tsv", tsv_text(sing));

        if (report.config.svg) {
          const std::string title = s.label + " " + p.name + " " + v.variant;
          std::vector<SvgLine> lines{{"h(q)", q, v.hurst.h, false}};
          if (overlay) lines.push_back({"GBM", q, hurst.columns[4], true});
          emit(stem, "hurst", ".svg", svg_line_chart(title, "q", "h(q)", lines));
          lines = {{"tau(q)", q, v.tau.tau, false}};
          if (overlay) lines.push_back({"GBM", q, tau.columns[3], true});
          emit(stem, "tau", ".svg", svg_line_chart(title, "q", "tau(q)", lines));
          lines = {{"f(alpha)", sing.columns[1], sing.columns[2], false}};
          if (overlay) lines.push_back({"GBM", sing.columns[3], sing.columns[4], true});
          emit(stem, "singularity", ".svg", svg_line_chart(title, "alpha", "f(alpha)", lines));
          lines.clear();
          for (double qq : {-10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0}) {
            const auto it = std::find(q.begin(), q.end(), qq);
            if (it == q.end()) continue;
            const auto iq = static_cast<std::size_t>(it - q.begin());
            SvgLine line{"q=" + format_q(qq), {}, {}, false};
            for (std::size_t is = 0; is < v.surface.scale_grid.size(); ++is) {
              line.x.push_back(std::log10(static_cast<double>(v.surface.scale_grid[is])));
              line.y.push_back(std::log10(v.surface.values[iq][is]));
            }
            lines.push_back(std::move(line));
          }
          emit(stem, "fluctuation", ".svg", svg_line_chart(title, "log10 s", "log10 F_q(s)", lines));
        }
      }
    }
  }
  return written;
}

std::vector<fs::path> write_outputs(const AnalysisReport& report, const fs::path& dir) {
  auto written = emit_plot_data(report, dir);
  const fs::path json = dir / "report.json";
  write_text(json, report_to_json(report));
  written.push_back(json);
  return written;
}

}  // namespace mfdfa
