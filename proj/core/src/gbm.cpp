#include "mfdfa/gbm.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace mfdfa {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// ln cosh(x) without overflow for large |x|.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - kLn2;
}

// ln(a^q + b^q) = q m + ln 2 + ln cosh(q d / 2) with m the mean log and d the
// log ratio; this form is exact at q = 0 and free of cancellation near it.
struct LogPair {
  double mean;
  double half_diff;
  explicit LogPair(const GbmParams& p)
      : mean(0.5 * (std::log(p.a) + std::log(p.b))),
        half_diff(0.5 * (std::log(p.a) - std::log(p.b))) {}
};

}  // namespace

GbmParams::GbmParams(double a_, double b_) : a(a_), b(b_) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("GBM parameters must be positive and finite");
}

GbmParams GbmParams::canonical() const { return a <= b ? *this : GbmParams(b, a); }

std::vector<double> gbm_series(const GbmParams& params, unsigned n_max) {
  if (n_max > kGbmMaxLevels)
    throw std::invalid_argument("gbm_series: n_max must be <= " + std::to_string(kGbmMaxLevels));
  std::vector<double> level(n_max + 1);
  for (unsigned j = 0; j <= n_max; ++j)
    level[j] = std::pow(params.a, static_cast<double>(j)) *
               std::pow(params.b, static_cast<double>(n_max - j));
  const std::size_t n = std::size_t{1} << n_max;
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = level[static_cast<unsigned>(std::popcount(k))];
  return x;
}

double gbm_h(double q, const GbmParams& params) {
  const LogPair lp(params);
  if (q == 0.0) return -lp.mean / kLn2;
  return -lp.mean / kLn2 - log_cosh(q * lp.half_diff) / (q * kLn2);
}

double gbm_tau(double q, const GbmParams& params) {
  const LogPair lp(params);
  return -(q * lp.mean + kLn2 + log_cosh(q * lp.half_diff)) / kLn2;
}

double gbm_alpha(double q, const GbmParams& params) {
  const LogPair lp(params);
  return -(lp.mean + lp.half_diff * std::tanh(q * lp.half_diff)) / kLn2;
}

double gbm_f(double q, const GbmParams& params) {
  return q * gbm_alpha(q, params) - gbm_tau(q, params);
}

double delta_alpha(const GbmParams& params) {
  return std::abs(std::log(params.a) - std::log(params.b)) / kLn2;
}

SingularitySpectrum gbm_singularity_spectrum(const GbmParams& params,
                                             const std::vector<double>& q_grid) {
  if (q_grid.size() < 3) throw std::invalid_argument("need at least 3 q values");
  SingularitySpectrum ss;
  for (double q : q_grid) ss.points.push_back({gbm_alpha(q, params), gbm_f(q, params), q});
  ss.width_at_zero = spectrum_width(ss);
  return ss;
}

namespace {

class Objective {
 public:
  Objective(const HurstSpectrum& h, const GbmFitOptions& opt) : h_(h), opt_(opt) {
    weights_.assign(h.q_grid.size(), 1.0);
    if (opt.weighted) {
      double floor = 0.0;
      for (double e : h.h_err) floor = std::max(floor, e);
      floor = std::max(floor * 1e-6, 1e-12);
      double sum = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double e = std::max(h.h_err[i], floor);
        weights_[i] = 1.0 / (e * e);
        sum += weights_[i];
      }
      for (double& w : weights_) w *= static_cast<double>(weights_.size()) / sum;
    }
  }

  bool in_domain(double a, double b) const {
    return a >= opt_.domain_lo && a <= opt_.domain_hi && b >= opt_.domain_lo &&
           b <= opt_.domain_hi;
  }

  double operator()(double a, double b) const {
    if (!in_domain(a, b)) return std::numeric_limits<double>::infinity();
    return weighted_sum(a, b, weights_);
  }

  double rss(double a, double b) const {
    return weighted_sum(a, b, std::vector<double>(h_.q_grid.size(), 1.0));
  }

 private:
  double weighted_sum(double a, double b, const std::vector<double>& w) const {
    const GbmParams p(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < h_.q_grid.size(); ++i) {
      const double r = h_.h[i] - gbm_h(h_.q_grid[i], p);
      acc += w[i] * r * r;
    }
    return acc;
  }

  const HurstSpectrum& h_;
  const GbmFitOptions& opt_;
  std::vector<double> weights_;
};

struct Vertex {
  std::array<double, 2> x;
  double f;
};

// Nelder-Mead on two parameters. Returns the number of iterations used.
std::size_t nelder_mead(const Objective& obj, std::array<Vertex, 3>& simplex, double tol,
                        std::size_t max_iter) {
  auto eval = [&](std::array<double, 2> x) { return Vertex{x, obj(x[0], x[1])}; };
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& l, const Vertex& r) { return l.f < r.f; });
  };
  order();
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool converged = true;
    for (int d = 0; d < 2; ++d) {
      const double ref = std::max(std::abs(simplex[0].x[d]), 1e-12);
      for (int v = 1; v < 3; ++v)
        if (std::abs(simplex[v].x[d] - simplex[0].x[d]) > tol * ref) converged = false;
    }
    if (converged) return it;

    std::array<double, 2> centroid{};
    for (int d = 0; d < 2; ++d) centroid[d] = 0.5 * (simplex[0].x[d] + simplex[1].x[d]);
    auto along = [&](double t) {
      return std::array<double, 2>{centroid[0] + t * (simplex[2].x[0] - centroid[0]),
                                   centroid[1] + t * (simplex[2].x[1] - centroid[1])};
    };
    const Vertex reflected = eval(along(-1.0));
    if (reflected.f < simplex[0].f) {
      const Vertex expanded = eval(along(-2.0));
      simplex[2] = expanded.f < reflected.f ? expanded : reflected;
    } else if (reflected.f < simplex[1].f) {
      simplex[2] = reflected;
    } else {
      const bool outside = reflected.f < simplex[2].f;
      const Vertex contracted = eval(along(outside ? -0.5 : 0.5));
      if (contracted.f < (outside ? reflected.f : simplex[2].f)) {
        simplex[2] = contracted;
      } else {
        for (int v = 1; v < 3; ++v) {
          std::array<double, 2> x{};
          for (int d = 0; d < 2; ++d)
            x[d] = simplex[0].x[d] + 0.5 * (simplex[v].x[d] - simplex[0].x[d]);
          simplex[v] = eval(x);
        }
      }
    }
    order();
  }
  return max_iter;
}

// Covariance of (a, b) from the curvature of the objective at the optimum:
// cov = 2 sigma^2 H^{-1}, sigma^2 = S / (n - 2).
std::array<double, 2> parameter_errors(const Objective& obj, double a, double b, double s,
                                       std::size_t n) {
  const double ha = 1e-4 * a, hb = 1e-4 * b;
  auto f = [&](double x, double y) { return obj.rss(x, y); };
  const double f0 = f(a, b);
  const double haa = (f(a + ha, b) - 2.0 * f0 + f(a - ha, b)) / (ha * ha);
  const double hbb = (f(a, b + hb) - 2.0 * f0 + f(a, b - hb)) / (hb * hb);
  const double hab = (f(a + ha, b + hb) - f(a + ha, b - hb) - f(a - ha, b + hb) +
                      f(a - ha, b - hb)) /
                     (4.0 * ha * hb);
  const double sigma2 = n > 2 ? s / static_cast<double>(n - 2) : 0.0;
  const double det = haa * hbb - hab * hab;
  if (haa > 0.0 && hbb > 0.0 && det > 1e-12 * haa * hbb) {
    return {std::sqrt(std::max(0.0, 2.0 * sigma2 * hbb / det)),
            std::sqrt(std::max(0.0, 2.0 * sigma2 * haa / det))};
  }
  // Flat direction (a == b ridge): fall back to the marginal curvatures.
  return {haa > 0.0 ? std::sqrt(2.0 * sigma2 / haa) : 0.0,
          hbb > 0.0 ? std::sqrt(2.0 * sigma2 / hbb) : 0.0};
}

}  // namespace

GbmFitResult fit_gbm(const HurstSpectrum& h, const GbmFitOptions& options) {
  const std::size_t n = h.q_grid.size();
  if (n < 8 || h.h.size() != n) throw std::invalid_argument("fit_gbm: need at least 8 q points");
  const bool has_neg = std::any_of(h.q_grid.begin(), h.q_grid.end(), [](double q) { return q < 0; });
  const bool has_pos = std::any_of(h.q_grid.begin(), h.q_grid.end(), [](double q) { return q > 0; });
  if (!has_neg || !has_pos)
    throw std::invalid_argument("fit_gbm: q grid must span negative and positive values");

  const Objective objective(h, options);

  // Coarse grid over the open domain, a <= b; the first minimum wins, which
  // breaks ties toward the lowest a, then the lowest b.
  const auto steps = static_cast<int>(
      std::llround((options.domain_hi - options.domain_lo) / options.grid_step));
  double best_f = std::numeric_limits<double>::infinity();
  double best_a = 0.0, best_b = 0.0;
  for (int i = 1; i < steps; ++i) {
    const double a = options.domain_lo + i * options.grid_step;
    for (int j = i; j < steps; ++j) {
      const double b = options.domain_lo + j * options.grid_step;
      const double f = objective(a, b);
      if (f < best_f) {
        best_f = f;
        best_a = a;
        best_b = b;
      }
    }
  }

  const double d = options.grid_step;
  std::array<Vertex, 3> simplex{Vertex{{best_a, best_b}, best_f},
                                Vertex{{best_a + d, best_b}, objective(best_a + d, best_b)},
                                Vertex{{best_a, best_b + d}, objective(best_a, best_b + d)}};
  std::size_t used = nelder_mead(objective, simplex, options.tolerance, options.max_iterations);
  // One restart around the converged point guards against a collapsed simplex.
  if (used < options.max_iterations) {
    const auto x = simplex[0].x;
    const double r = 10.0 * options.tolerance * std::max(x[0], x[1]) + 1e-6;
    simplex = {Vertex{x, objective(x[0], x[1])},
               Vertex{{x[0] + r, x[1]}, objective(x[0] + r, x[1])},
               Vertex{{x[0], x[1] + r}, objective(x[0], x[1] + r)}};
    used += nelder_mead(objective, simplex, options.tolerance, options.max_iterations - used);
  }
  if (used >= options.max_iterations)
    throw GbmFitError("GBM fit did not converge within " +
                      std::to_string(options.max_iterations) + " iterations");

  const double a = simplex[0].x[0], b = simplex[0].x[1];
  GbmFitResult result;
  result.params = GbmParams(a, b).canonical();
  result.iterations = used;
  result.n_points = n;
  result.rss = objective.rss(a, b);
  auto [ea, eb] = parameter_errors(objective, a, b, result.rss, n);
  if (a > b) std::swap(ea, eb);
  result.a_err = ea;
  result.b_err = eb;
  result.delta_alpha = delta_alpha(result.params);
  result.delta_alpha_err =
      std::hypot(result.a_err / result.params.a, result.b_err / result.params.b) / kLn2;
  result.accepted = result.rss / static_cast<double>(n) <= options.rejection_threshold;
  result.monofractal = result.delta_alpha < kMonofractalDeltaAlpha;
  const double edge = 1e-4;
  for (double v : {result.params.a, result.params.b})
    if (v - options.domain_lo < edge || options.domain_hi - v < edge)
      result.warnings.push_back("fitted parameter " + std::to_string(v) +
                                " lies on the search-domain boundary");
  if (!result.accepted)
    result.warnings.push_back("GBM cannot describe this series (rss/n = " +
                              std::to_string(result.rss / static_cast<double>(n)) + ")");
  return result;
}

}  // namespace mfdfa
