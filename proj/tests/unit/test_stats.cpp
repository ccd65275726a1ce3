#include <cmath>

#include "doctest.h"
#include "mfdfa/spectra.hpp"
#include "mfdfa/stats.hpp"
#include "mfdfa/synth.hpp"

using namespace mfdfa;

TEST_SUITE("stats") {
  TEST_CASE("alternating series is perfectly anti-correlated") {
    std::vector<double> x(100);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? 1.0 : -1.0;
    const auto c = autocorrelation(ReturnSeries::from_values(x), 4);
    CHECK(c.lags == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(c.c[0] == doctest::Approx(-1.0));
    CHECK(c.c[1] == doctest::Approx(1.0));
    CHECK(autocorrelation(ReturnSeries::from_values(x), 3, 0).c[0] == doctest::Approx(1.0));
  }

  TEST_CASE("autocorrelation follows its definition") {
    const auto x = normalize(ReturnSeries::from_values(white_noise(400, 9)));
    const auto c = autocorrelation(x, 100);
    for (std::size_t s : {1, 7, 100}) {
      double acc = 0;
      for (std::size_t i = 0; i + s < 400; ++i) acc += x.values()[i] * x.values()[i + s];
      CHECK(c.c[s - 1] == doctest::Approx(acc / (400 - s)).epsilon(1e-12));
    }
    for (double v : c.c) CHECK(std::abs(v) <= 1 + 1e-9);
  }

  TEST_CASE("autocorrelation preconditions") {
    const auto raw = ReturnSeries::from_values(white_noise(400, 9));
    CHECK_THROWS(autocorrelation(raw, 10));
    const auto x = normalize(raw);
    CHECK_THROWS(autocorrelation(x, 101));
    CHECK_NOTHROW(autocorrelation(x, 100));
  }

  TEST_CASE("white noise is uncorrelated") {
    const std::size_t n = 10000;
    const auto c = autocorrelation(normalize(ReturnSeries::from_values(white_noise(n, 21))), 50);
    std::size_t inside = 0;
    for (double v : c.c) inside += std::abs(v) < 3 / std::sqrt(double(n));
    CHECK(inside >= 48);
  }

  TEST_CASE("exponentially correlated noise decays exponentially") {
    const double phi = 0.8;
    const auto x = normalize(ReturnSeries::from_values(exponential_correlated_noise(1 << 17, phi, 3)));
    const auto c = autocorrelation(x, 12);
    std::vector<double> s, lc;
    for (std::size_t i = 0; i < c.c.size(); ++i) {
      s.push_back(double(c.lags[i]));
      lc.push_back(std::log(c.c[i]));
    }
    const auto f = fit_line(s, lc);
    CHECK(f.r2 > 0.99);
    CHECK(f.slope == doctest::Approx(std::log(phi)).epsilon(0.1));
  }

  TEST_CASE("ccdf construction") {
    const auto p = empirical_ccdf(normalize(ReturnSeries::from_values({3, 1, 2})));
    REQUIRE(p.size() == 3);
    CHECK(p[0].probability == doctest::Approx(1.0 / 3));
    CHECK(p[1].probability == doctest::Approx(2.0 / 3));
    CHECK(p[2].probability == doctest::Approx(1.0));
    // |x| after normalising is {sqrt(1.5), sqrt(1.5), 0}.
    CHECK(p[0].value == doctest::Approx(std::sqrt(1.5)));
    CHECK(p[1].value == doctest::Approx(std::sqrt(1.5)));
    CHECK(p[2].value == doctest::Approx(0.0).scale(1));
    const auto q = empirical_ccdf(normalize(ReturnSeries::from_values(white_noise(1000, 2))));
    for (std::size_t i = 1; i < q.size(); ++i) {
      CHECK(q[i].value < q[i - 1].value);
      CHECK(q[i].probability > q[i - 1].probability);
    }
    CHECK(q.back().probability == 1.0);
  }

  TEST_CASE("exact power-law ccdf") {
    std::vector<CcdfPoint> pts;
    for (int i = 0; i < 200; ++i) {
      const double x = std::pow(10.0, 3.0 - 3.0 * i / 199.0);
      pts.push_back({x, std::pow(x, -3.0)});
    }
    const auto f = tail_exponent(pts, 1.0);
    CHECK(f.zeta == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.zeta_err <= 1e-10);
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.power_law);
    CHECK(f.method == TailMethod::ccdf_ols);
    CHECK(to_string(f.method) == "ccdf-ols");
  }

  TEST_CASE("pareto tail index") {
    const auto ccdf = empirical_ccdf(normalize(ReturnSeries::from_values(symmetric_pareto(50000, 3.0, 17))));
    const auto f = tail_exponent(ccdf, 0.05);
    CHECK(f.zeta == doctest::Approx(3.0).epsilon(0.1));
    CHECK(f.n_tail == 2500);
    // Hill and OLS agree within two combined standard errors.
    CHECK(std::abs(f.zeta - f.hill_zeta) <= 2 * std::hypot(f.zeta_err, f.hill_err));
  }

  TEST_CASE("gaussian tails are steep and flagged") {
    const auto ccdf = empirical_ccdf(normalize(ReturnSeries::from_values(white_noise(50000, 5))));
    const auto f = tail_exponent(ccdf, 0.05);
    CHECK(f.zeta > 5);
    MESSAGE("gaussian tail r2 = " << f.r2 << ", zeta_err = " << f.zeta_err);
    CHECK(f.r2 < kPowerLawR2);
    CHECK_FALSE(f.power_law);
  }

  TEST_CASE("tail preconditions") {
    const auto ccdf = empirical_ccdf(normalize(ReturnSeries::from_values(white_noise(300, 5))));
    CHECK_THROWS(tail_exponent(ccdf, 0.05));  // 15 points
    CHECK_THROWS(tail_exponent(ccdf, 0.0));
    CHECK_THROWS(tail_exponent(ccdf, 1.5));
    std::vector<CcdfPoint> zeros(30, CcdfPoint{0.0, 1.0});
    CHECK_THROWS(tail_exponent(zeros, 1.0));
  }

  TEST_CASE("hill estimator on exact order statistics") {
    // Values x_(i) = (N / i)^{1/3}: the Hill estimate is close to 3.
    std::vector<CcdfPoint> pts;
    const double n = 100000;
    for (int i = 1; i <= 100000; ++i) pts.push_back({std::cbrt(n / i), i / n});
    const auto [zeta, err] = hill_estimator(pts, 1000);
    CHECK(zeta == doctest::Approx(3.0).epsilon(0.01));
    CHECK(err == doctest::Approx(zeta / std::sqrt(1000.0)));
  }

  TEST_CASE("tables") {
    const auto t = ccdf_table({{2, 0.5}, {1, 1}});
    CHECK(t.names == std::vector<std::string>{"value", "probability"});
    AcfResult a{{1, 2}, {0.5, 0.25}};
    CHECK(acf_table(a).names == std::vector<std::string>{"lag", "c"});
  }
}
