#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhd/decay_fit.hpp"

#include <cmath>

using namespace qhd;

namespace {

// Synthetic measures following exact power laws after t = 1.
std::vector<SnapshotMeasures> synthetic(double grad_rate, double amp_rate, double t_boundary = 1e9) {
  std::vector<SnapshotMeasures> m;
  for (int k = 0; k <= 200; ++k) {
    const double t = 0.1 * k;
    const double s = std::max(t, 1.0);
    SnapshotMeasures x;
    x.frame.t = t;
    x.frame.E = 1.0;
    x.grad_sqrt_rho_l2 = std::pow(s, grad_rate);
    x.kinetic_dispersion = std::pow(s, 2 * grad_rate);
    x.rho_gamma = std::pow(s, 2 * grad_rate);
    x.sqrt_rho_max = std::pow(s, amp_rate);
    x.rho_max = x.sqrt_rho_max * x.sqrt_rho_max;
    x.half_lambda_sq = 1.0 - 0.5 / (1.0 + t);
    x.frame.boundary_rho = t >= t_boundary ? 1.0 : 0.0;
    m.push_back(x);
  }
  return m;
}

}  // namespace

TEST_CASE("sigma") {
  CHECK(decay_sigma(1.5) == doctest::Approx(0.25));
  CHECK(decay_sigma(2.0) == doctest::Approx(0.5));
  CHECK(decay_sigma(3.0) == doctest::Approx(1.0));
  CHECK(decay_sigma(4.0) == doctest::Approx(1.0));
}

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<double> t, v;
  for (int k = 1; k <= 20; ++k) {
    t.push_back(k);
    v.push_back(3.0 * std::pow(k, -0.75));
  }
  const FitResult f = fit_decay(t, v, 2.0, 20.0);
  CHECK(f.slope == doctest::Approx(-0.75));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.samples == 19);
  CHECK(f.stderr_slope < 1e-12);
}

TEST_CASE("fit rejects thin or invalid windows") {
  std::vector<double> t{1, 2, 3, 4, 5}, v{1, 1, 1, 1, 1};
  CHECK_THROWS_AS(fit_decay(t, v, 1.0, 5.0), std::invalid_argument);
  std::vector<double> t0{0, 1, 2, 3, 4, 5, 6, 7, 8}, v0(9, 1.0);
  CHECK_THROWS_AS(fit_decay(t0, v0, 0.0, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay(t0, std::vector<double>(3, 1.0), 1.0, 8.0), std::invalid_argument);
}

TEST_CASE("window from amplitude drop and boundary arrival") {
  const auto m = synthetic(-0.5, -0.5, 15.0);
  const DecayWindow w = decay_window(m, {});
  // 0.7 = t^{-1/2} first reached at t = 2.1 on this sampling
  CHECK(w.t_lo == doctest::Approx(2.1));
  CHECK(w.t_hi == doctest::Approx(14.9));
  CHECK(w.boundary_time == doctest::Approx(15.0));
  CHECK_FALSE(w.inconclusive);
}

TEST_CASE("collapsed window is inconclusive") {
  const auto m = synthetic(-0.5, -0.5, 5.0);
  const DecayWindow w = decay_window(m, {});
  CHECK(w.inconclusive);
  CHECK(w.reason.find("collapsed") != std::string::npos);
  const DispersiveReport r = dispersive_suite(m, 2.0);
  for (const auto& q : r.quantities) CHECK(q.verdict == "inconclusive");
}

TEST_CASE("verdicts against the sigma targets") {
  SUBCASE("consistent") {
    const DispersiveReport r = dispersive_suite(synthetic(-0.5, -0.25), 2.0);
    for (const auto& q : r.quantities) {
      CHECK(q.pass());
      CHECK(q.verdict == "consistent");
    }
    CHECK(r.quantities[0].fitted == doctest::Approx(-0.5));
  }
  SUBCASE("faster passes") {
    const DispersiveReport r = dispersive_suite(synthetic(-0.9, -0.25), 2.0);
    CHECK(r.quantities[0].verdict == "faster");
    CHECK(r.quantities[0].pass());
  }
  SUBCASE("slower fails") {
    const DispersiveReport r = dispersive_suite(synthetic(-0.2, -0.25), 2.0);
    CHECK(r.quantities[0].verdict == "slower");
    CHECK_FALSE(r.quantities[0].pass());
  }
}

TEST_CASE("explicit window and kinetic ratio") {
  DecayOptions o;
  o.t_lo = 2.0;
  o.t_hi = 10.0;
  const DispersiveReport r = dispersive_suite(synthetic(-0.5, -0.25), 2.0, o);
  CHECK(r.window.t_lo == 2.0);
  CHECK(r.window.t_hi == 10.0);
  CHECK(r.kinetic_ratio_end == doctest::Approx(1.0 - 0.5 / 11.0));
  CHECK(r.kinetic_monotone);
  CHECK(r.times.size() == r.kinetic_ratio.size());
}
