#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhd/functionals.hpp"
#include "qhd/lifting.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qhd;
using std::numbers::pi;

namespace {

// Positive density with Lambda = sqrt(rho) phi' for a periodic phi, so the
// circulation vanishes.
HydroState random_positive(const GridPtr& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double L = g->half_length();
  double a[3], c[3], b[3];
  for (int j = 0; j < 3; ++j) a[j] = 0.5 + 0.5 * u(rng), c[j] = 3 * u(rng), b[j] = u(rng);
  RealField s = sample_real(g, [&](double x) {
    double v = 0.3;
    for (int j = 0; j < 3; ++j) v += a[j] * std::exp(-(x - c[j]) * (x - c[j]));
    return v;
  });
  RealField lam(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double dphi = 0.0;
    for (int j = 0; j < 3; ++j) dphi += b[j] * (j + 1) * pi / L * std::cos((j + 1) * pi * g->x()[i] / L);
    lam[i] = s[i] * dphi;
  }
  return make_hydro_state(s, lam);
}

double roundtrip_error(const HydroState& h, double delta) {
  const HydroState back = polar_factorize(lift_h1(h, delta));
  double e = 0.0;
  for (std::size_t i = 0; i < h.sqrt_rho.size(); ++i) {
    if (h.mask[i]) continue;
    e = std::max(e, std::abs(back.sqrt_rho[i] - h.sqrt_rho[i]));
    e = std::max(e, std::abs(back.Lambda[i] - h.Lambda[i]));
  }
  return e;
}

HydroState abs_bump(std::size_t n, double right_scale = 1.0) {
  auto g = make_grid(10.0, n);
  return make_hydro_state(sample_real(g, [&](double x) {
                            return (x > 0 ? right_scale : 1.0) * std::abs(x) * std::exp(-x * x / 2);
                          }),
                          RealField(g));
}

}  // namespace

TEST_CASE("H1 lift keeps the modulus exactly") {
  auto g = make_grid(10.0, 256);
  std::mt19937 rng(1);
  const HydroState h = random_positive(g, rng);
  const ComplexField psi = lift_h1(h);
  for (std::size_t i = 0; i < psi.size(); ++i) CHECK(std::abs(psi[i]) == doctest::Approx(h.sqrt_rho[i]));
  CHECK(std::abs(circulation_defect(h, 1e-12)) < 1e-10);
}

TEST_CASE("H1 lift round trip, improving as delta shrinks") {
  auto g = make_grid(10.0, 256);
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const HydroState h = random_positive(g, rng);
    const double e4 = roundtrip_error(h, 1e-4), e6 = roundtrip_error(h, 1e-6), e8 = roundtrip_error(h, 1e-8);
    CHECK(e8 < 1e-7);
    CHECK(e6 < e4);
    CHECK(e8 < e6);
  }
}

TEST_CASE("uniform flow lifts to a plane wave up to O(delta)") {
  const double L = 10.0;
  auto g = make_grid(L, 128);
  const double k = 4 * pi / L;
  const HydroState h = make_hydro_state(sample_real(g, [](double) { return 1.0; }),
                                        sample_real(g, [&](double) { return k; }));
  for (double delta : {1e-6, 1e-10}) {
    const HydroState back = polar_factorize(lift_h1(h, delta));
    double e = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) e = std::max(e, std::abs(back.Lambda[i] - k));
    // the regularized phase velocity k / (1 + delta w)^2 is off by about 2 k delta
    CHECK(e <= 2.5 * k * delta);
  }
}

TEST_CASE("Gaussian with linear velocity") {
  auto g = make_grid(10.0, 256);
  const HydroState h = make_hydro_state(sample_real(g, [](double x) { return std::exp(-x * x / 2); }),
                                        sample_real(g, [](double x) { return x * std::exp(-x * x / 2); }));
  double prev = 1.0;
  for (double delta : {1e-4, 1e-6, 1e-8}) {
    const double e = roundtrip_error(h, delta);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("lift rejects bad input") {
  auto g = make_grid(10.0, 64);
  std::mt19937 rng(3);
  const HydroState h = random_positive(g, rng);
  CHECK_THROWS_AS(lift_h1(h, 0.0), std::invalid_argument);
  HydroState bad = h;
  bad.sqrt_rho[4] = NAN;
  CHECK_THROWS_AS(lift_h1(bad), std::domain_error);
}

TEST_CASE("H2 lift of the |x| bump recovers x exp(-x^2/2)") {
  const HydroState h = abs_bump(512);
  const LiftH2Result r = lift_h2(h, 2.0);
  REQUIRE(r.theta.size() == 2);
  CHECK(std::abs(std::abs(r.theta[0] - r.theta[1]) - pi) < 1e-6);
  // up to a global phase
  const auto x = h.grid()->x();
  std::size_t ref = 300;
  const complex phase = r.psi[ref] / (x[ref] * std::exp(-x[ref] * x[ref] / 2));
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    err = std::max(err, std::abs(r.psi[i] - phase * x[i] * std::exp(-x[i] * x[i] / 2)));
  CHECK(err < 1e-8);
  bool matched = false;
  for (const auto& j : r.junctions) matched |= j.matched;
  CHECK(matched);
}

TEST_CASE("H2 lift stays bounded under refinement, the naive lift does not") {
  std::vector<double> good, naive;
  for (std::size_t n : {256u, 512u, 1024u}) {
    const HydroState h = abs_bump(n);
    LiftOptions o;
    good.push_back(l2_norm(deriv(lift_h2(h, 2.0, o).psi, 2)));
    o.match_phases = false;
    naive.push_back(l2_norm(deriv(lift_h2(h, 2.0, o).psi, 2)));
  }
  CHECK(good[2] / good[0] == doctest::Approx(1.0).epsilon(0.1));
  // the corner makes psi_xx a discrete delta: L2 norm grows like dx^{-1/2}
  CHECK(naive[1] / naive[0] == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  CHECK(naive[2] / naive[1] == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("a jump of |psi_x| across the zero is rejected") {
  const HydroState h = abs_bump(256, 2.0);
  CHECK_THROWS_AS(lift_h2(h, 2.0), JunctionError);
  const GcpReport r = gcp_check(h, 2.0, 1e6);
  CHECK_FALSE(r.gcp_ok);
  CHECK_FALSE(r.junction_error.empty());
}

TEST_CASE("components separated by fat vacuum keep theta = 0") {
  auto g = make_grid(10.0, 256);
  const HydroState h = make_hydro_state(sample_real(g, [](double x) {
                                          return std::exp(-4 * (x - 4) * (x - 4)) + std::exp(-4 * (x + 4) * (x + 4));
                                        }),
                                        RealField(g));
  const LiftH2Result r = lift_h2(h, 2.0);
  for (double t : r.theta) CHECK(t == 0.0);
  for (const auto& j : r.junctions) {
    CHECK_FALSE(j.isolated);
    CHECK(j.note == "fat vacuum");
  }
}

TEST_CASE("junctions with vanishing psi_x fall below the conditioning floor") {
  auto g = make_grid(10.0, 256);
  const HydroState h = make_hydro_state(
      sample_real(g, [](double x) { return std::abs(x * x * x) * std::exp(-x * x / 2); }), RealField(g));
  // psi_x -> 0 at the zero; the one-sided extrapolation leaves about 5e-3 of max |psi_x|
  LiftOptions o;
  o.conditioning_floor = 2e-2;
  const LiftH2Result r = lift_h2(h, 2.0, o);
  bool floored = false;
  for (const auto& j : r.junctions) floored |= j.note == "below conditioning floor";
  CHECK(floored);
  for (double t : r.theta) CHECK(t == 0.0);
}

TEST_CASE("GCP report on a smooth state") {
  auto g = make_grid(10.0, 256);
  std::mt19937 rng(8);
  const HydroState h = random_positive(g, rng);
  const GcpReport r = gcp_check(h, 2.0, 1e6);
  CHECK(r.gcp_ok);
  CHECK(r.junction_error.empty());
  // ||J_x / sqrt(rho)|| against a direct evaluation
  const RealField Jx = deriv(h.J, 1);
  RealField q(g);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = Jx[i] / h.sqrt_rho[i];
  CHECK(r.dxJ_over_sqrt_rho_l2 == doctest::Approx(l2_norm(q)).epsilon(1e-10));
  CHECK(r.lambda_l2 == doctest::Approx(l2_norm(compute_lambda(h, 2.0).lambda)));
  CHECK_FALSE(gcp_check(h, 2.0, 1e-3).gcp_ok);
}
