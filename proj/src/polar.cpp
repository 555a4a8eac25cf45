#include "qhd/polar.hpp"

#include "qhd/nls_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace qhd {

std::size_t VacuumMask::count() const {
  std::size_t c = 0;
  for (auto v : is_vacuum) c += v;
  return c;
}

VacuumMask make_vacuum_mask(std::span<const double> sqrt_rho, double tau_rel) {
  if (!(tau_rel > 0.0 && tau_rel < 1.0))
    throw std::invalid_argument("tau_rel must lie in (0, 1)");
  VacuumMask mask;
  mask.tau_rel = tau_rel;
  mask.is_vacuum.resize(sqrt_rho.size());
  const double threshold = tau_rel * max_abs(sqrt_rho);
  for (std::size_t i = 0; i < sqrt_rho.size(); ++i)
    mask.is_vacuum[i] = (sqrt_rho[i] < threshold || sqrt_rho[i] == 0.0) ? 1 : 0;
  return mask;
}

HydroState polar_factorize(const ComplexField& psi, double tau_rel) {
  require_finite(psi.values, "polar_factorize");
  const GridPtr& g = psi.grid;
  const std::size_t n = psi.size();
  HydroState h{RealField(g), RealField(g), RealField(g), RealField(g), RealField(g), {}};
  for (std::size_t i = 0; i < n; ++i) h.sqrt_rho[i] = std::abs(psi[i]);
  h.mask = make_vacuum_mask(h.sqrt_rho.values, tau_rel);

  const ComplexField d = deriv(psi, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (h.mask[i]) continue;
    const complex phi = psi[i] / h.sqrt_rho[i];
    const complex proj = std::conj(phi) * d[i];
    h.dx_sqrt_rho[i] = proj.real();
    h.Lambda[i] = proj.imag();
  }
  for (std::size_t i = 0; i < n; ++i) {
    h.rho[i] = h.sqrt_rho[i] * h.sqrt_rho[i];
    h.J[i] = h.sqrt_rho[i] * h.Lambda[i];
  }
  return h;
}

HydroState make_hydro_state(const RealField& sqrt_rho, const RealField& Lambda, double tau_rel,
                            double* dropped_lambda) {
  require_finite(sqrt_rho.values, "make_hydro_state: sqrt_rho");
  require_finite(Lambda.values, "make_hydro_state: Lambda");
  if (sqrt_rho.size() != Lambda.size())
    throw std::invalid_argument("make_hydro_state: sqrt_rho and Lambda differ in length");
  for (double v : sqrt_rho.values)
    if (v < 0.0) throw std::invalid_argument("make_hydro_state: negative sqrt_rho sample");

  const GridPtr& g = sqrt_rho.grid;
  const std::size_t n = sqrt_rho.size();
  HydroState h{sqrt_rho, Lambda, RealField(g), RealField(g), RealField(g), {}};
  h.mask = make_vacuum_mask(sqrt_rho.values, tau_rel);

  double dropped = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (h.mask[i]) {
      dropped = std::max(dropped, std::abs(h.Lambda[i]));
      h.Lambda[i] = 0.0;
    }
    h.rho[i] = h.sqrt_rho[i] * h.sqrt_rho[i];
    h.J[i] = h.sqrt_rho[i] * h.Lambda[i];
  }
  if (dropped_lambda != nullptr) *dropped_lambda = dropped;

  const RealField drho = deriv(h.rho, 1);
  for (std::size_t i = 0; i < n; ++i)
    h.dx_sqrt_rho[i] = h.mask[i] ? 0.0 : drho[i] / (2.0 * h.sqrt_rho[i]);
  return h;
}

double pressure(double rho, double gamma) {
  return (gamma - 1.0) / gamma * rho * nonlinearity(rho, gamma);
}

double internal_energy(double rho, double gamma) { return rho * nonlinearity(rho, gamma) / gamma; }

RealField energy_density(const HydroState& h, double gamma) {
  RealField e(h.grid());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double a = h.dx_sqrt_rho[i];
    const double b = h.Lambda[i];
    e[i] = 0.5 * a * a + 0.5 * b * b + internal_energy(h.rho[i], gamma);
  }
  return e;
}

}  // namespace qhd
