#pragma once

#include "qhd/grid_spectral.hpp"

#include <cstdint>
#include <vector>

namespace qhd {

/// Discrete stand-in for the vacuum set {rho = 0}.
struct VacuumMask {
  std::vector<std::uint8_t> is_vacuum;
  double tau_rel = 1e-8;

  bool operator[](std::size_t i) const { return is_vacuum[i] != 0; }
  std::size_t size() const { return is_vacuum.size(); }
  std::size_t count() const;
};

/// sample i is vacuum iff sqrt_rho_i < tau_rel * max(sqrt_rho).
VacuumMask make_vacuum_mask(std::span<const double> sqrt_rho, double tau_rel);

/// Hydrodynamic state (sqrt(rho), Lambda) with the derived rho, J = sqrt(rho) Lambda
/// and d/dx sqrt(rho). Lambda and d/dx sqrt(rho) vanish on vacuum samples.
struct HydroState {
  RealField sqrt_rho;
  RealField Lambda;
  RealField rho;
  RealField J;
  RealField dx_sqrt_rho;
  VacuumMask mask;

  const GridPtr& grid() const { return sqrt_rho.grid; }
};

/// Polar factorization of psi: sqrt(rho) = |psi|, and with phi = psi/|psi| off
/// vacuum, Lambda = Im(conj(phi) psi_x), d/dx sqrt(rho) = Re(conj(phi) psi_x).
/// Both are zero on vacuum samples.
HydroState polar_factorize(const ComplexField& psi, double tau_rel = 1e-8);

/// State from hydrodynamic data alone. d/dx sqrt(rho) is obtained as
/// rho_x / (2 sqrt(rho)) off vacuum, since rho stays smooth where sqrt(rho) has
/// corners. Lambda on thresholded vacuum samples is set to zero; the largest
/// discarded |Lambda| is returned through `dropped_lambda` when non-null.
HydroState make_hydro_state(const RealField& sqrt_rho, const RealField& Lambda,
                            double tau_rel = 1e-8, double* dropped_lambda = nullptr);

/// p(rho) = (gamma-1)/gamma rho^gamma and f(rho) = rho^gamma / gamma.
double pressure(double rho, double gamma);
double internal_energy(double rho, double gamma);

/// e = 1/2 (d/dx sqrt(rho))^2 + 1/2 Lambda^2 + f(rho).
RealField energy_density(const HydroState& h, double gamma);

}  // namespace qhd
