#pragma once

#include "qhd/grid_spectral.hpp"
#include "qhd/nls_solver.hpp"
#include "qhd/polar.hpp"

#include <span>
#include <vector>

namespace qhd {

/// Generalized chemical potential and the fields built from it.
struct ChemicalFields {
  RealField lambda;        ///< zero on vacuum
  RealField xi;            ///< sqrt(rho) * lambda
  RealField dt_sqrt_rho;   ///< -J_x / (2 sqrt(rho)) off vacuum, zero on vacuum
  RealField entropy_flux;  ///< Lambda lambda - dt_sqrt_rho * dx_sqrt_rho
};

/// lambda = -1/2 (sqrt rho)_xx + 1/2 Lambda^2 / sqrt(rho) + f'(rho) sqrt(rho) off vacuum,
/// with (sqrt rho)_xx = (rho_xx / 2 - (sqrt rho)_x^2) / sqrt(rho).
ChemicalFields compute_lambda(const HydroState& h, double gamma);

/// The other route to xi: -1/4 rho_xx + e + p(rho), evaluated at every sample.
RealField xi_identity(const HydroState& h, double gamma);

double hydro_mass(const HydroState& h);
double hydro_momentum(const HydroState& h);
/// int 1/2 (sqrt rho)_x^2 + 1/2 Lambda^2 + f(rho) dx
double hydro_energy(const HydroState& h, double gamma);

/// I = int lambda^2 + (dt sqrt rho)^2 dx.
double functional_I(const HydroState& h, const ChemicalFields& chem);

struct PseudoConformal {
  double H = 0.0;      ///< int x^2/2 rho - t int x J + t^2 E
  double H_alt = 0.0;  ///< sum-of-squares form; int x^2 rho / 2 at t = 0
};

PseudoConformal functional_H(const HydroState& h, double t, double E, double gamma);

/// One row of diagnostics.csv.
struct DiagnosticsFrame {
  double t = 0.0;
  double M = 0.0;
  double E = 0.0;
  double P = 0.0;
  double I = 0.0;
  double H = 0.0;
  double H_alt = 0.0;
  double moment_inertia = 0.0;  ///< int x^2 rho / 2
  double morawetz = 0.0;
  double entropy_residual_norm = 0.0;
  double boundary_rho = 0.0;
};

/// Everything the reports need from one snapshot, so fields can be dropped early.
struct SnapshotMeasures {
  DiagnosticsFrame frame;
  double grad_sqrt_rho_l2 = 0.0;    ///< ||(sqrt rho)_x||_2
  double kinetic_dispersion = 0.0;  ///< int (Lambda - x/t sqrt rho)^2 (t > 0)
  double rho_gamma = 0.0;           ///< int rho^gamma
  double rho_gamma_plus_one = 0.0;  ///< int rho^(gamma+1)
  double sqrt_rho_max = 0.0;
  double rho_max = 0.0;
  double half_lambda_sq = 0.0;      ///< 1/2 ||Lambda||_2^2
  double rho_p = 0.0;               ///< int rho p(rho)
  double drho_sq = 0.0;             ///< int rho_x^2
  double G_min = 0.0;
  double G_max = 0.0;
  double J_l1 = 0.0;
  double e_sq = 0.0;                ///< int e^2
  double d2rho_sq = 0.0;            ///< int rho_xx^2
  double dxJ_l2 = 0.0;              ///< ||J_x||_2
};

/// Max rho over |x| > 0.8 L.
double boundary_density(const HydroState& h);

/// Morawetz weight G = antiderivative(J) + offset.
RealField morawetz_weight(const HydroState& h, double offset);

/// Measures of one snapshot. The entropy residual is left at zero; it needs
/// neighbouring snapshots and is filled by analyze_trajectory.
SnapshotMeasures measure_snapshot(const HydroState& h, const ChemicalFields& chem, double t,
                                  double gamma, double morawetz_offset);

/// Offset for G that keeps it non-negative: sqrt(2 M E) bounds ||J||_1.
double morawetz_offset_for(double mass, double energy);

/// d/dt at the middle point of three (possibly unevenly spaced) samples, or at
/// an end point when `at` is 0 or 2.
double three_point_derivative(const double (&t)[3], const double (&f)[3], int at);

struct EntropyResidual {
  double t = 0.0;
  RealField residual;
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Snapshot fields needed for the local energy balance.
struct EnergySnapshot {
  double t = 0.0;
  RealField e;
  RealField flux;
};

EnergySnapshot energy_snapshot(const HydroState& h, const ChemicalFields& chem, double t,
                               double gamma);

/// R = de/dt + d/dx(Lambda lambda - dt_sqrt_rho dx_sqrt_rho) at the middle
/// snapshot, with the time derivative from the three snapshots.
EntropyResidual entropy_residual_at(const EnergySnapshot& prev, const EnergySnapshot& cur,
                                    const EnergySnapshot& next);

/// Residual at every interior snapshot of the sequence.
std::vector<EntropyResidual> entropy_residual(std::span<const EnergySnapshot> snaps);

struct AnalysisOptions {
  double gamma = 2.0;
  double tau_rel = 1e-8;
};

/// Polar-factorizes every snapshot and fills all measures, including the
/// entropy residual norm (one-sided at the two ends).
std::vector<SnapshotMeasures> analyze_trajectory(const Trajectory& traj,
                                                 const AnalysisOptions& opts);

/// Same for stored hydrodynamic snapshots.
std::vector<SnapshotMeasures> analyze_states(std::span<const double> times,
                                             std::span<const HydroState> states, double gamma);

struct PcReport {
  std::vector<double> times;
  std::vector<double> left;  ///< H(t) + int_0^t s int (1 - 3/gamma) rho^gamma
  double right = 0.0;        ///< int x^2 rho_0 / 2
  double margin = 0.0;       ///< max over snapshots of left - right
  /// max |left - right|. For energy-conserving flows the inequality is an
  /// identity, so this measures discretization error.
  double identity_residual = 0.0;
  /// F(t) = t^2/gamma int rho^gamma and its log-log slope over t >= 1.
  std::vector<double> F;
  double F_growth_slope = 0.0;
  double F_growth_bound = 0.0;  ///< 3 - gamma
  bool holds = true;
};

PcReport pseudo_conformal_check(std::span<const SnapshotMeasures> snaps, double gamma,
                                double tolerance = 1e-6);
PcReport pseudo_conformal_check(const Trajectory& traj, double gamma, double tau_rel = 1e-8,
                                double tolerance = 1e-6);

struct MorawetzReport {
  std::vector<double> times;     ///< interior snapshot times
  std::vector<double> residual;  ///< d/dt int rho G + int rho p + 1/2 int rho_x^2
  double max_residual = 0.0;
  double dissipation_scale = 0.0;  ///< (int rho p + 1/2 int rho_x^2) at t = 0
  double relative_residual = 0.0;
  double drho_sq_spacetime = 0.0;        ///< int int rho_x^2
  double rho_gamma1_spacetime = 0.0;     ///< int int rho^(gamma+1)
  double balance_lhs = 0.0;  ///< (1 - 1/gamma) int int rho^(gamma+1) + 1/2 int int rho_x^2
  double mass_sup = 0.0;     ///< sup_t ||rho||_1
  double G_sup = 0.0;        ///< sup |G|
  double G_bound = 0.0;      ///< 2 sup||rho||_1 sup|G|
  double M1 = 0.0;           ///< sup_t (M + E)
  bool within_bound = true;  ///< int int rho_x^2 <= G_bound
};

MorawetzReport morawetz_residual(std::span<const SnapshotMeasures> snaps, double gamma);
MorawetzReport morawetz_residual(const Trajectory& traj, double gamma, double tau_rel = 1e-8);

struct GronwallReport {
  double max_ratio = 1.0;     ///< max I(t)/I(0)
  double c_fitted = 0.0;      ///< rate constant matched at t = 0
  double envelope_at_end = 1.0;
  double min_headroom = 0.0;  ///< min over t of envelope(t) - I(t)/I(0)
  /// exp(int_0^t 2 (gamma-1) ||rho(s)||_inf^{gamma-1} ds), which bounds I(t)/I(0)
  /// for Schroedinger-generated flows.
  double rigorous_envelope_at_end = 1.0;
  bool exceeded = false;
  bool finite = true;
  bool degenerate = false;    ///< I(0) == 0
  std::vector<double> times;
  std::vector<double> ratio;
  std::vector<double> envelope;
};

/// Compares I(t)/I(0) with exp(int_0^t c (M + E)^{(gamma-1)/2} ds). The constant
/// c is fitted, not derived: it is set so that c (M + E)^{(gamma-1)/2} equals
/// the rate bound 2 (gamma - 1) ||rho_0||_inf^{gamma-1} at t = 0.
GronwallReport i_growth_check(std::span<const SnapshotMeasures> snaps, double gamma,
                              double tol = 1e-6);

/// Space-time quantities of the energy-density estimate, reported against
/// the (1 + T)^{1/2} scaling.
struct SpaceTimeReport {
  double T = 0.0;
  double e_l2tx = 0.0;
  double d2rho_l2tx = 0.0;
  double dxJ_linf_l2 = 0.0;
  double scaled_total = 0.0;  ///< sum of the three divided by (1 + T)^{1/2}
};

SpaceTimeReport space_time_bounds(std::span<const SnapshotMeasures> snaps);

/// Trapezoid rule over (possibly uneven) sample times.
double trapezoid(std::span<const double> t, std::span<const double> f);

}  // namespace qhd
