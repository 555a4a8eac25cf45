#include "qhd/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qhd {

ChemicalFields compute_lambda(const HydroState& h, double gamma) {
  const GridPtr& g = h.grid();
  const std::size_t n = g->size();
  ChemicalFields c{RealField(g), RealField(g), RealField(g), RealField(g)};
  const RealField rho_xx = deriv(h.rho, 2);
  const RealField J_x = deriv(h.J, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (h.mask[i]) continue;
    const double s = h.sqrt_rho[i];
    const double a = h.dx_sqrt_rho[i];
    const double L = h.Lambda[i];
    const double s_xx = (0.5 * rho_xx[i] - a * a) / s;
    c.lambda[i] = -0.5 * s_xx + 0.5 * L * L / s + nonlinearity(h.rho[i], gamma) * s;
    c.xi[i] = s * c.lambda[i];
    c.dt_sqrt_rho[i] = -J_x[i] / (2.0 * s);
    c.entropy_flux[i] = L * c.lambda[i] - c.dt_sqrt_rho[i] * a;
  }
  return c;
}

RealField xi_identity(const HydroState& h, double gamma) {
  const RealField rho_xx = deriv(h.rho, 2);
  RealField e = energy_density(h, gamma);
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] += -0.25 * rho_xx[i] + pressure(h.rho[i], gamma);
  return e;
}

double hydro_mass(const HydroState& h) { return integrate(h.rho); }

double hydro_momentum(const HydroState& h) { return integrate(h.J); }

double hydro_energy(const HydroState& h, double gamma) {
  return integrate(energy_density(h, gamma));
}

double functional_I(const HydroState& h, const ChemicalFields& chem) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.sqrt_rho.size(); ++i)
    s += chem.lambda[i] * chem.lambda[i] + chem.dt_sqrt_rho[i] * chem.dt_sqrt_rho[i];
  return s * h.grid()->dx();
}

PseudoConformal functional_H(const HydroState& h, double t, double E, double gamma) {
  const auto x = h.grid()->x();
  const double dx = h.grid()->dx();
  double moment = 0.0, xJ = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    moment += 0.5 * x[i] * x[i] * h.rho[i];
    xJ += x[i] * h.J[i];
  }
  PseudoConformal out;
  out.H = (moment - t * xJ) * dx + t * t * E;
  if (t == 0.0) {
    out.H_alt = moment * dx;
    return out;
  }
  double alt = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = h.dx_sqrt_rho[i];
    const double w = h.Lambda[i] - x[i] / t * h.sqrt_rho[i];
    alt += 0.5 * a * a + 0.5 * w * w + internal_energy(h.rho[i], gamma);
  }
  out.H_alt = t * t * alt * dx;
  return out;
}

double boundary_density(const HydroState& h) {
  const auto x = h.grid()->x();
  const double edge = 0.8 * h.grid()->half_length();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > edge) m = std::max(m, h.rho[i]);
  return m;
}

RealField morawetz_weight(const HydroState& h, double offset) {
  return antiderivative(h.J, offset);
}

double morawetz_offset_for(double mass, double energy) {
  return std::sqrt(2.0 * std::max(mass, 0.0) * std::max(energy, 0.0));
}

SnapshotMeasures measure_snapshot(const HydroState& h, const ChemicalFields& chem, double t,
                                  double gamma, double morawetz_offset) {
  const GridPtr& g = h.grid();
  const auto x = g->x();
  const double dx = g->dx();
  const std::size_t n = g->size();

  SnapshotMeasures m;
  DiagnosticsFrame& f = m.frame;
  f.t = t;
  f.M = hydro_mass(h);
  f.E = hydro_energy(h, gamma);
  f.P = hydro_momentum(h);
  f.I = functional_I(h, chem);
  const PseudoConformal pc = functional_H(h, t, f.E, gamma);
  f.H = pc.H;
  f.H_alt = pc.H_alt;
  f.boundary_rho = boundary_density(h);

  const RealField G = morawetz_weight(h, morawetz_offset);
  const RealField rho_x = deriv(h.rho, 1);
  const RealField rho_xx = deriv(h.rho, 2);
  const RealField J_x = deriv(h.J, 1);
  const RealField e = energy_density(h, gamma);

  double moment = 0.0, mor = 0.0, grad = 0.0, kin = 0.0, rg = 0.0, rg1 = 0.0, lam = 0.0;
  double rp = 0.0, drho = 0.0, jl1 = 0.0, esq = 0.0, d2 = 0.0, djx = 0.0;
  m.G_min = std::numeric_limits<double>::infinity();
  m.G_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = h.rho[i];
    const double rg_i = rho * nonlinearity(rho, gamma);
    moment += 0.5 * x[i] * x[i] * rho;
    mor += rho * G[i];
    grad += h.dx_sqrt_rho[i] * h.dx_sqrt_rho[i];
    if (t > 0.0) {
      const double w = h.Lambda[i] - x[i] / t * h.sqrt_rho[i];
      kin += w * w;
    }
    rg += rg_i;
    rg1 += rg_i * rho;
    lam += h.Lambda[i] * h.Lambda[i];
    rp += rho * pressure(rho, gamma);
    drho += rho_x[i] * rho_x[i];
    jl1 += std::abs(h.J[i]);
    esq += e[i] * e[i];
    d2 += rho_xx[i] * rho_xx[i];
    djx += J_x[i] * J_x[i];
    m.G_min = std::min(m.G_min, G[i]);
    m.G_max = std::max(m.G_max, G[i]);
    m.sqrt_rho_max = std::max(m.sqrt_rho_max, h.sqrt_rho[i]);
    m.rho_max = std::max(m.rho_max, rho);
  }
  f.moment_inertia = moment * dx;
  f.morawetz = mor * dx;
  m.grad_sqrt_rho_l2 = std::sqrt(grad * dx);
  m.kinetic_dispersion = kin * dx;
  m.rho_gamma = rg * dx;
  m.rho_gamma_plus_one = rg1 * dx;
  m.half_lambda_sq = 0.5 * lam * dx;
  m.rho_p = rp * dx;
  m.drho_sq = drho * dx;
  m.J_l1 = jl1 * dx;
  m.e_sq = esq * dx;
  m.d2rho_sq = d2 * dx;
  m.dxJ_l2 = std::sqrt(djx * dx);
  return m;
}

double three_point_derivative(const double (&t)[3], const double (&f)[3], int at) {
  const double h1 = t[1] - t[0];
  const double h2 = t[2] - t[1];
  switch (at) {
    case 0:
      return -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
             h1 / (h2 * (h1 + h2)) * f[2];
    case 1:
      return -h2 / (h1 * (h1 + h2)) * f[0] + (h2 - h1) / (h1 * h2) * f[1] +
             h1 / (h2 * (h1 + h2)) * f[2];
    case 2:
      return h2 / (h1 * (h1 + h2)) * f[0] - (h1 + h2) / (h1 * h2) * f[1] +
             (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[2];
    default:
      throw std::invalid_argument("three_point_derivative: at must be 0, 1 or 2");
  }
}

EnergySnapshot energy_snapshot(const HydroState& h, const ChemicalFields& chem, double t,
                               double gamma) {
  return {t, energy_density(h, gamma), chem.entropy_flux};
}

namespace {

EntropyResidual residual_from(const EnergySnapshot* s[3], int at) {
  const EnergySnapshot& centre = *s[at];
  const double t[3] = {s[0]->t, s[1]->t, s[2]->t};
  const RealField flux_x = deriv(centre.flux, 1);
  EntropyResidual r{centre.t, RealField(centre.e.grid), 0.0, 0.0};
  const double dx = centre.e.grid->dx();
  for (std::size_t i = 0; i < r.residual.size(); ++i) {
    const double f[3] = {s[0]->e[i], s[1]->e[i], s[2]->e[i]};
    r.residual[i] = three_point_derivative(t, f, at) + flux_x[i];
    r.l1 += std::abs(r.residual[i]);
    r.l2 += r.residual[i] * r.residual[i];
  }
  r.l1 *= dx;
  r.l2 = std::sqrt(r.l2 * dx);
  return r;
}

}  // namespace

EntropyResidual entropy_residual_at(const EnergySnapshot& prev, const EnergySnapshot& cur,
                                    const EnergySnapshot& next) {
  const EnergySnapshot* s[3] = {&prev, &cur, &next};
  return residual_from(s, 1);
}

std::vector<EntropyResidual> entropy_residual(std::span<const EnergySnapshot> snaps) {
  std::vector<EntropyResidual> out;
  for (std::size_t k = 1; k + 1 < snaps.size(); ++k)
    out.push_back(entropy_residual_at(snaps[k - 1], snaps[k], snaps[k + 1]));
  return out;
}

namespace {

// Fills entropy_residual_norm, one-sided at the ends. Needs three snapshots.
void fill_entropy_norms(std::vector<SnapshotMeasures>& m,
                        const std::vector<EnergySnapshot>& es) {
  const std::size_t n = es.size();
  if (n < 3) return;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t base = k == 0 ? 0 : (k == n - 1 ? n - 3 : k - 1);
    const int at = static_cast<int>(k - base);
    const EnergySnapshot* s[3] = {&es[base], &es[base + 1], &es[base + 2]};
    m[k].frame.entropy_residual_norm = residual_from(s, at).l2;
  }
}

}  // namespace

std::vector<SnapshotMeasures> analyze_states(std::span<const double> times,
                                             std::span<const HydroState> states, double gamma) {
  if (times.size() != states.size())
    throw std::invalid_argument("analyze_states: times and states differ in length");
  std::vector<SnapshotMeasures> out;
  std::vector<EnergySnapshot> es;
  out.reserve(states.size());
  double offset = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const ChemicalFields chem = compute_lambda(states[k], gamma);
    if (k == 0)
      offset = morawetz_offset_for(hydro_mass(states[0]), hydro_energy(states[0], gamma));
    out.push_back(measure_snapshot(states[k], chem, times[k], gamma, offset));
    es.push_back(energy_snapshot(states[k], chem, times[k], gamma));
  }
  fill_entropy_norms(out, es);
  return out;
}

std::vector<SnapshotMeasures> analyze_trajectory(const Trajectory& traj,
                                                 const AnalysisOptions& opts) {
  std::vector<HydroState> states;
  states.reserve(traj.states.size());
  for (const auto& psi : traj.states) states.push_back(polar_factorize(psi, opts.tau_rel));
  return analyze_states(traj.times, states, opts.gamma);
}

double trapezoid(std::span<const double> t, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return s;
}

PcReport pseudo_conformal_check(std::span<const SnapshotMeasures> snaps, double gamma,
                                double tolerance) {
  PcReport r;
  if (snaps.empty()) return r;
  const double coef = 1.0 - 3.0 / gamma;
  r.right = snaps[0].frame.moment_inertia;
  r.F_growth_bound = 3.0 - gamma;
  r.margin = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const double t = snaps[k].frame.t;
    if (k > 0) {
      const double t0 = snaps[k - 1].frame.t;
      acc += 0.5 * (t - t0) * (t * snaps[k].rho_gamma + t0 * snaps[k - 1].rho_gamma);
    }
    const double left = snaps[k].frame.H + coef * acc;
    r.times.push_back(t);
    r.left.push_back(left);
    r.F.push_back(t * t / gamma * snaps[k].rho_gamma);
    r.margin = std::max(r.margin, left - r.right);
    r.identity_residual = std::max(r.identity_residual, std::abs(left - r.right));
  }

  // log-log slope of F over t >= 1
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    if (r.times[k] < 1.0 || !(r.F[k] > 0.0)) continue;
    const double lx = std::log(r.times[k]), ly = std::log(r.F[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 2) {
    const double den = cnt * sxx - sx * sx;
    if (den > 0.0) r.F_growth_slope = (cnt * sxy - sx * sy) / den;
  }
  r.holds = r.margin <= tolerance * std::max(r.right, std::numeric_limits<double>::min());
  if (r.right == 0.0) r.holds = r.margin <= 0.0;
  return r;
}

PcReport pseudo_conformal_check(const Trajectory& traj, double gamma, double tau_rel,
                                double tolerance) {
  const auto m = analyze_trajectory(traj, {gamma, tau_rel});
  return pseudo_conformal_check(m, gamma, tolerance);
}

MorawetzReport morawetz_residual(std::span<const SnapshotMeasures> snaps, double gamma) {
  MorawetzReport r;
  if (snaps.empty()) return r;
  const double c = 1.0 - 1.0 / gamma;
  r.dissipation_scale = snaps[0].rho_p + 0.5 * snaps[0].drho_sq;
  std::vector<double> t, drho, rg1;
  for (const auto& s : snaps) {
    t.push_back(s.frame.t);
    drho.push_back(s.drho_sq);
    rg1.push_back(s.rho_gamma_plus_one);
    r.mass_sup = std::max(r.mass_sup, s.frame.M);
    r.G_sup = std::max({r.G_sup, std::abs(s.G_max), std::abs(s.G_min)});
    r.M1 = std::max(r.M1, s.frame.M + s.frame.E);
  }
  for (std::size_t k = 1; k + 1 < snaps.size(); ++k) {
    const double tt[3] = {t[k - 1], t[k], t[k + 1]};
    const double f[3] = {snaps[k - 1].frame.morawetz, snaps[k].frame.morawetz,
                         snaps[k + 1].frame.morawetz};
    const double res =
        three_point_derivative(tt, f, 1) + snaps[k].rho_p + 0.5 * snaps[k].drho_sq;
    r.times.push_back(t[k]);
    r.residual.push_back(res);
    r.max_residual = std::max(r.max_residual, std::abs(res));
  }
  r.relative_residual = r.dissipation_scale > 0.0 ? r.max_residual / r.dissipation_scale : 0.0;
  r.drho_sq_spacetime = trapezoid(t, drho);
  r.rho_gamma1_spacetime = trapezoid(t, rg1);
  r.balance_lhs = c * r.rho_gamma1_spacetime + 0.5 * r.drho_sq_spacetime;
  r.G_bound = 2.0 * r.mass_sup * r.G_sup;
  r.within_bound = std::isfinite(r.drho_sq_spacetime) && r.drho_sq_spacetime <= r.G_bound;
  return r;
}

MorawetzReport morawetz_residual(const Trajectory& traj, double gamma, double tau_rel) {
  const auto m = analyze_trajectory(traj, {gamma, tau_rel});
  return morawetz_residual(m, gamma);
}

GronwallReport i_growth_check(std::span<const SnapshotMeasures> snaps, double gamma,
                              double tol) {
  GronwallReport r;
  if (snaps.empty()) return r;
  const double I0 = snaps[0].frame.I;
  const double q = 0.5 * (gamma - 1.0);
  const double bound0 = 2.0 * (gamma - 1.0) * std::pow(snaps[0].rho_max, gamma - 1.0);
  const double base0 = std::pow(snaps[0].frame.M + snaps[0].frame.E, q);
  r.c_fitted = base0 > 0.0 ? bound0 / base0 : 0.0;
  r.degenerate = !(I0 > 0.0);
  r.min_headroom = std::numeric_limits<double>::infinity();

  double fitted = 0.0, rigorous = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    const auto& s = snaps[k];
    if (!std::isfinite(s.frame.I)) r.finite = false;
    if (k > 0) {
      const auto& p = snaps[k - 1];
      const double dt = s.frame.t - p.frame.t;
      fitted += 0.5 * dt * r.c_fitted *
                (std::pow(s.frame.M + s.frame.E, q) + std::pow(p.frame.M + p.frame.E, q));
      rigorous += dt * (gamma - 1.0) *
                  (std::pow(s.rho_max, gamma - 1.0) + std::pow(p.rho_max, gamma - 1.0));
    }
    const double env = std::exp(fitted);
    const double ratio = r.degenerate ? (s.frame.I > 0.0 ? std::numeric_limits<double>::infinity()
                                                         : 1.0)
                                      : s.frame.I / I0;
    r.times.push_back(s.frame.t);
    r.ratio.push_back(ratio);
    r.envelope.push_back(env);
    r.max_ratio = std::max(r.max_ratio, ratio);
    r.min_headroom = std::min(r.min_headroom, env - ratio);
    if (ratio > env * (1.0 + tol)) r.exceeded = true;
  }
  r.envelope_at_end = r.envelope.back();
  r.rigorous_envelope_at_end = std::exp(rigorous);
  if (!r.finite) r.exceeded = true;
  return r;
}

SpaceTimeReport space_time_bounds(std::span<const SnapshotMeasures> snaps) {
  SpaceTimeReport r;
  if (snaps.empty()) return r;
  std::vector<double> t, e, d2;
  for (const auto& s : snaps) {
    t.push_back(s.frame.t);
    e.push_back(s.e_sq);
    d2.push_back(s.d2rho_sq);
    r.dxJ_linf_l2 = std::max(r.dxJ_linf_l2, s.dxJ_l2);
  }
  r.T = t.back() - t.front();
  r.e_l2tx = std::sqrt(trapezoid(t, e));
  r.d2rho_l2tx = std::sqrt(trapezoid(t, d2));
  r.scaled_total = (r.e_l2tx + r.d2rho_l2tx + r.dxJ_linf_l2) / std::sqrt(1.0 + r.T);
  return r;
}

}  // namespace qhd
