#include "qhd/lifting.hpp"

#include "qhd/functionals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qhd {

double regularization_profile(double x) { return std::exp(-0.5 * x * x); }

namespace {

void check_liftable(const HydroState& h, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("lifting: delta must be positive");
  require_finite(h.sqrt_rho.values, "lifting: sqrt_rho");
  require_finite(h.Lambda.values, "lifting: Lambda");
  for (std::size_t i = 0; i < h.sqrt_rho.size(); ++i) {
    if (h.sqrt_rho[i] < 0.0) throw std::invalid_argument("lifting: negative sqrt_rho sample");
    if (h.mask[i] && h.Lambda[i] != 0.0) {
      std::ostringstream msg;
      msg << "lifting: Lambda must vanish on vacuum (sample " << i << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

// S' = J / (sqrt(rho) + delta w)^2.
RealField phase_velocity(const HydroState& h, double delta) {
  const double d = delta;
  const auto x = h.grid()->x();
  RealField v(h.grid());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = h.sqrt_rho[i] + d * regularization_profile(x[i]);
    v[i] = r > 0.0 ? h.J[i] / (r * r) : 0.0;
  }
  return v;
}

double reduce_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

// Phase velocity of the periodic lift: the circulation added by the
// regularization is spread uniformly, so data whose own circulation is a
// multiple of 2 pi lifts to a periodic psi.
RealField periodic_phase_velocity(const HydroState& h, double delta) {
  RealField v = phase_velocity(h, delta);
  double added = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double exact = h.mask[i] ? 0.0 : h.Lambda[i] / h.sqrt_rho[i];
    added += v[i] - exact;
  }
  const double shift = added * h.grid()->dx() / h.grid()->length();
  for (auto& x : v.values) x -= shift;
  return v;
}

}  // namespace

ComplexField lift_h1(const HydroState& h, double delta) {
  check_liftable(h, delta);
  const std::vector<double> S = cumulative_integral(periodic_phase_velocity(h, delta).values, h.grid()->dx());
  ComplexField psi(h.grid());
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = h.sqrt_rho[i] * complex(std::cos(S[i]), std::sin(S[i]));
  return psi;
}

double circulation_defect(const HydroState& h, double delta) {
  check_liftable(h, delta);
  return reduce_angle(integrate(periodic_phase_velocity(h, delta)));
}

namespace {

struct ComponentLift {
  std::vector<complex> psi;  ///< sqrt(rho) e^{iS} on the component samples
  std::vector<complex> dpsi; ///< (d/dx sqrt(rho) + i Lambda) e^{iS}
};

ComponentLift lift_component(const HydroState& h, const Component& c, const RealField& v) {
  const std::size_t n = h.sqrt_rho.size();
  std::vector<double> vals(c.count);
  for (std::size_t k = 0; k < c.count; ++k) vals[k] = v[c.index(k, n)];
  const std::vector<double> S = cumulative_integral(vals, h.grid()->dx());
  ComponentLift out;
  out.psi.resize(c.count);
  out.dpsi.resize(c.count);
  for (std::size_t k = 0; k < c.count; ++k) {
    const std::size_t i = c.index(k, n);
    const complex ph(std::cos(S[k]), std::sin(S[k]));
    out.psi[k] = h.sqrt_rho[i] * ph;
    out.dpsi[k] = complex(h.dx_sqrt_rho[i], h.Lambda[i]) * ph;
  }
  return out;
}

// One-sided limit of psi_x at the left (at_right = false) or right end.
complex end_limit(const ComponentLift& c, double offset, bool at_right) {
  const std::size_t m = c.dpsi.size();
  std::vector<double> s(kBoundaryStencil), re(kBoundaryStencil), im(kBoundaryStencil);
  for (std::size_t k = 0; k < kBoundaryStencil; ++k) {
    const complex z = at_right ? c.dpsi[m - 1 - k] : c.dpsi[k];
    s[k] = offset + static_cast<double>(k);
    re[k] = z.real();
    im[k] = z.imag();
  }
  return {extrapolate_quadratic(s, re), extrapolate_quadratic(s, im)};
}

struct Sweep {
  std::vector<ComponentLift> lifts;
  std::vector<double> theta;
  std::vector<Junction> junctions;
};

Sweep sweep_components(const HydroState& h, const VacuumDecomposition& dec,
                       const LiftOptions& opts) {
  check_liftable(h, opts.delta);
  const RealField v = phase_velocity(h, opts.delta);
  const Grid& g = *h.grid();
  Sweep sw;
  for (const Component& c : dec.components) sw.lifts.push_back(lift_component(h, c, v));
  sw.theta.assign(dec.components.size(), 0.0);

  double scale = 0.0;
  for (std::size_t i = 0; i < h.sqrt_rho.size(); ++i)
    scale = std::max(scale, std::hypot(h.dx_sqrt_rho[i], h.Lambda[i]));
  const double floor = opts.conditioning_floor * scale;

  const std::size_t m = dec.components.size();
  if (m == 0 || !dec.components[0].left_run) return sw;

  // Junction between component j - 1 (left side) and j; j == m closes the loop.
  for (std::size_t j = 1; j <= m; ++j) {
    const std::size_t lj = j - 1;
    const std::size_t rj = j % m;
    const Component& L = dec.components[lj];
    const Component& R = dec.components[rj];
    const VacuumRun& run = dec.runs[*L.right_run];
    Junction jn;
    jn.isolated = run.isolated;
    jn.loop_closure = (j == m);
    const double off = boundary_offset(run);
    const std::size_t last = L.index(L.count - 1, dec.n);
    jn.x = L.right ? L.right->x : g.x()[last] + off * g.dx();

    if (!run.isolated) {
      jn.note = "fat vacuum";
    } else if (L.count < kBoundaryStencil || R.count < kBoundaryStencil) {
      jn.note = "component too narrow to extrapolate";
    } else {
      const complex dl = std::polar(1.0, sw.theta[lj]) * end_limit(sw.lifts[lj], off, true);
      const complex dr = end_limit(sw.lifts[rj], off, false);
      jn.modulus_left = std::abs(dl);
      jn.modulus_right = std::abs(dr);
      const double big = std::max(jn.modulus_left, jn.modulus_right);
      if (big < floor) {
        jn.note = "below conditioning floor";
      } else if (std::abs(jn.modulus_left - jn.modulus_right) > opts.junction_tol * big) {
        std::ostringstream msg;
        msg << "|psi_x| jumps from " << jn.modulus_left << " to " << jn.modulus_right
            << " across the vacuum point at x = " << jn.x
            << "; the energy density is not continuous there";
        throw JunctionError(msg.str(), jn.x);
      } else if (!jn.loop_closure && opts.match_phases) {
        sw.theta[rj] = reduce_angle(std::arg(dl) - std::arg(dr));
        jn.matched = true;
      } else if (jn.loop_closure) {
        const double gap = reduce_angle(std::arg(dl) - std::arg(dr) - sw.theta[rj]);
        std::ostringstream note;
        note << "loop closure phase gap " << gap;
        jn.note = note.str();
      }
    }
    jn.theta = sw.theta[rj];
    if (jn.loop_closure && m == 1 && !run.isolated) jn.note = "fat vacuum";
    sw.junctions.push_back(jn);
  }
  return sw;
}

}  // namespace

LiftH2Result lift_h2(const HydroState& h, double gamma, const LiftOptions& opts) {
  const VacuumDecomposition dec = decompose_vacuum(h, gamma);
  LiftH2Result out;
  out.psi = ComplexField(h.grid());
  if (dec.components.empty()) return out;
  if (!dec.components[0].left_run) {
    out.psi = lift_h1(h, opts.delta);
    out.theta = {0.0};
    return out;
  }
  Sweep sw = sweep_components(h, dec, opts);
  for (std::size_t j = 0; j < dec.components.size(); ++j) {
    const Component& c = dec.components[j];
    const complex rot = std::polar(1.0, sw.theta[j]);
    for (std::size_t k = 0; k < c.count; ++k)
      out.psi[c.index(k, dec.n)] = rot * sw.lifts[j].psi[k];
  }
  out.theta = std::move(sw.theta);
  out.junctions = std::move(sw.junctions);
  return out;
}

GcpReport gcp_check(const HydroState& h, double gamma, double bound, const LiftOptions& opts) {
  GcpReport r;
  r.bound = bound;
  const ChemicalFields chem = compute_lambda(h, gamma);
  r.lambda_l2 = l2_norm(chem.lambda);
  r.dt_sqrt_rho_l2 = l2_norm(chem.dt_sqrt_rho);
  r.dxJ_over_sqrt_rho_l2 = 2.0 * r.dt_sqrt_rho_l2;
  r.gcp_ok = std::isfinite(r.lambda_l2) && std::isfinite(r.dxJ_over_sqrt_rho_l2) &&
             r.lambda_l2 <= bound && r.dxJ_over_sqrt_rho_l2 <= bound;
  try {
    const VacuumDecomposition dec = decompose_vacuum(h, gamma);
    r.junctions = sweep_components(h, dec, opts).junctions;
  } catch (const JunctionError& e) {
    r.junction_error = e.what();
    r.gcp_ok = false;
  } catch (const std::invalid_argument& e) {
    r.junction_error = e.what();
    r.gcp_ok = false;
  }
  return r;
}

}  // namespace qhd
