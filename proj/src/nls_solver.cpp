#include "qhd/nls_solver.hpp"

#include <cmath>
#include <sstream>

namespace qhd {

void NlsParams::validate() const {
  if (!(gamma > 1.0) || !std::isfinite(gamma))
    throw std::invalid_argument("params.gamma: must satisfy gamma > 1");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("params.dt: must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("params.t_end: must be positive");
  if (t_end < dt) throw std::invalid_argument("params.t_end: must be at least dt");
}

std::size_t NlsParams::step_count() const {
  // Tolerate t_end/dt landing a hair above an integer.
  const double ratio = t_end / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio))
    return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

double nonlinearity(double rho, double gamma) {
  if (rho <= 0.0) return 0.0;
  if (gamma == 2.0) return rho;
  return std::pow(rho, gamma - 1.0);
}

double nls_mass(const ComplexField& psi) {
  double s = 0.0;
  for (const auto& v : psi.values) s += std::norm(v);
  return s * psi.grid->dx();
}

double nls_energy(const ComplexField& psi, double gamma) {
  const ComplexField d = deriv(psi, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double rho = std::norm(psi[i]);
    s += 0.5 * std::norm(d[i]) + rho * nonlinearity(rho, gamma) / gamma;
  }
  return s * psi.grid->dx();
}

double nls_momentum(const ComplexField& psi) {
  const ComplexField d = deriv(psi, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += (std::conj(psi[i]) * d[i]).imag();
  return s * psi.grid->dx();
}

SplitStepper::SplitStepper(GridPtr grid, double dt, double gamma, bool dealias)
    : grid_(std::move(grid)), dt_(dt), gamma_(gamma), dealias_(dealias) {
  const auto k = grid_->wavenumbers();
  propagator_.resize(grid_->size());
  spec_.resize(grid_->size());
  for (std::size_t i = 0; i < k.size(); ++i)
    propagator_[i] = std::exp(complex(0.0, -0.5 * k[i] * k[i] * dt_));
}

void SplitStepper::rotate_half(std::vector<complex>& v) const {
  const double h = 0.5 * dt_;
  for (auto& z : v) {
    const double phase = -nonlinearity(std::norm(z), gamma_) * h;
    z *= complex(std::cos(phase), std::sin(phase));
  }
}

void SplitStepper::step(ComplexField& psi) {
  rotate_half(psi.values);
  grid_->forward(psi.values, spec_);
  for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] *= propagator_[i];
  if (dealias_) dealias_two_thirds(*grid_, spec_);
  grid_->backward(spec_, psi.values);
  rotate_half(psi.values);
}

ComplexField nls_step(const ComplexField& psi, double dt, double gamma, bool dealias) {
  require_finite(psi.values, "nls_step");
  SplitStepper stepper(psi.grid, dt, gamma, dealias);
  ComplexField out = psi;
  stepper.step(out);
  return out;
}

namespace {

bool all_finite(const ComplexField& psi) {
  for (const auto& v : psi.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void record(Trajectory& traj, double t, const ComplexField& psi, double gamma) {
  traj.times.push_back(t);
  traj.states.push_back(psi);
  traj.mass.push_back(nls_mass(psi));
  traj.energy.push_back(nls_energy(psi, gamma));
  traj.momentum.push_back(nls_momentum(psi));
}

}  // namespace

Trajectory evolve(const ComplexField& psi0, const NlsParams& params, std::size_t save_every,
                  const SnapshotCallback& on_snapshot) {
  params.validate();
  if (save_every < 1) throw std::invalid_argument("save_every must be at least 1");
  require_finite(psi0.values, "evolve: initial state");

  Trajectory traj;
  traj.params = params;
  ComplexField psi = psi0;
  record(traj, 0.0, psi, params.gamma);
  if (on_snapshot) on_snapshot(0, 0.0, psi);

  const std::size_t steps = params.step_count();
  SplitStepper stepper(psi.grid, params.dt, params.gamma, params.dealias);
  double last_valid = 0.0;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * params.dt;
    const bool last = (s == steps);
    double t = static_cast<double>(s) * params.dt;
    if (last && t > params.t_end) {
      SplitStepper tail(psi.grid, params.t_end - t_prev, params.gamma, params.dealias);
      tail.step(psi);
      t = params.t_end;
    } else {
      stepper.step(psi);
    }
    if (!all_finite(psi)) {
      std::ostringstream msg;
      msg << "non-finite wave function at step " << s << " (last valid time " << last_valid
          << ")";
      throw NumericalError(msg.str(), s, last_valid, std::move(traj));
    }
    last_valid = t;
    if (s % save_every == 0 || last) {
      record(traj, t, psi, params.gamma);
      if (on_snapshot) on_snapshot(traj.times.size() - 1, t, psi);
    }
  }
  return traj;
}

ComplexField dt_psi(const ComplexField& psi, double gamma) {
  const ComplexField d2 = deriv(psi, 2);
  ComplexField out(psi.grid);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const complex h = -0.5 * d2[i] + nonlinearity(std::norm(psi[i]), gamma) * psi[i];
    out[i] = complex(0.0, -1.0) * h;
  }
  return out;
}

}  // namespace qhd
