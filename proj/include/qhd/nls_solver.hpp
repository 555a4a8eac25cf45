#pragma once

#include "qhd/grid_spectral.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhd {

/// Parameters of the defocusing NLS  i psi_t = -1/2 psi_xx + |psi|^{2(gamma-1)} psi.
struct NlsParams {
  double gamma = 2.0;
  double dt = 1e-3;
  double t_end = 1.0;
  bool dealias = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Number of steps needed to reach t_end.
  std::size_t step_count() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexField> states;
  NlsParams params;
  /// NLS invariants at each snapshot.
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<double> momentum;
};

/// Raised when the solution stops being finite. Carries what was computed so far.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, std::size_t step, double last_valid_time,
                 Trajectory partial)
      : std::runtime_error(what),
        step(step),
        last_valid_time(last_valid_time),
        partial(std::move(partial)) {}

  std::size_t step;
  double last_valid_time;
  Trajectory partial;
};

/// rho^{gamma-1} with 0^{gamma-1} = 0.
double nonlinearity(double rho, double gamma);

double nls_mass(const ComplexField& psi);
double nls_energy(const ComplexField& psi, double gamma);
double nls_momentum(const ComplexField& psi);

/// Strang split step: half nonlinear rotation, exact free flow, half rotation.
///
/// Reuses its FFT buffers between calls; one stepper per thread.
class SplitStepper {
public:
  SplitStepper(GridPtr grid, double dt, double gamma, bool dealias = false);

  /// Advances psi in place by one step.
  void step(ComplexField& psi);

  double dt() const { return dt_; }

private:
  void rotate_half(std::vector<complex>& v) const;

  GridPtr grid_;
  double dt_;
  double gamma_;
  bool dealias_;
  std::vector<complex> propagator_;
  std::vector<complex> spec_;
};

ComplexField nls_step(const ComplexField& psi, double dt, double gamma, bool dealias = false);

/// Called for every stored snapshot (index, time, state).
using SnapshotCallback = std::function<void(std::size_t, double, const ComplexField&)>;

/// Evolves psi0 to params.t_end, storing every save_every-th step and the final
/// state. Snapshot times are step * dt; the last step is shortened if t_end is
/// not a multiple of dt.
Trajectory evolve(const ComplexField& psi0, const NlsParams& params, std::size_t save_every,
                  const SnapshotCallback& on_snapshot = {});

/// Instantaneous time derivative -i(-1/2 psi_xx + |psi|^{2(gamma-1)} psi).
ComplexField dt_psi(const ComplexField& psi, double gamma);

}  // namespace qhd
