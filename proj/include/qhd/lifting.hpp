#pragma once

#include "qhd/grid_spectral.hpp"
#include "qhd/polar.hpp"
#include "qhd/vacuum_measure.hpp"

#include <string>
#include <vector>

namespace qhd {

struct LiftOptions {
  /// Amplitude regularization: sqrt(rho) + delta w(x) in the phase velocity.
  double delta = 1e-8;
  /// Phases are matched at a junction only when |psi_x| there exceeds this
  /// fraction of max |psi_x|; below it theta = 0.
  double conditioning_floor = 1e-3;
  /// Allowed relative jump of |psi_x| across an isolated vacuum point.
  double junction_tol = 5e-2;
  /// false gives the naive lift with theta = 0 on every component.
  bool match_phases = true;
};

/// w(x) = exp(-x^2 / 2), the profile carrying the amplitude regularization.
double regularization_profile(double x);

/// psi = sqrt(rho) exp(iS) with S' = J / (sqrt(rho) + delta w)^2 and S = 0 at
/// the left edge, integrated with the local sixth-order rule so vacuum edges
/// stay local. |psi| equals sqrt(rho) exactly. The circulation that the
/// regularization adds to int Lambda / sqrt(rho) is removed by a uniform shift
/// of S', so psi is periodic whenever the data's own circulation is a multiple
/// of 2 pi.
ComplexField lift_h1(const HydroState& h, double delta = 1e-8);

/// Net phase gained across the box, reduced to (-pi, pi]. Zero when lift_h1
/// produces a periodic wave function.
double circulation_defect(const HydroState& h, double delta = 1e-8);

struct Junction {
  double x = 0.0;        ///< location of the vacuum boundary
  bool isolated = false;
  bool matched = false;  ///< a phase was chosen from the one-sided limits
  bool loop_closure = false;  ///< periodic wrap back to the first component
  double theta = 0.0;    ///< phase of the component to the right
  double modulus_left = 0.0;   ///< |psi_x| from the left
  double modulus_right = 0.0;  ///< |psi_x| from the right
  std::string note;
};

struct LiftH2Result {
  ComplexField psi;
  std::vector<double> theta;  ///< per component, in decomposition order
  std::vector<Junction> junctions;
};

/// Raised when |psi_x| jumps across an isolated vacuum point, which means the
/// energy density is not continuous there.
class JunctionError : public std::runtime_error {
public:
  JunctionError(const std::string& what, double x) : std::runtime_error(what), x(x) {}
  double x;
};

/// Lifts every non-vacuum component separately (phase pinned at its left
/// edge), then sweeps components left to right choosing theta_j so that
/// psi_x is continuous across isolated vacuum points. Across fat vacuum, or
/// when |psi_x| is below the conditioning floor, theta_j = 0.
LiftH2Result lift_h2(const HydroState& h, double gamma, const LiftOptions& opts = {});

struct GcpReport {
  double lambda_l2 = 0.0;
  double dxJ_over_sqrt_rho_l2 = 0.0;  ///< ||J_x / sqrt(rho) 1_{rho > 0}||_2
  double dt_sqrt_rho_l2 = 0.0;
  double bound = 0.0;                 ///< configured M2
  bool gcp_ok = true;
  std::vector<Junction> junctions;
  std::string junction_error;         ///< set when the e-continuity check fails
};

GcpReport gcp_check(const HydroState& h, double gamma, double bound,
                    const LiftOptions& opts = {});

}  // namespace qhd
