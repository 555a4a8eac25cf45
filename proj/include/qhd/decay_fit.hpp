#pragma once

#include "qhd/functionals.hpp"

#include <span>
#include <string>
#include <vector>

namespace qhd {

/// Least-squares line through (log t, log value).
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 1.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinFitSamples = 8;

/// Fits samples with t_lo <= t <= t_hi. Throws std::invalid_argument with fewer
/// than kMinFitSamples samples in the window or a non-positive value there.
FitResult fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                    double t_hi);

/// sigma = min{1, (gamma - 1) / 2}.
double decay_sigma(double gamma);

struct DecayOptions {
  /// Overrides for the window ends; negative means automatic.
  double t_lo = -1.0;
  double t_hi = -1.0;
  /// t_lo is where max sqrt(rho) has dropped by this fraction.
  double amplitude_drop = 0.3;
  /// t_hi is the last time boundary_rho stays below this fraction of max rho(0).
  double boundary_fraction = 1e-10;
  double tolerance = 0.15;
};

struct DecayWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double boundary_time = -1.0;  ///< first time boundary_rho crossed; -1 if never
  bool inconclusive = false;
  std::string reason;
};

DecayWindow decay_window(std::span<const SnapshotMeasures> snaps, const DecayOptions& opts);

struct QuantityFit {
  std::string name;
  double fitted = 0.0;
  double target = 0.0;
  double stderr_slope = 0.0;
  /// "faster", "consistent", "slower" or "inconclusive". The estimates are upper
  /// bounds, so only "slower" fails.
  std::string verdict;
  bool pass() const { return verdict == "faster" || verdict == "consistent"; }
};

struct DispersiveReport {
  double gamma = 0.0;
  double sigma = 0.0;
  double tolerance = 0.15;
  DecayWindow window;
  /// ||d/dx sqrt(rho)||_2, int (Lambda - x/t sqrt(rho))^2, int rho^gamma, ||sqrt(rho)||_inf
  std::vector<QuantityFit> quantities;
  std::vector<double> times;
  std::vector<double> kinetic_ratio;  ///< 1/2 ||Lambda(t)||^2 / E(0)
  double kinetic_ratio_end = 0.0;     ///< at the end of the window
  bool kinetic_monotone = true;       ///< inside the window, with slack 0.02
};

DispersiveReport dispersive_suite(std::span<const SnapshotMeasures> snaps, double gamma,
                                  const DecayOptions& opts = {});
DispersiveReport dispersive_suite(const Trajectory& traj, double gamma,
                                  const DecayOptions& opts = {}, double tau_rel = 1e-8);

}  // namespace qhd
