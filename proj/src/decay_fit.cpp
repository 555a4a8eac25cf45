#include "qhd/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qhd {

FitResult fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                    double t_hi) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_decay: times and values differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(times[i] > 0.0)) throw std::invalid_argument("fit_decay: window must have t > 0");
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "fit_decay: non-positive value " << values[i] << " at t = " << times[i];
      throw std::invalid_argument(msg.str());
    }
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(values[i]));
  }
  const std::size_t n = lx.size();
  if (n < kMinFitSamples) {
    std::ostringstream msg;
    msg << "fit_decay: " << n << " samples in [" << t_lo << ", " << t_hi << "], need "
        << kMinFitSamples;
    throw std::invalid_argument(msg.str());
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_decay: window has a single time");
  FitResult r;
  r.samples = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    sse += e * e;
  }
  r.stderr_slope = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  r.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return r;
}

double decay_sigma(double gamma) { return std::min(1.0, 0.5 * (gamma - 1.0)); }

DecayWindow decay_window(std::span<const SnapshotMeasures> snaps, const DecayOptions& opts) {
  DecayWindow w;
  if (snaps.empty()) {
    w.inconclusive = true;
    w.reason = "empty trajectory";
    return w;
  }
  const double amp0 = snaps[0].sqrt_rho_max;
  const double rho0 = snaps[0].rho_max;
  w.t_lo = snaps.back().frame.t;
  for (const auto& s : snaps) {
    if (s.frame.t > 0.0 && s.sqrt_rho_max <= (1.0 - opts.amplitude_drop) * amp0) {
      w.t_lo = s.frame.t;
      break;
    }
  }
  w.t_hi = snaps.back().frame.t;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    if (snaps[k].frame.boundary_rho > opts.boundary_fraction * rho0) {
      w.boundary_time = snaps[k].frame.t;
      w.t_hi = k > 0 ? snaps[k - 1].frame.t : 0.0;
      break;
    }
  }
  if (opts.t_lo >= 0.0) w.t_lo = opts.t_lo;
  if (opts.t_hi >= 0.0) w.t_hi = std::min(w.t_hi, opts.t_hi);

  std::size_t inside = 0;
  for (const auto& s : snaps)
    if (s.frame.t >= w.t_lo && s.frame.t <= w.t_hi) ++inside;
  std::ostringstream why;
  if (!(w.t_lo > 0.0) || w.t_hi < 4.0 * w.t_lo) {
    why << "window collapsed: t_hi = " << w.t_hi << " < 4 t_lo = " << 4.0 * w.t_lo;
    if (w.boundary_time >= 0.0) why << " (boundary reached at t = " << w.boundary_time << ")";
  } else if (inside < kMinFitSamples) {
    why << "only " << inside << " snapshots in the window";
  }
  w.reason = why.str();
  w.inconclusive = !w.reason.empty();
  return w;
}

DispersiveReport dispersive_suite(std::span<const SnapshotMeasures> snaps, double gamma,
                                  const DecayOptions& opts) {
  DispersiveReport r;
  r.gamma = gamma;
  r.sigma = decay_sigma(gamma);
  r.tolerance = opts.tolerance;
  r.window = decay_window(snaps, opts);

  const double s = r.sigma;
  const char* names[4] = {"grad_sqrt_rho_l2", "kinetic_dispersion", "rho_gamma_integral",
                          "sqrt_rho_max"};
  const double targets[4] = {-s, -2.0 * s, -2.0 * s, -0.5 * s};
  std::vector<double> t, q[4];
  for (const auto& m : snaps) {
    t.push_back(m.frame.t);
    q[0].push_back(m.grad_sqrt_rho_l2);
    q[1].push_back(m.kinetic_dispersion);
    q[2].push_back(m.rho_gamma);
    q[3].push_back(m.sqrt_rho_max);
  }
  for (int k = 0; k < 4; ++k) {
    QuantityFit f;
    f.name = names[k];
    f.target = targets[k];
    if (r.window.inconclusive) {
      f.verdict = "inconclusive";
    } else {
      try {
        const FitResult fit = fit_decay(t, q[k], r.window.t_lo, r.window.t_hi);
        f.fitted = fit.slope;
        f.stderr_slope = fit.stderr_slope;
        if (fit.slope < f.target - opts.tolerance)
          f.verdict = "faster";
        else if (fit.slope <= f.target + opts.tolerance)
          f.verdict = "consistent";
        else
          f.verdict = "slower";
      } catch (const std::invalid_argument&) {
        f.verdict = "inconclusive";
      }
    }
    r.quantities.push_back(f);
  }

  const double E0 = snaps.empty() ? 0.0 : snaps[0].frame.E;
  double prev = -1.0;
  for (const auto& m : snaps) {
    const double ratio = E0 > 0.0 ? m.half_lambda_sq / E0 : 0.0;
    r.times.push_back(m.frame.t);
    r.kinetic_ratio.push_back(ratio);
    if (m.frame.t <= r.window.t_hi) r.kinetic_ratio_end = ratio;
    if (m.frame.t >= r.window.t_lo && m.frame.t <= r.window.t_hi) {
      if (prev >= 0.0 && ratio < prev - 0.02) r.kinetic_monotone = false;
      prev = ratio;
    }
  }
  return r;
}

DispersiveReport dispersive_suite(const Trajectory& traj, double gamma, const DecayOptions& opts,
                                  double tau_rel) {
  const auto m = analyze_trajectory(traj, {gamma, tau_rel});
  return dispersive_suite(m, gamma, opts);
}

}  // namespace qhd
