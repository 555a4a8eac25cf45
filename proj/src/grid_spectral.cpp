#include "qhd/grid_spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qhd {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

class FftPlan {
public:
  explicit FftPlan(std::size_t n) : n_(n) {
    std::vector<complex> a(n), b(n);
    std::lock_guard lock(planner_mutex());
    const int size = static_cast<int>(n);
    const unsigned in_place = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const unsigned out_of_place = in_place | FFTW_PRESERVE_INPUT;
    const int dirs[2] = {FFTW_FORWARD, FFTW_BACKWARD};
    for (int d = 0; d < 2; ++d) {
      same_[d] = fftw_plan_dft_1d(size, as_fftw(a.data()), as_fftw(a.data()), dirs[d], in_place);
      apart_[d] =
          fftw_plan_dft_1d(size, as_fftw(a.data()), as_fftw(b.data()), dirs[d], out_of_place);
      if (same_[d] == nullptr || apart_[d] == nullptr)
        throw std::runtime_error("FFTW failed to create a plan");
    }
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    for (int d = 0; d < 2; ++d) {
      fftw_destroy_plan(same_[d]);
      fftw_destroy_plan(apart_[d]);
    }
  }

  void forward(std::span<const complex> in, std::span<complex> out) const { run(0, in, out); }

  void backward(std::span<const complex> in, std::span<complex> out) const {
    run(1, in, out);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : out) v *= scale;
  }

private:
  // New-array execution must keep the in-place/out-of-place kind of the plan.
  void run(int dir, std::span<const complex> in, std::span<complex> out) const {
    if (in.size() != n_ || out.size() != n_)
      throw std::invalid_argument("FFT buffer length does not match the grid");
    auto* src = as_fftw(const_cast<complex*>(in.data()));
    auto* dst = as_fftw(out.data());
    if (src == dst) {
      fftw_execute_dft(same_[dir], src, dst);
    } else {
      const auto* lo = in.data();
      const auto* hi = in.data() + n_;
      if (out.data() < hi && out.data() + n_ > lo)
        throw std::invalid_argument("FFT buffers partially overlap");
      fftw_execute_dft(apart_[dir], src, dst);
    }
  }

  std::size_t n_;
  fftw_plan same_[2] = {nullptr, nullptr};
  fftw_plan apart_[2] = {nullptr, nullptr};
};

Grid::Grid(double half_length, std::size_t n_points)
    : half_length_(half_length), n_(n_points), dx_(0.0) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid half length L must be positive and finite");
  if (n_points < 16)
    throw std::invalid_argument("grid needs at least 16 points");
  if ((n_points & (n_points - 1)) != 0)
    throw std::invalid_argument("grid point count must be a power of two");

  dx_ = 2.0 * half_length / static_cast<double>(n_);
  x_.resize(n_);
  k_.resize(n_);
  const double dk = std::numbers::pi / half_length;
  const auto half = static_cast<long>(n_ / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    x_[i] = -half_length + static_cast<double>(i) * dx_;
    const long j = static_cast<long>(i);
    k_[i] = dk * static_cast<double>(j < half ? j : j - static_cast<long>(n_));
  }
  plan_ = std::make_shared<const FftPlan>(n_);
}

double Grid::k_max() const { return std::numbers::pi / dx_; }

void Grid::forward(std::span<const complex> in, std::span<complex> out) const {
  plan_->forward(in, out);
}

void Grid::backward(std::span<const complex> in, std::span<complex> out) const {
  plan_->backward(in, out);
}

GridPtr make_grid(double half_length, std::size_t n_points) {
  return std::make_shared<const Grid>(half_length, n_points);
}

void require_finite(std::span<const double> values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << what << ": non-finite sample at index " << i;
      throw std::domain_error(msg.str());
    }
  }
}

void require_finite(std::span<const complex> values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      std::ostringstream msg;
      msg << what << ": non-finite sample at index " << i;
      throw std::domain_error(msg.str());
    }
  }
}

ComplexField deriv(const ComplexField& f, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("deriv: order must be 1, 2 or 3");
  require_finite(f.values, "deriv");
  const Grid& g = *f.grid;
  const std::size_t n = g.size();
  std::vector<complex> spec(n);
  g.forward(f.values, spec);
  const auto k = g.wavenumbers();
  const std::size_t nyquist = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == nyquist && order % 2 == 1) {
      spec[i] = 0.0;
      continue;
    }
    const complex ik(0.0, k[i]);
    complex factor = ik;
    for (int p = 1; p < order; ++p) factor *= ik;
    spec[i] *= factor;
  }
  ComplexField out(f.grid);
  g.backward(spec, out.values);
  return out;
}

RealField deriv(const RealField& f, int order) {
  ComplexField c(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
  const ComplexField d = deriv(c, order);
  RealField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = d[i].real();
  return out;
}

double integrate(std::span<const double> values, double dx) {
  require_finite(values, "integrate");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * dx;
}

double integrate(const RealField& f) { return integrate(f.values, f.grid->dx()); }

RealField antiderivative(const RealField& f, double offset) {
  require_finite(f.values, "antiderivative");
  const Grid& g = *f.grid;
  const std::size_t n = g.size();
  std::vector<complex> spec(n);
  std::vector<complex> buf(f.values.begin(), f.values.end());
  g.forward(buf, spec);
  const double mean = spec[0].real() / static_cast<double>(n);
  const auto k = g.wavenumbers();
  spec[0] = 0.0;
  spec[n / 2] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    if (i == n / 2) continue;
    spec[i] /= complex(0.0, k[i]);
  }
  g.backward(spec, buf);
  RealField out(f.grid);
  const auto x = g.x();
  const double base = buf[0].real();
  for (std::size_t i = 0; i < n; ++i)
    out[i] = buf[i].real() - base + mean * (x[i] - x[0]) + offset;
  return out;
}

namespace {

// Integral over [a, a + 1] of the Lagrange basis polynomials on nodes 0..m-1.
std::vector<double> lagrange_cell_weights(int m, int a) {
  std::vector<double> w(static_cast<std::size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    std::vector<double> coef{1.0};
    for (int q = 0; q < m; ++q) {
      if (q == j) continue;
      const double denom = static_cast<double>(j - q);
      std::vector<double> next(coef.size() + 1, 0.0);
      for (std::size_t p = 0; p < coef.size(); ++p) {
        next[p + 1] += coef[p] / denom;
        next[p] -= coef[p] * static_cast<double>(q) / denom;
      }
      coef = std::move(next);
    }
    double integral = 0.0;
    const double lo = a;
    const double hi = a + 1.0;
    for (std::size_t p = 0; p < coef.size(); ++p) {
      const double e = static_cast<double>(p + 1);
      integral += coef[p] * (std::pow(hi, e) - std::pow(lo, e)) / e;
    }
    w[static_cast<std::size_t>(j)] = integral;
  }
  return w;
}

}  // namespace

std::vector<double> cumulative_integral(std::span<const double> values, double dx) {
  require_finite(values, "cumulative_integral");
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;

  const int m = static_cast<int>(std::min<std::size_t>(6, n));
  std::vector<std::vector<double>> table;
  table.reserve(static_cast<std::size_t>(m - 1));
  for (int a = 0; a < m - 1; ++a) table.push_back(lagrange_cell_weights(m, a));

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const long ideal = static_cast<long>(i) - (m / 2 - 1);
    const long start = std::clamp<long>(ideal, 0, static_cast<long>(n) - m);
    const auto offset = static_cast<std::size_t>(static_cast<long>(i) - start);
    const auto& w = table[offset];
    double cell = 0.0;
    for (int j = 0; j < m; ++j)
      cell += w[static_cast<std::size_t>(j)] * values[static_cast<std::size_t>(start + j)];
    acc += cell * dx;
    out[i + 1] = acc;
  }
  return out;
}

double evaluate_at(const RealField& f, double x) {
  const Grid& g = *f.grid;
  const std::size_t n = g.size();
  std::vector<complex> buf(f.values.begin(), f.values.end());
  std::vector<complex> spec(n);
  g.forward(buf, spec);
  const auto k = g.wavenumbers();
  const double s = x - g.x()[0];
  double v = spec[0].real();
  for (std::size_t i = 1; i < n; ++i) {
    // Split the Nyquist mode evenly between +k and -k so the interpolant is real.
    const double c = std::cos(k[i] * s), sn = std::sin(k[i] * s);
    const double re = spec[i].real() * c - spec[i].imag() * sn;
    v += (i == n / 2) ? spec[i].real() * c : re;
  }
  return v / static_cast<double>(n);
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(std::span<const complex> values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const RealField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s * f.grid->dx());
}

double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return std::sqrt(s * f.grid->dx());
}

void dealias_two_thirds(const Grid& grid, std::span<complex> spectrum) {
  const double cutoff = (2.0 / 3.0) * grid.k_max();
  const auto k = grid.wavenumbers();
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    if (std::abs(k[i]) > cutoff) spectrum[i] = 0.0;
}

}  // namespace qhd
