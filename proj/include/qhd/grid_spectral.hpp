#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qhd {

using complex = std::complex<double>;

class FftPlan;

/// Periodic grid on [-L, L) with N = 2^m samples and the matching FFT wavenumbers.
///
/// Grids are immutable and shared between fields through GridPtr. The FFT plans
/// held by a grid are created once and only executed afterwards, so one grid can
/// be used from any number of threads.
class Grid {
public:
  Grid(double half_length, std::size_t n_points);

  double half_length() const { return half_length_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return 2.0 * half_length_; }

  std::span<const double> x() const { return x_; }
  std::span<const double> wavenumbers() const { return k_; }

  /// Largest resolved |k| (the Nyquist wavenumber).
  double k_max() const;

  /// Unnormalized forward DFT.
  void forward(std::span<const complex> in, std::span<complex> out) const;
  /// Inverse DFT including the 1/N factor.
  void backward(std::span<const complex> in, std::span<complex> out) const;

private:
  double half_length_;
  std::size_t n_;
  double dx_;
  std::vector<double> x_;
  std::vector<double> k_;
  std::shared_ptr<const FftPlan> plan_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double half_length, std::size_t n_points);

/// Samples of a field on a grid.
template <class T>
struct Field {
  GridPtr grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), values(grid->size(), T{}) {}
  Field(GridPtr g, std::vector<T> v) : grid(std::move(g)), values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
};

using RealField = Field<double>;
using ComplexField = Field<complex>;

/// Builds a real field by evaluating fn at every grid point.
template <class Fn>
RealField sample_real(const GridPtr& grid, Fn&& fn) {
  RealField f(grid);
  const auto x = grid->x();
  for (std::size_t i = 0; i < grid->size(); ++i) f[i] = fn(x[i]);
  return f;
}

template <class Fn>
ComplexField sample_complex(const GridPtr& grid, Fn&& fn) {
  ComplexField f(grid);
  const auto x = grid->x();
  for (std::size_t i = 0; i < grid->size(); ++i) f[i] = fn(x[i]);
  return f;
}

/// Throws std::domain_error naming `what` if any sample is NaN or infinite.
void require_finite(std::span<const double> values, const std::string& what);
void require_finite(std::span<const complex> values, const std::string& what);

/// Spectral derivative of order 1, 2 or 3. Odd orders drop the Nyquist mode.
ComplexField deriv(const ComplexField& f, int order);
RealField deriv(const RealField& f, int order);

/// Rectangle-rule quadrature, sum_i f_i dx.
double integrate(const RealField& f);
double integrate(std::span<const double> values, double dx);

/// Antiderivative G(x) = int_{-L}^{x} f ds + C of periodic data.
///
/// The zero-mean part is integrated in Fourier space and the mean contributes
/// a linear ramp, so G(x_0) = C and the result is exact for resolved data.
RealField antiderivative(const RealField& f, double offset);

/// Cumulative integral of samples on a uniform grid, starting at 0.
///
/// Each cell [x_i, x_{i+1}] is integrated with a six-point Lagrange stencil
/// (narrower near the ends, or for short inputs), which gives sixth-order
/// accuracy for smooth data that need not be periodic.
std::vector<double> cumulative_integral(std::span<const double> values, double dx);

/// Trigonometric interpolant of periodic samples evaluated at any x.
double evaluate_at(const RealField& f, double x);

double max_abs(std::span<const double> values);
double max_abs(std::span<const complex> values);

/// Discrete L2 norm, sqrt(sum |f_i|^2 dx).
double l2_norm(const RealField& f);
double l2_norm(const ComplexField& f);

/// Zeroes every mode with |k| > (2/3) k_max.
void dealias_two_thirds(const Grid& grid, std::span<complex> spectrum);

}  // namespace qhd
