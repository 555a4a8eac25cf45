#pragma once

#include "qhd/functionals.hpp"
#include "qhd/polar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qhd {

/// Maximal run of vacuum samples. Runs may wrap around the periodic edge.
struct VacuumRun {
  std::size_t begin = 0;
  std::size_t count = 0;
  /// Width of at most two samples with non-vacuum on both sides: the discrete
  /// stand-in for an isolated zero of rho.
  bool isolated = false;
};

/// One-sided limits at one end of a component.
struct BoundaryValues {
  double x = 0.0;  ///< boundary location
  double dx_sqrt_rho = 0.0;
  double sqrt_e = 0.0;
};

/// Maximal run of non-vacuum samples [begin, begin + count), taken mod N.
struct Component {
  std::size_t begin = 0;
  std::size_t count = 0;
  /// Index into VacuumDecomposition::runs of the vacuum run on each side; empty
  /// when the state has no vacuum at all.
  std::optional<std::size_t> left_run;
  std::optional<std::size_t> right_run;
  /// Omitted when the component is narrower than the extrapolation stencil.
  std::optional<BoundaryValues> left;
  std::optional<BoundaryValues> right;

  bool reliable() const { return left.has_value() || !left_run.has_value(); }
  std::size_t index(std::size_t k, std::size_t n) const { return (begin + k) % n; }
};

struct VacuumDecomposition {
  std::size_t n = 0;
  std::vector<Component> components;  ///< ordered by start index
  std::vector<VacuumRun> runs;
};

/// Samples per one-sided extrapolation stencil.
inline constexpr std::size_t kBoundaryStencil = 4;

/// Value at distance 0 of the least-squares quadratic through (s_k, y_k).
double extrapolate_quadratic(std::span<const double> s, std::span<const double> y);

/// Distance in samples from the outermost sample of a component to the
/// boundary point inside the adjacent vacuum run.
double boundary_offset(const VacuumRun& run);

/// Splits the grid into non-vacuum components and extrapolates d/dx sqrt(rho)
/// and sqrt(e) to each end. The boundary sits at the centre of an isolated
/// vacuum run and at the first vacuum sample of a fat one.
VacuumDecomposition decompose_vacuum(const HydroState& h, double gamma);

enum class AtomFlag { ok, unreliable, close };

std::string to_string(AtomFlag f);

struct Atom {
  double x = 0.0;
  double weight = 0.0;
  AtomFlag flag = AtomFlag::ok;
};

struct LambdaMeasure {
  RealField density;
  std::vector<Atom> atoms;
};

/// Atom weights below this fraction of max |d/dx sqrt(rho)| are dropped.
inline constexpr double kAtomFloor = 1e-6;

/// lambda dx plus atoms -1/2 (sqrt rho)_x(a+) at left ends and
/// +1/2 (sqrt rho)_x(b-) at right ends; atoms sharing a vacuum run are merged.
LambdaMeasure lambda_measure(const HydroState& h, const ChemicalFields& chem,
                             const VacuumDecomposition& dec);

/// <eta, measure> = int eta lambda + sum_j w_j eta(x_j).
double test_against(const LambdaMeasure& measure, const RealField& eta);

/// Largest sqrt(e) over the samples of one component.
double sqrt_e_sup(const HydroState& h, const Component& c, double gamma);

}  // namespace qhd
