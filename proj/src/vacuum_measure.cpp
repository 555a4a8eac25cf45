#include "qhd/vacuum_measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qhd {

double extrapolate_quadratic(std::span<const double> s, std::span<const double> y) {
  if (s.size() != y.size() || s.size() < 3)
    throw std::invalid_argument("extrapolate_quadratic: need at least 3 matching samples");
  // Normal equations for y = c0 + c1 s + c2 s^2.
  std::array<double, 5> m{};
  std::array<double, 3> r{};
  for (std::size_t k = 0; k < s.size(); ++k) {
    double p = 1.0;
    for (int q = 0; q < 5; ++q) {
      m[q] += p;
      if (q < 3) r[q] += p * y[k];
      p *= s[k];
    }
  }
  double a[3][4] = {{m[0], m[1], m[2], r[0]}, {m[1], m[2], m[3], r[1]}, {m[2], m[3], m[4], r[2]}};
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int i = c + 1; i < 3; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[piv][j]);
    for (int i = 0; i < 3; ++i) {
      if (i == c) continue;
      const double f = a[i][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return a[0][3] / a[0][0];
}

double boundary_offset(const VacuumRun& run) {
  if (run.isolated) return 1.0 + 0.5 * static_cast<double>(run.count - 1);
  return 1.0;
}

namespace {

double wrap_x(const Grid& g, double x) {
  const double L = g.half_length();
  const double len = g.length();
  while (x >= L) x -= len;
  while (x < -L) x += len;
  return x;
}

// Extrapolates samples at indices first, first + dir, ... to the point `offset`
// samples beyond `first` in the opposite direction.
double extrapolate_end(const RealField& f, std::size_t first, long dir, double offset) {
  const std::size_t n = f.size();
  std::array<double, kBoundaryStencil> s{}, y{};
  for (std::size_t k = 0; k < kBoundaryStencil; ++k) {
    const long idx = static_cast<long>(first) + dir * static_cast<long>(k);
    const auto i = static_cast<std::size_t>(((idx % static_cast<long>(n)) + static_cast<long>(n)) %
                                            static_cast<long>(n));
    s[k] = offset + static_cast<double>(k);
    y[k] = f[i];
  }
  return extrapolate_quadratic(s, y);
}

}  // namespace

VacuumDecomposition decompose_vacuum(const HydroState& h, double gamma) {
  const std::size_t n = h.sqrt_rho.size();
  const Grid& g = *h.grid();
  VacuumDecomposition dec;
  dec.n = n;
  const std::size_t vac = h.mask.count();
  if (vac == n) {
    dec.runs.push_back({0, n, false});
    return dec;
  }
  if (vac == 0) {
    dec.components.push_back({0, n, {}, {}, {}, {}});
    return dec;
  }

  // Start the sweep at the first sample of some vacuum run.
  std::size_t start = 0;
  while (!(h.mask[start] && !h.mask[(start + n - 1) % n])) ++start;

  struct Piece {
    bool vacuum;
    std::size_t begin, count;
  };
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    const bool v = h.mask[i];
    if (pieces.empty() || pieces.back().vacuum != v)
      pieces.push_back({v, i, 1});
    else
      ++pieces.back().count;
  }
  // pieces alternate vacuum, component, vacuum, ..., component.
  const std::size_t m = pieces.size() / 2;
  for (std::size_t j = 0; j < m; ++j) {
    const Piece& p = pieces[2 * j];
    dec.runs.push_back({p.begin, p.count, p.count <= 2});
  }

  const RealField e = energy_density(h, gamma);
  RealField sqrt_e(h.grid());
  for (std::size_t i = 0; i < n; ++i) sqrt_e[i] = std::sqrt(std::max(e[i], 0.0));

  for (std::size_t j = 0; j < m; ++j) {
    const Piece& p = pieces[2 * j + 1];
    Component c;
    c.begin = p.begin;
    c.count = p.count;
    c.left_run = j;
    c.right_run = (j + 1) % m;
    if (c.count >= kBoundaryStencil) {
      const VacuumRun& lr = dec.runs[*c.left_run];
      const VacuumRun& rr = dec.runs[*c.right_run];
      const std::size_t first = c.begin;
      const std::size_t last = (c.begin + c.count - 1) % n;
      const double ol = boundary_offset(lr);
      const double orr = boundary_offset(rr);
      BoundaryValues L, R;
      L.x = wrap_x(g, g.x()[first] - ol * g.dx());
      L.dx_sqrt_rho = extrapolate_end(h.dx_sqrt_rho, first, +1, ol);
      L.sqrt_e = extrapolate_end(sqrt_e, first, +1, ol);
      R.x = wrap_x(g, g.x()[last] + orr * g.dx());
      R.dx_sqrt_rho = extrapolate_end(h.dx_sqrt_rho, last, -1, orr);
      R.sqrt_e = extrapolate_end(sqrt_e, last, -1, orr);
      c.left = L;
      c.right = R;
    }
    dec.components.push_back(c);
  }
  std::sort(dec.components.begin(), dec.components.end(),
            [](const Component& a, const Component& b) { return a.begin < b.begin; });
  return dec;
}

std::string to_string(AtomFlag f) {
  switch (f) {
    case AtomFlag::ok:
      return "ok";
    case AtomFlag::unreliable:
      return "unreliable";
    case AtomFlag::close:
      return "close";
  }
  return "ok";
}

namespace {

AtomFlag worse(AtomFlag a, AtomFlag b) {
  auto rank = [](AtomFlag f) { return f == AtomFlag::unreliable ? 2 : (f == AtomFlag::close ? 1 : 0); };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace

LambdaMeasure lambda_measure(const HydroState& h, const ChemicalFields& chem,
                             const VacuumDecomposition& dec) {
  LambdaMeasure out{chem.lambda, {}};
  const std::size_t n = dec.n;
  const Grid& g = *h.grid();

  // Key: (run, side). Isolated runs use a single key so both ends merge.
  std::map<std::pair<std::size_t, int>, Atom> acc;
  auto add = [&](std::size_t run, int side, double x, double w, AtomFlag flag) {
    const auto key = std::make_pair(run, dec.runs[run].isolated ? 0 : side);
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(key, Atom{x, w, flag});
    } else {
      it->second.weight += w;
      it->second.flag = worse(it->second.flag, flag);
    }
  };

  for (const Component& c : dec.components) {
    if (!c.left_run) continue;
    const VacuumRun& lr = dec.runs[*c.left_run];
    const VacuumRun& rr = dec.runs[*c.right_run];
    AtomFlag flag = AtomFlag::ok;
    if (c.count <= kBoundaryStencil) flag = AtomFlag::close;
    if (!c.left) flag = AtomFlag::unreliable;

    double xl, xr, wl, wr;
    if (c.left) {
      xl = c.left->x;
      xr = c.right->x;
      wl = -0.5 * c.left->dx_sqrt_rho;
      wr = 0.5 * c.right->dx_sqrt_rho;
    } else {
      // Too narrow to extrapolate: take the outermost samples as estimates.
      const std::size_t first = c.begin;
      const std::size_t last = (c.begin + c.count - 1) % n;
      xl = wrap_x(g, g.x()[first] - boundary_offset(lr) * g.dx());
      xr = wrap_x(g, g.x()[last] + boundary_offset(rr) * g.dx());
      wl = -0.5 * h.dx_sqrt_rho[first];
      wr = 0.5 * h.dx_sqrt_rho[last];
    }
    const AtomFlag fl = (!lr.isolated && lr.count <= kBoundaryStencil) ? worse(flag, AtomFlag::close) : flag;
    const AtomFlag fr = (!rr.isolated && rr.count <= kBoundaryStencil) ? worse(flag, AtomFlag::close) : flag;
    add(*c.left_run, +1, xl, wl, fl);
    add(*c.right_run, -1, xr, wr, fr);
  }

  const double floor = kAtomFloor * max_abs(h.dx_sqrt_rho.values);
  for (const auto& [key, atom] : acc)
    if (std::abs(atom.weight) >= floor && atom.weight != 0.0) out.atoms.push_back(atom);
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const Atom& a, const Atom& b) { return a.x < b.x; });
  return out;
}

double test_against(const LambdaMeasure& measure, const RealField& eta) {
  double s = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) s += eta[i] * measure.density[i];
  s *= eta.grid->dx();
  for (const Atom& a : measure.atoms) s += a.weight * evaluate_at(eta, a.x);
  return s;
}

double sqrt_e_sup(const HydroState& h, const Component& c, double gamma) {
  const RealField e = energy_density(h, gamma);
  double m = 0.0;
  for (std::size_t k = 0; k < c.count; ++k)
    m = std::max(m, std::sqrt(std::max(e[c.index(k, e.size())], 0.0)));
  return m;
}

}  // namespace qhd
