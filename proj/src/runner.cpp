#include "qhd/runner.hpp"

#include "qhd/decay_fit.hpp"
#include "qhd/nls_solver.hpp"
#include "qhd/vacuum_measure.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace qhd {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const RunConfig& cfg, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !cfg.base_dir.empty()) return cfg.base_dir / path;
  return path;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t\r");
    const auto e = item.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

// Reads a header row plus numeric rows. Lines starting with '#' are comments;
// a comment of the form "# t=<value>" sets *t.
std::vector<std::vector<double>> read_table(const fs::path& path,
                                            const std::vector<std::string>& wanted, double* t) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(path.string() + ": cannot open");
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> cols(wanted.size());
  std::vector<int> index(wanted.size(), -1);
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      const auto pos = line.find("t=");
      if (t != nullptr && pos != std::string::npos) *t = std::stod(line.substr(pos + 2));
      continue;
    }
    const auto cells = split_csv_line(line);
    if (header.empty()) {
      header = cells;
      for (std::size_t w = 0; w < wanted.size(); ++w) {
        const auto it = std::find(header.begin(), header.end(), wanted[w]);
        if (it == header.end())
          throw std::invalid_argument(path.string() + ": missing column '" + wanted[w] + "'");
        index[w] = static_cast<int>(it - header.begin());
      }
      continue;
    }
    if (cells.size() != header.size())
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                               ": wrong number of cells");
    for (std::size_t w = 0; w < wanted.size(); ++w) {
      try {
        cols[w].push_back(std::stod(cells[static_cast<std::size_t>(index[w])]));
      } catch (const std::exception&) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                 ": not a number in column '" + wanted[w] + "'");
      }
    }
  }
  if (header.empty()) throw std::invalid_argument(path.string() + ": no header row");
  return cols;
}

GridPtr grid_from_x(const std::vector<double>& x, const fs::path& path) {
  const std::size_t n = x.size();
  if (n < 16) throw std::invalid_argument(path.string() + ": need at least 16 rows");
  const double L = -x[0];
  auto g = make_grid(L, n);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(x[i] - g->x()[i]) > 1e-9 * std::max(1.0, L))
      throw std::invalid_argument(path.string() + ": x column is not the uniform grid on [-L, L)");
  return g;
}

void check_grid_matches(const GridPtr& g, const RunConfig& cfg, const fs::path& path) {
  if (static_cast<long>(g->size()) != cfg.grid.N ||
      std::abs(g->half_length() - cfg.grid.L) > 1e-9 * cfg.grid.L)
    throw ConfigError({"initial_data.file: grid of " + path.string() +
                       " does not match grid.L and grid.N"});
}

double fmt_ok(double v) { return std::isfinite(v) ? v : std::nan(""); }

json to_json(const DispersiveReport& r) {
  json q = json::array();
  for (const auto& f : r.quantities)
    q.push_back({{"name", f.name},
                 {"fitted", fmt_ok(f.fitted)},
                 {"target", f.target},
                 {"stderr", fmt_ok(f.stderr_slope)},
                 {"verdict", f.verdict}});
  return {{"gamma", r.gamma},
          {"sigma", r.sigma},
          {"tolerance", r.tolerance},
          {"window",
           {{"t_lo", r.window.t_lo},
            {"t_hi", r.window.t_hi},
            {"boundary_time", r.window.boundary_time},
            {"inconclusive", r.window.inconclusive},
            {"reason", r.window.reason}}},
          {"quantities", q},
          {"kinetic_ratio_end", r.kinetic_ratio_end},
          {"kinetic_monotone", r.kinetic_monotone}};
}

json to_json(const Junction& j) {
  return {{"x", j.x},
          {"isolated", j.isolated},
          {"matched", j.matched},
          {"loop_closure", j.loop_closure},
          {"theta", j.theta},
          {"modulus_left", j.modulus_left},
          {"modulus_right", j.modulus_right},
          {"note", j.note}};
}

json to_json(const GcpReport& r) {
  json js = json::array();
  for (const auto& j : r.junctions) js.push_back(to_json(j));
  return {{"lambda_l2", fmt_ok(r.lambda_l2)},
          {"dxJ_over_sqrt_rho_l2", fmt_ok(r.dxJ_over_sqrt_rho_l2)},
          {"dt_sqrt_rho_l2", fmt_ok(r.dt_sqrt_rho_l2)},
          {"bound", r.bound},
          {"gcp_ok", r.gcp_ok},
          {"junctions", js},
          {"junction_error", r.junction_error}};
}

json to_json(const LambdaMeasure& m, const std::string& ref) {
  json atoms = json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"x", a.x}, {"w", a.weight}, {"flag", to_string(a.flag)}});
  return {{"density_csv_ref", ref.empty() ? json(nullptr) : json(ref)}, {"atoms", atoms}};
}

struct SummaryInputs {
  double gamma = 2.0;
  double tau_rel = 1e-8;
  const DiagnosticsConfig* diag = nullptr;
  std::vector<SnapshotMeasures> measures;
  const HydroState* initial = nullptr;
  std::string density_ref;
  const LiftOptions* lift = nullptr;
  std::vector<Junction> junctions;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
};

json summarize(const SummaryInputs& in) {
  json s;
  s["schema"] = "qhd-summary v1";
  s["status"] = in.errors.empty() ? "ok" : "error";
  s["gamma"] = in.gamma;
  s["snapshots"] = in.measures.size();
  const auto& m = in.measures;
  if (!m.empty()) {
    const auto& f0 = m.front().frame;
    double dm = 0.0, de = 0.0, dp = 0.0;
    const double pscale = std::max(std::abs(f0.P), std::sqrt(2.0 * f0.M * f0.E));
    for (const auto& x : m) {
      if (f0.M > 0.0) dm = std::max(dm, std::abs(x.frame.M - f0.M) / f0.M);
      if (f0.E > 0.0) de = std::max(de, std::abs(x.frame.E - f0.E) / f0.E);
      if (pscale > 0.0) dp = std::max(dp, std::abs(x.frame.P - f0.P) / pscale);
    }
    s["t_final"] = m.back().frame.t;
    s["drifts"] = {{"mass", dm}, {"energy", de}, {"momentum", dp}};
  }
  const DiagnosticsConfig& d = *in.diag;
  if (d.decay && !m.empty()) {
    DecayOptions o;
    o.t_lo = d.decay_t_lo;
    o.t_hi = d.decay_t_hi;
    o.tolerance = d.decay_tolerance;
    s["dispersive"] = to_json(dispersive_suite(m, in.gamma, o));
  }
  if (in.initial != nullptr) {
    if (d.gcp) {
      LiftOptions lo = in.lift != nullptr ? *in.lift : LiftOptions{};
      s["gcp"] = to_json(gcp_check(*in.initial, in.gamma, d.gcp_bound, lo));
    }
    if (d.atoms) {
      const ChemicalFields chem = compute_lambda(*in.initial, in.gamma);
      const VacuumDecomposition dec = decompose_vacuum(*in.initial, in.gamma);
      s["lambda_measure"] = to_json(lambda_measure(*in.initial, chem, dec), in.density_ref);
    }
  }
  if (d.pseudo_conformal && !m.empty()) {
    const PcReport r = pseudo_conformal_check(m, in.gamma);
    double hmax = 0.0;
    for (const auto& x : m)
      hmax = std::max(hmax, std::abs(x.frame.H - x.frame.H_alt) / (1.0 + std::abs(x.frame.H)));
    s["pseudo_conformal"] = {{"right", r.right},
                             {"margin", r.margin},
                             {"identity_residual", r.identity_residual},
                             {"holds", r.holds},
                             {"F_growth_slope", r.F_growth_slope},
                             {"F_growth_bound", r.F_growth_bound},
                             {"H_form_max_relative_gap", hmax}};
  }
  if (d.morawetz && !m.empty()) {
    const MorawetzReport r = morawetz_residual(m, in.gamma);
    s["morawetz"] = {{"max_residual", r.max_residual},
                     {"dissipation_scale", r.dissipation_scale},
                     {"relative_residual", r.relative_residual},
                     {"drho_sq_spacetime", r.drho_sq_spacetime},
                     {"rho_gamma1_spacetime", r.rho_gamma1_spacetime},
                     {"balance_lhs", r.balance_lhs},
                     {"G_bound", r.G_bound},
                     {"M1", r.M1},
                     {"within_bound", r.within_bound}};
    const SpaceTimeReport st = space_time_bounds(m);
    s["space_time"] = {{"T", st.T},
                       {"e_l2tx", st.e_l2tx},
                       {"d2rho_l2tx", st.d2rho_l2tx},
                       {"dxJ_linf_l2", st.dxJ_linf_l2},
                       {"scaled_total", st.scaled_total}};
  }
  if (d.i_growth && !m.empty()) {
    const GronwallReport r = i_growth_check(m, in.gamma);
    s["i_growth"] = {{"max_ratio", fmt_ok(r.max_ratio)},
                     {"c_fitted", r.c_fitted},
                     {"c_is_fitted", true},
                     {"envelope_at_end", r.envelope_at_end},
                     {"rigorous_envelope_at_end", r.rigorous_envelope_at_end},
                     {"exceeded", r.exceeded},
                     {"finite", r.finite},
                     {"degenerate", r.degenerate}};
  }
  json js = json::array();
  for (const auto& j : in.junctions) js.push_back(to_json(j));
  s["lifting"] = {{"junctions", js}};
  s["warnings"] = in.warnings;
  s["errors"] = in.errors;
  return s;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error(p.string() + ": cannot write");
  out << text;
}

std::string fields_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_%04zu.csv", k);
  return buf;
}

}  // namespace

HydroState build_initial_hydro(const RunConfig& cfg, const GridPtr& g) {
  const auto& d = cfg.initial_data;
  const double tau = cfg.lifting.tau_rel;
  if (d.family == "custom_file") {
    const fs::path p = resolve(cfg, d.file);
    HydroState h = read_hydro_csv(p, tau);
    check_grid_matches(h.grid(), cfg, p);
    return make_hydro_state(RealField(g, h.sqrt_rho.values), RealField(g, h.Lambda.values), tau);
  }
  RealField s(g), lam(g);
  const auto x = g->x();
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double X = x[i] - d.center;
    if (d.family == "gaussian") {
      s[i] = d.background + d.amplitude * std::exp(-X * X / (d.width * d.width));
      lam[i] = d.velocity * s[i];
    } else if (d.family == "plane_wave") {
      s[i] = d.amplitude;
      lam[i] = std::numbers::pi * d.mode / cfg.grid.L * d.amplitude;
    } else {
      s[i] = d.amplitude * std::abs(X) * std::exp(-X * X / (2.0 * d.width * d.width));
    }
  }
  return make_hydro_state(s, lam, tau);
}

ComplexField build_initial_state(const RunConfig& cfg, std::vector<Junction>* lift_info) {
  const auto g = make_grid(cfg.grid.L, static_cast<std::size_t>(cfg.grid.N));
  const auto& d = cfg.initial_data;
  if (d.kind == "hydrodynamic") {
    const HydroState h = build_initial_hydro(cfg, g);
    LiftOptions o;
    o.delta = cfg.lifting.delta;
    o.conditioning_floor = cfg.lifting.conditioning_floor;
    o.junction_tol = cfg.lifting.junction_tol;
    if (!cfg.lifting.h2) return lift_h1(h, o.delta);
    LiftH2Result r = lift_h2(h, cfg.params.gamma, o);
    if (lift_info != nullptr) *lift_info = r.junctions;
    return std::move(r.psi);
  }
  if (d.family == "custom_file") {
    const fs::path p = resolve(cfg, d.file);
    ComplexField psi = read_psi_csv(p);
    check_grid_matches(psi.grid, cfg, p);
    return ComplexField(g, psi.values);
  }
  const double k = std::numbers::pi * d.mode / cfg.grid.L;
  return sample_complex(g, [&](double x) -> complex {
    const double X = x - d.center;
    if (d.family == "gaussian")
      return d.background +
             d.amplitude * std::exp(-X * X / (d.width * d.width)) * std::polar(1.0, d.velocity * x);
    if (d.family == "plane_wave") return d.amplitude * std::polar(1.0, k * x);
    return d.amplitude * X * std::exp(-X * X / (2.0 * d.width * d.width));
  });
}

void write_diagnostics_csv(std::ostream& out, std::span<const SnapshotMeasures> m) {
  out << "# " << kDiagnosticsSchema << "\n";
  for (std::size_t c = 0; c < kDiagnosticsColumns.size(); ++c)
    out << (c ? "," : "") << kDiagnosticsColumns[c];
  out << "\n" << std::setprecision(17);
  for (const auto& s : m) {
    const auto& f = s.frame;
    out << f.t << ',' << f.M << ',' << f.E << ',' << f.P << ',' << f.I << ',' << f.H << ','
        << f.H_alt << ',' << f.moment_inertia << ',' << f.morawetz << ','
        << f.entropy_residual_norm << ',' << f.boundary_rho << "\n";
  }
}

void write_decay_csv(std::ostream& out, std::span<const SnapshotMeasures> m) {
  out << "# " << kDecaySchema << "\n";
  for (std::size_t c = 0; c < kDecayColumns.size(); ++c)
    out << (c ? "," : "") << kDecayColumns[c];
  out << "\n" << std::setprecision(17);
  for (const auto& s : m)
    out << s.frame.t << ',' << s.grad_sqrt_rho_l2 << ',' << s.kinetic_dispersion << ','
        << s.rho_gamma << ',' << s.sqrt_rho_max << "\n";
}

void write_fields_csv(std::ostream& out, double t, const HydroState& h,
                      const ChemicalFields& chem, double gamma) {
  const RealField e = energy_density(h, gamma);
  const auto x = h.grid()->x();
  out << "# " << kFieldsSchema << "\n" << std::setprecision(17) << "# t=" << t << "\n";
  for (std::size_t c = 0; c < kFieldsColumns.size(); ++c)
    out << (c ? "," : "") << kFieldsColumns[c];
  out << "\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << x[i] << ',' << h.sqrt_rho[i] << ',' << h.Lambda[i] << ',' << h.rho[i] << ','
        << h.J[i] << ',' << e[i] << ',' << chem.lambda[i] << "\n";
}

FieldsSnapshot read_fields_csv(const fs::path& path) {
  FieldsSnapshot s;
  s.columns = read_table(path, kFieldsColumns, &s.t);
  return s;
}

HydroState read_hydro_csv(const fs::path& path, double tau_rel) {
  const auto cols = read_table(path, {"x", "sqrt_rho", "Lambda"}, nullptr);
  const GridPtr g = grid_from_x(cols[0], path);
  return make_hydro_state(RealField(g, cols[1]), RealField(g, cols[2]), tau_rel);
}

void write_psi_csv(std::ostream& out, const ComplexField& psi) {
  const auto x = psi.grid->x();
  out << std::setprecision(17) << "x,re,im\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << x[i] << ',' << psi[i].real() << ',' << psi[i].imag() << "\n";
}

ComplexField read_psi_csv(const fs::path& path) {
  const auto cols = read_table(path, {"x", "re", "im"}, nullptr);
  const GridPtr g = grid_from_x(cols[0], path);
  ComplexField psi(g);
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = complex(cols[1][i], cols[2][i]);
  return psi;
}

RunArtifacts run(const RunConfig& cfg) {
  RunArtifacts art;
  art.directory = output_directory(cfg);
  fs::create_directories(art.directory);
  const double gamma = cfg.params.gamma;
  const double tau = cfg.lifting.tau_rel;

  auto warn = [&](const std::string& w) {
    art.warnings.push_back(w);
    std::cerr << "warning: " << w << "\n";
  };

  std::vector<Junction> junctions;
  const ComplexField psi0 = build_initial_state(cfg, &junctions);
  const double dx = psi0.grid->dx();
  if (cfg.params.dt >= dx * dx) {
    std::ostringstream w;
    w << "dt = " << cfg.params.dt << " is not below dx^2 = " << dx * dx;
    warn(w.str());
  }

  NlsParams p;
  p.gamma = gamma;
  p.dt = cfg.params.dt;
  p.t_end = cfg.params.t_end;
  p.dealias = cfg.params.dealias;
  Trajectory traj;
  std::vector<std::string> errors;
  try {
    traj = evolve(psi0, p, static_cast<std::size_t>(cfg.params.save_every));
  } catch (const NumericalError& e) {
    traj = e.partial;
    errors.push_back(e.what());
    art.status = ExitCode::numerical;
    art.error = e.what();
  }

  auto fail = [&](const std::string& what) {
    errors.push_back(what);
    art.status = ExitCode::numerical;
    if (art.error.empty()) art.error = what;
  };

  // Snapshots whose density functionals overflow cannot be analyzed; keep the prefix.
  std::size_t usable = 0;
  for (; usable < traj.states.size(); ++usable) {
    double peak = 0.0;
    for (const auto& v : traj.states[usable].values) peak = std::max(peak, std::norm(v));
    if (!std::isfinite(peak) || !std::isfinite(std::pow(peak, gamma) * 2.0 * cfg.grid.L)) break;
  }
  if (usable < traj.states.size()) {
    std::ostringstream w;
    w << "density functionals overflow at t = " << traj.times[usable];
    fail(w.str());
    traj.states.resize(usable);
    traj.times.resize(usable);
  }

  std::vector<HydroState> states;
  states.reserve(traj.states.size());
  for (const auto& psi : traj.states) states.push_back(polar_factorize(psi, tau));
  std::vector<SnapshotMeasures> m;
  try {
    m = analyze_states(traj.times, states, gamma);
  } catch (const std::domain_error& e) {
    fail(e.what());
    states.clear();
  }
  art.snapshots = m.size();

  if (!m.empty()) {
    const double limit = 1e-10 * m.front().rho_max;
    for (const auto& s : m) {
      if (s.frame.boundary_rho > limit) {
        std::ostringstream w;
        w << "density above 1e-10 max(rho_0) reached |x| > 0.8 L at t = " << s.frame.t;
        warn(w.str());
        break;
      }
    }
  }

  const bool csv = std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "csv") !=
                   cfg.output.formats.end();
  const bool js = std::find(cfg.output.formats.begin(), cfg.output.formats.end(), "json") !=
                  cfg.output.formats.end();
  std::string density_ref;
  if (csv) {
    std::ofstream out(art.directory / "diagnostics.csv");
    write_diagnostics_csv(out, m);
    art.files.push_back("diagnostics.csv");
    std::ofstream dec(art.directory / "decay.csv");
    write_decay_csv(dec, m);
    art.files.push_back("decay.csv");
    if (cfg.diagnostics.fields) {
      const auto every = static_cast<std::size_t>(cfg.diagnostics.fields_every);
      for (std::size_t k = 0; k < states.size(); ++k) {
        if (k % every != 0 && k + 1 != states.size()) continue;
        const std::string name = fields_name(k);
        std::ofstream f(art.directory / name);
        write_fields_csv(f, traj.times[k], states[k], compute_lambda(states[k], gamma), gamma);
        art.files.push_back(name);
        if (k == 0) density_ref = name;
      }
    }
  }

  RunConfig echo = cfg;
  if (!echo.initial_data.file.empty())
    echo.initial_data.file = fs::absolute(resolve(cfg, cfg.initial_data.file)).string();
  write_text(art.directory / "config.echo", to_text(echo));
  art.files.push_back("config.echo");

  if (js) {
    SummaryInputs in;
    in.gamma = gamma;
    in.tau_rel = tau;
    in.diag = &cfg.diagnostics;
    in.measures = std::move(m);
    in.initial = states.empty() ? nullptr : &states.front();
    in.density_ref = density_ref;
    LiftOptions lo;
    lo.delta = cfg.lifting.delta;
    lo.conditioning_floor = cfg.lifting.conditioning_floor;
    lo.junction_tol = cfg.lifting.junction_tol;
    in.lift = &lo;
    in.junctions = junctions;
    in.warnings = art.warnings;
    in.errors = errors;
    json s = summarize(in);
    if (art.status == ExitCode::numerical) s["status"] = "numerical_error";
    write_text(art.directory / "summary.json", s.dump(2) + "\n");
    art.files.push_back("summary.json");
  }
  return art;
}

std::vector<SweepEntry> sweep(const std::vector<RunConfig>& configs,
                              const std::vector<fs::path>& sources, int workers) {
  std::vector<std::string> issues;
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const std::string dir = fs::weakly_canonical(fs::absolute(output_directory(configs[i]))).string();
    const auto [it, fresh] = seen.emplace(dir, i);
    if (!fresh) {
      const auto name = [&](std::size_t k) {
        return k < sources.size() ? sources[k].string() : "config #" + std::to_string(k);
      };
      issues.push_back("output.directory: " + name(i) + " and " + name(it->second) +
                       " both write to " + dir);
    }
  }
  if (!issues.empty()) throw ConfigError(issues);

  std::vector<SweepEntry> out(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i)
    if (i < sources.size()) out[i].config = sources[i];
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out[i].artifacts = run(configs[i]);
      } catch (const ConfigError& e) {
        out[i].artifacts.status = ExitCode::validation;
        out[i].artifacts.error = e.what();
      } catch (const std::exception& e) {
        out[i].artifacts.status = ExitCode::numerical;
        out[i].artifacts.error = e.what();
      }
      out[i].artifacts.directory = output_directory(configs[i]);
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

void lift_file(const LiftCommand& cmd) {
  const HydroState h = read_hydro_csv(cmd.input, cmd.tau_rel);
  ComplexField psi = cmd.h2 ? lift_h2(h, cmd.gamma, cmd.options).psi
                            : lift_h1(h, cmd.options.delta);
  std::ofstream out(cmd.output);
  if (!out) throw std::runtime_error(cmd.output.string() + ": cannot write");
  write_psi_csv(out, psi);
}

RunArtifacts analyze_run_dir(const fs::path& dir) {
  RunArtifacts art;
  const fs::path echo = dir / "config.echo";
  if (!fs::exists(echo)) throw std::runtime_error(echo.string() + ": missing");
  const RunConfig cfg = load_config(echo);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("fields_", 0) == 0 && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error(dir.string() + ": no fields_*.csv snapshots");

  std::vector<double> times;
  std::vector<HydroState> states;
  for (const auto& f : files) {
    const FieldsSnapshot s = read_fields_csv(f);
    const GridPtr g = grid_from_x(s.columns[0], f);
    times.push_back(s.t);
    states.push_back(make_hydro_state(RealField(g, s.columns[1]), RealField(g, s.columns[2]),
                                      cfg.lifting.tau_rel));
  }
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::runtime_error(dir.string() + ": snapshot times are not increasing");

  art.directory = dir / "analysis";
  fs::create_directories(art.directory);
  std::vector<SnapshotMeasures> m = analyze_states(times, states, cfg.params.gamma);
  art.snapshots = m.size();
  {
    std::ofstream out(art.directory / "diagnostics.csv");
    write_diagnostics_csv(out, m);
    std::ofstream dec(art.directory / "decay.csv");
    write_decay_csv(dec, m);
  }
  SummaryInputs in;
  in.gamma = cfg.params.gamma;
  in.tau_rel = cfg.lifting.tau_rel;
  in.diag = &cfg.diagnostics;
  in.measures = std::move(m);
  in.initial = &states.front();
  in.density_ref = "../" + files.front().filename().string();
  write_text(art.directory / "summary.json", summarize(in).dump(2) + "\n");
  art.files = {"analysis/diagnostics.csv", "analysis/decay.csv", "analysis/summary.json"};
  return art;
}

}  // namespace qhd
