#pragma once

#include "qhd/config.hpp"
#include "qhd/functionals.hpp"
#include "qhd/lifting.hpp"
#include "qhd/polar.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qhd {

/// Column schema of diagnostics.csv; bump the version when it changes.
inline constexpr const char* kDiagnosticsSchema = "qhd-diagnostics v1";
inline constexpr const char* kFieldsSchema = "qhd-fields v1";
inline constexpr const char* kDecaySchema = "qhd-decay v1";
inline const std::vector<std::string> kDiagnosticsColumns{
    "t", "M", "E", "P", "I", "H", "H_alt", "moment_inertia", "morawetz",
    "entropy_residual_norm", "boundary_rho"};
inline const std::vector<std::string> kDecayColumns{
    "t", "grad_sqrt_rho_l2", "kinetic_dispersion", "rho_gamma_integral", "sqrt_rho_max"};
inline const std::vector<std::string> kFieldsColumns{"x", "sqrt_rho", "Lambda", "rho",
                                                     "J", "e", "lambda"};

enum class ExitCode : int { ok = 0, validation = 2, numerical = 3 };

/// Initial wave function described by the config, lifting hydrodynamic data
/// when needed. `lift_info`, when non-null, receives the junction record of an
/// H2 lift.
ComplexField build_initial_state(const RunConfig& cfg, std::vector<Junction>* lift_info = nullptr);

/// Hydrodynamic data for kind = hydrodynamic.
HydroState build_initial_hydro(const RunConfig& cfg, const GridPtr& grid);

struct RunArtifacts {
  std::filesystem::path directory;
  ExitCode status = ExitCode::ok;
  std::string error;
  std::size_t snapshots = 0;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

/// lift -> evolve -> factorize, writing diagnostics.csv, decay.csv, fields_XXXX.csv,
/// summary.json and config.echo into the output directory. A numerical abort
/// still writes what was computed plus an error record.
RunArtifacts run(const RunConfig& cfg);

struct SweepEntry {
  std::filesystem::path config;
  RunArtifacts artifacts;
};

/// Runs every config, at most `workers` at a time. Distinct output
/// directories are required; duplicates are rejected before anything runs.
std::vector<SweepEntry> sweep(const std::vector<RunConfig>& configs,
                              const std::vector<std::filesystem::path>& sources, int workers);

// Artifact I/O -------------------------------------------------------------

void write_diagnostics_csv(std::ostream& out, std::span<const SnapshotMeasures> m);

/// Time series behind the dispersive fits.
void write_decay_csv(std::ostream& out, std::span<const SnapshotMeasures> m);

/// One snapshot of (x, sqrt_rho, Lambda, rho, J, e, lambda), 17 significant digits.
void write_fields_csv(std::ostream& out, double t, const HydroState& h,
                      const ChemicalFields& chem, double gamma);

struct FieldsSnapshot {
  double t = 0.0;
  std::vector<std::vector<double>> columns;  ///< in kFieldsColumns order
};

FieldsSnapshot read_fields_csv(const std::filesystem::path& path);

/// Columns x, sqrt_rho, Lambda. The grid is rebuilt from x (uniform, x_0 = -L).
HydroState read_hydro_csv(const std::filesystem::path& path, double tau_rel = 1e-8);
void write_psi_csv(std::ostream& out, const ComplexField& psi);
ComplexField read_psi_csv(const std::filesystem::path& path);

/// Standalone lifting of a hydrodynamic CSV.
struct LiftCommand {
  std::filesystem::path input;
  std::filesystem::path output;
  bool h2 = false;
  double gamma = 2.0;
  LiftOptions options;
  double tau_rel = 1e-8;
};

void lift_file(const LiftCommand& cmd);

/// Recomputes diagnostics from stored field snapshots of a run directory and
/// writes analysis/diagnostics.csv and analysis/summary.json.
RunArtifacts analyze_run_dir(const std::filesystem::path& dir);

}  // namespace qhd
