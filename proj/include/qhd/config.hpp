#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qhd {

struct GridConfig {
  double L = 20.0;
  long N = 512;
};

struct ParamsConfig {
  double gamma = 2.0;
  double dt = 1e-3;
  double t_end = 1.0;
  long save_every = 10;
  bool dealias = false;
};

/// Initial data. Profiles, with X = x - center:
///   gaussian     psi = background + amplitude exp(-X^2 / width^2) e^{i velocity x}
///   plane_wave   psi = amplitude e^{i k x}, k = pi mode / L
///   abs_x_bump   psi = amplitude X exp(-X^2 / (2 width^2)); as hydrodynamic data
///                sqrt(rho) = |psi| with Lambda = 0
///   custom_file  CSV with columns x,sqrt_rho,Lambda (hydrodynamic) or x,re,im
struct InitialDataConfig {
  std::string kind = "wavefunction";
  std::string family = "gaussian";
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double velocity = 0.0;
  double background = 0.0;
  double mode = 1.0;
  std::string file;
};

struct LiftingConfig {
  bool present = false;
  double delta = 1e-8;
  double tau_rel = 1e-8;
  double conditioning_floor = 1e-3;
  double junction_tol = 5e-2;
  bool h2 = true;
};

struct DiagnosticsConfig {
  bool fields = true;
  long fields_every = 10;  ///< in snapshots
  bool decay = true;
  bool gcp = true;
  bool atoms = true;
  bool pseudo_conformal = true;
  bool morawetz = true;
  bool i_growth = true;
  double gcp_bound = 1e6;
  double decay_t_lo = -1.0;
  double decay_t_hi = -1.0;
  double decay_tolerance = 0.15;
};

struct OutputConfig {
  std::string directory = "run";
  std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
  GridConfig grid;
  ParamsConfig params;
  InitialDataConfig initial_data;
  LiftingConfig lifting;
  DiagnosticsConfig diagnostics;
  OutputConfig output;
  /// Directory relative paths in the config are resolved against.
  std::filesystem::path base_dir;
};

/// Every problem found in a configuration, one "field: constraint" per entry.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(std::vector<std::string> issues);
  std::vector<std::string> issues;
};

/// `key = value` lines; `[section]` headers prefix later keys with `section.`;
/// `#` starts a comment. Keys are unique.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Parses and validates. Throws ConfigError listing every issue.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Returns the issues of an already-built config (empty when valid).
std::vector<std::string> validate(const RunConfig& cfg);

/// Canonical text form with every key, readable by parse_config.
std::string to_text(const RunConfig& cfg);

/// output.directory, placed under $QHD_OUTPUT_ROOT when that is set and the
/// directory is relative.
std::filesystem::path output_directory(const RunConfig& cfg);

}  // namespace qhd
