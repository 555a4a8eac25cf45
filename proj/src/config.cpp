#include "qhd/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <regex>
#include <sstream>

namespace qhd {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string s = "invalid configuration:";
  for (const auto& i : issues) s += "\n  " + i;
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_long(const std::string& s, long& out) {
  try {
    std::size_t used = 0;
    out = std::stol(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "no" || s == "0" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

using Setter = std::function<bool(RunConfig&, const std::string&)>;

template <class S, class T>
Setter field(S RunConfig::*section, T S::*member) {
  return [=](RunConfig& c, const std::string& v) {
    T& dst = c.*section.*member;
    if constexpr (std::is_same_v<T, double>) return parse_double(v, dst);
    else if constexpr (std::is_same_v<T, long>) return parse_long(v, dst);
    else if constexpr (std::is_same_v<T, bool>) return parse_bool(v, dst);
    else {
      dst = unquote(v);
      return true;
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["grid.L"] = field(&RunConfig::grid, &GridConfig::L);
    t["grid.N"] = field(&RunConfig::grid, &GridConfig::N);
    t["params.gamma"] = field(&RunConfig::params, &ParamsConfig::gamma);
    t["params.dt"] = field(&RunConfig::params, &ParamsConfig::dt);
    t["params.t_end"] = field(&RunConfig::params, &ParamsConfig::t_end);
    t["params.save_every"] = field(&RunConfig::params, &ParamsConfig::save_every);
    t["params.dealias"] = field(&RunConfig::params, &ParamsConfig::dealias);
    t["initial_data.kind"] = field(&RunConfig::initial_data, &InitialDataConfig::kind);
    t["initial_data.family"] = field(&RunConfig::initial_data, &InitialDataConfig::family);
    t["initial_data.amplitude"] = field(&RunConfig::initial_data, &InitialDataConfig::amplitude);
    t["initial_data.width"] = field(&RunConfig::initial_data, &InitialDataConfig::width);
    t["initial_data.center"] = field(&RunConfig::initial_data, &InitialDataConfig::center);
    t["initial_data.velocity"] = field(&RunConfig::initial_data, &InitialDataConfig::velocity);
    t["initial_data.background"] =
        field(&RunConfig::initial_data, &InitialDataConfig::background);
    t["initial_data.mode"] = field(&RunConfig::initial_data, &InitialDataConfig::mode);
    t["initial_data.file"] = field(&RunConfig::initial_data, &InitialDataConfig::file);
    t["lifting.delta"] = field(&RunConfig::lifting, &LiftingConfig::delta);
    t["lifting.tau_rel"] = field(&RunConfig::lifting, &LiftingConfig::tau_rel);
    t["lifting.conditioning_floor"] =
        field(&RunConfig::lifting, &LiftingConfig::conditioning_floor);
    t["lifting.junction_tol"] = field(&RunConfig::lifting, &LiftingConfig::junction_tol);
    t["lifting.h2"] = field(&RunConfig::lifting, &LiftingConfig::h2);
    t["diagnostics.fields"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::fields);
    t["diagnostics.fields_every"] =
        field(&RunConfig::diagnostics, &DiagnosticsConfig::fields_every);
    t["diagnostics.decay"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::decay);
    t["diagnostics.gcp"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::gcp);
    t["diagnostics.atoms"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::atoms);
    t["diagnostics.pseudo_conformal"] =
        field(&RunConfig::diagnostics, &DiagnosticsConfig::pseudo_conformal);
    t["diagnostics.morawetz"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::morawetz);
    t["diagnostics.i_growth"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::i_growth);
    t["diagnostics.gcp_bound"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::gcp_bound);
    t["diagnostics.decay_t_lo"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::decay_t_lo);
    t["diagnostics.decay_t_hi"] = field(&RunConfig::diagnostics, &DiagnosticsConfig::decay_t_hi);
    t["diagnostics.decay_tolerance"] =
        field(&RunConfig::diagnostics, &DiagnosticsConfig::decay_tolerance);
    t["output.directory"] = field(&RunConfig::output, &OutputConfig::directory);
    t["output.formats"] = [](RunConfig& c, const std::string& v) {
      c.output.formats.clear();
      std::stringstream ss(unquote(v));
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) c.output.formats.push_back(item);
      }
      return true;
    };
    return t;
  }();
  return table;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues_in)
    : std::invalid_argument(join_issues(issues_in)), issues(std::move(issues_in)) {}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::vector<std::string> issues;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back("line " + std::to_string(lineno) + ": unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    if (key.empty()) {
      issues.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (!out.emplace(key, value).second) issues.push_back(key + ": given more than once");
  }
  if (!issues.empty()) throw ConfigError(issues);
  return out;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) e.push_back(std::string(name) + ": must be positive");
  };
  positive("grid.L", c.grid.L);
  if (c.grid.N < 16 || !is_power_of_two(c.grid.N))
    e.push_back("grid.N: must be a power of two, at least 16");
  if (!(c.params.gamma > 1.0) || !std::isfinite(c.params.gamma))
    e.push_back("params.gamma: must satisfy gamma > 1");
  positive("params.dt", c.params.dt);
  positive("params.t_end", c.params.t_end);
  if (c.params.dt > 0.0 && c.params.t_end > 0.0 && c.params.t_end < c.params.dt)
    e.push_back("params.t_end: must be at least params.dt");
  if (c.params.save_every < 1) e.push_back("params.save_every: must be at least 1");

  const auto& d = c.initial_data;
  if (d.kind != "wavefunction" && d.kind != "hydrodynamic")
    e.push_back("initial_data.kind: must be wavefunction or hydrodynamic");
  if (d.family != "gaussian" && d.family != "plane_wave" && d.family != "abs_x_bump" &&
      d.family != "custom_file")
    e.push_back("initial_data.family: must be gaussian, plane_wave, abs_x_bump or custom_file");
  if (!std::isfinite(d.amplitude) || d.amplitude < 0.0)
    e.push_back("initial_data.amplitude: must be finite and non-negative");
  positive("initial_data.width", d.width);
  if (!std::isfinite(d.center)) e.push_back("initial_data.center: must be finite");
  if (!std::isfinite(d.velocity)) e.push_back("initial_data.velocity: must be finite");
  if (!std::isfinite(d.background)) e.push_back("initial_data.background: must be finite");
  if (!std::isfinite(d.mode) || d.mode != std::round(d.mode))
    e.push_back("initial_data.mode: must be an integer");
  if (d.family == "custom_file" && d.file.empty())
    e.push_back("initial_data.file: required for family custom_file");
  if (d.kind == "hydrodynamic" && d.family == "gaussian" && d.background < 0.0)
    e.push_back("initial_data.background: must be non-negative for hydrodynamic data");

  if (d.kind == "hydrodynamic" && !c.lifting.present)
    e.push_back("lifting: section required when initial_data.kind = hydrodynamic");
  positive("lifting.delta", c.lifting.delta);
  if (!(c.lifting.tau_rel > 0.0 && c.lifting.tau_rel < 1.0))
    e.push_back("lifting.tau_rel: must lie in (0, 1)");
  if (!(c.lifting.conditioning_floor >= 0.0 && c.lifting.conditioning_floor < 1.0))
    e.push_back("lifting.conditioning_floor: must lie in [0, 1)");
  positive("lifting.junction_tol", c.lifting.junction_tol);

  if (c.diagnostics.fields_every < 1) e.push_back("diagnostics.fields_every: must be at least 1");
  positive("diagnostics.gcp_bound", c.diagnostics.gcp_bound);
  positive("diagnostics.decay_tolerance", c.diagnostics.decay_tolerance);
  if (c.diagnostics.decay_t_lo >= 0.0 && c.diagnostics.decay_t_hi >= 0.0 &&
      c.diagnostics.decay_t_hi <= c.diagnostics.decay_t_lo)
    e.push_back("diagnostics.decay_t_hi: must exceed diagnostics.decay_t_lo");

  if (c.output.directory.empty()) e.push_back("output.directory: must not be empty");
  for (const auto& f : c.output.formats)
    if (f != "csv" && f != "json")
      e.push_back("output.formats: unknown format '" + f + "' (csv, json)");
  return e;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const auto kv = parse_key_values(text);
  RunConfig cfg;
  cfg.base_dir = base_dir;
  std::vector<std::string> issues;
  const auto& table = setters();
  // an empty [lifting] header asks for the defaults
  static const std::regex header(R"(^\s*\[\s*lifting\s*\])");
  std::istringstream lines(text);
  for (std::string l; std::getline(lines, l);) cfg.lifting.present |= std::regex_search(l, header);
  for (const auto& [key, value] : kv) {
    if (key.rfind("lifting.", 0) == 0) cfg.lifting.present = true;
    const auto it = table.find(key);
    if (it == table.end()) {
      issues.push_back(key + ": unknown key");
      continue;
    }
    if (!it->second(cfg, value)) issues.push_back(key + ": cannot parse '" + value + "'");
  }
  auto more = validate(cfg);
  issues.insert(issues.end(), more.begin(), more.end());
  if (!issues.empty()) throw ConfigError(issues);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open configuration file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17);
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "[grid]\nL = " << c.grid.L << "\nN = " << c.grid.N << "\n\n";
  o << "[params]\ngamma = " << c.params.gamma << "\ndt = " << c.params.dt
    << "\nt_end = " << c.params.t_end << "\nsave_every = " << c.params.save_every
    << "\ndealias = " << b(c.params.dealias) << "\n\n";
  const auto& d = c.initial_data;
  o << "[initial_data]\nkind = " << d.kind << "\nfamily = " << d.family
    << "\namplitude = " << d.amplitude << "\nwidth = " << d.width << "\ncenter = " << d.center
    << "\nvelocity = " << d.velocity << "\nbackground = " << d.background
    << "\nmode = " << d.mode << "\n";
  if (!d.file.empty()) o << "file = " << d.file << "\n";
  o << "\n";
  if (c.lifting.present) {
    o << "[lifting]\ndelta = " << c.lifting.delta << "\ntau_rel = " << c.lifting.tau_rel
      << "\nconditioning_floor = " << c.lifting.conditioning_floor
      << "\njunction_tol = " << c.lifting.junction_tol << "\nh2 = " << b(c.lifting.h2)
      << "\n\n";
  }
  const auto& g = c.diagnostics;
  o << "[diagnostics]\nfields = " << b(g.fields) << "\nfields_every = " << g.fields_every
    << "\ndecay = " << b(g.decay) << "\ngcp = " << b(g.gcp) << "\natoms = " << b(g.atoms)
    << "\npseudo_conformal = " << b(g.pseudo_conformal) << "\nmorawetz = " << b(g.morawetz)
    << "\ni_growth = " << b(g.i_growth) << "\ngcp_bound = " << g.gcp_bound
    << "\ndecay_t_lo = " << g.decay_t_lo << "\ndecay_t_hi = " << g.decay_t_hi
    << "\ndecay_tolerance = " << g.decay_tolerance << "\n\n";
  o << "[output]\ndirectory = " << c.output.directory << "\nformats = ";
  for (std::size_t i = 0; i < c.output.formats.size(); ++i)
    o << (i ? ", " : "") << c.output.formats[i];
  o << "\n";
  return o.str();
}

std::filesystem::path output_directory(const RunConfig& cfg) {
  std::filesystem::path p(cfg.output.directory);
  if (p.is_relative()) {
    if (const char* root = std::getenv("QHD_OUTPUT_ROOT"); root != nullptr && *root != '\0')
      return std::filesystem::path(root) / p;
  }
  return p;
}

}  // namespace qhd
