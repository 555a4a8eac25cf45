// qhdlab: run, sweep, lift and re-analyze NLS / quantum hydrodynamics runs.

#include "qhd/runner.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using qhd::ExitCode;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

void report(const qhd::RunArtifacts& a) {
  std::cout << a.directory.string() << ": " << a.snapshots << " snapshots";
  if (!a.error.empty()) std::cout << ", error: " << a.error;
  std::cout << "\n";
}

int cmd_run(const std::string& path) {
  const qhd::RunConfig cfg = qhd::load_config(path);
  const qhd::RunArtifacts a = qhd::run(cfg);
  report(a);
  return code(a.status);
}

int cmd_sweep(const std::string& dir, int workers, const std::string& summary) {
  std::vector<fs::path> sources;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".cfg") sources.push_back(e.path());
  std::sort(sources.begin(), sources.end());

  std::vector<qhd::RunConfig> configs;
  std::vector<std::string> issues;
  for (const auto& s : sources) {
    try {
      configs.push_back(qhd::load_config(s));
    } catch (const qhd::ConfigError& e) {
      for (const auto& i : e.issues) issues.push_back(s.string() + ": " + i);
    }
  }
  if (!issues.empty()) throw qhd::ConfigError(issues);

  const auto results = qhd::sweep(configs, sources, workers);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  int worst = 0;
  for (const auto& r : results) {
    report(r.artifacts);
    worst = std::max(worst, code(r.artifacts.status));
    out.push_back({{"config", r.config.string()},
                   {"directory", r.artifacts.directory.string()},
                   {"status", code(r.artifacts.status)},
                   {"error", r.artifacts.error}});
  }
  if (!summary.empty()) std::ofstream(summary) << out.dump(2) << "\n";
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.artifacts.status != ExitCode::ok;
  std::cout << results.size() << " runs, " << failed << " failed\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D quantum hydrodynamics lab"};
  app.require_subcommand(1);

  std::string cfg_path;
  auto* run = app.add_subcommand("run", "run one configuration");
  run->add_option("config", cfg_path, "config file")->required()->check(CLI::ExistingFile);

  std::string sweep_dir, sweep_summary;
  int workers = 1;
  auto* sw = app.add_subcommand("sweep", "run every *.cfg in a directory");
  sw->add_option("dir", sweep_dir, "config directory")->required()->check(CLI::ExistingDirectory);
  sw->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);
  sw->add_option("--summary", sweep_summary, "write a JSON list of run outcomes here");

  qhd::LiftCommand lift;
  std::string lift_in, lift_out;
  auto* lf = app.add_subcommand("lift", "lift a hydrodynamic CSV (x,sqrt_rho,Lambda) to psi");
  lf->add_option("input", lift_in, "hydrodynamic CSV")->required()->check(CLI::ExistingFile);
  lf->add_option("--out", lift_out, "output CSV (x,re,im)")->required();
  lf->add_flag("--h2", lift.h2, "phase-matched lift across isolated vacuum points");
  lf->add_option("--delta", lift.options.delta, "amplitude regularization delta");
  lf->add_option("--tau-rel", lift.tau_rel, "vacuum threshold, relative to max sqrt_rho");
  lf->add_option("--gamma", lift.gamma, "pressure exponent");

  std::string run_dir;
  auto* an = app.add_subcommand("analyze", "recompute diagnostics from stored fields");
  an->add_option("dir", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::validation);
  }

  try {
    if (*run) return cmd_run(cfg_path);
    if (*sw) return cmd_sweep(sweep_dir, workers, sweep_summary);
    if (*lf) {
      lift.input = lift_in;
      lift.output = lift_out;
      qhd::lift_file(lift);
      return 0;
    }
    report(qhd::analyze_run_dir(run_dir));
    return 0;
  } catch (const qhd::ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& i : e.issues) std::cerr << "  " << i << "\n";
    return code(ExitCode::validation);
  } catch (const qhd::JunctionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::validation);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::validation);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return code(ExitCode::numerical);
  }
}
