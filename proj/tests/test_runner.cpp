#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qhd/runner.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

using namespace qhd;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qhd_runner_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

RunConfig plane_wave(const fs::path& dir) {
  return parse_config(R"(
[grid]
L = 10
N = 256
[params]
gamma = 2
dt = 1e-3
t_end = 1
save_every = 100
[initial_data]
family = plane_wave
amplitude = 1
mode = 2
[output]
directory = )" + dir.string() + "\n");
}

RunConfig abs_bump(const fs::path& dir) {
  return parse_config(R"(
[grid]
L = 10
N = 256
[params]
gamma = 2
dt = 1e-3
t_end = 0.1
save_every = 10
[initial_data]
kind = hydrodynamic
family = abs_x_bump
[lifting]
delta = 1e-8
[diagnostics]
fields_every = 5
[output]
directory = )" + dir.string() + "\n");
}

}  // namespace

TEST_CASE("config: sections, comments and defaults") {
  const RunConfig c = parse_config(R"(
# a comment
[grid]
L = 12.5   # trailing comment
N = 128
[params]
gamma = 3
dealias = true
[output]
formats = csv
)");
  CHECK(c.grid.L == 12.5);
  CHECK(c.grid.N == 128);
  CHECK(c.params.gamma == 3.0);
  CHECK(c.params.dealias);
  CHECK(c.params.dt == 1e-3);
  CHECK(c.output.formats == std::vector<std::string>{"csv"});
  CHECK_FALSE(c.lifting.present);
}

TEST_CASE("config: gamma below one names the field and the constraint") {
  try {
    parse_config("[params]\ngamma = 0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues.size() == 1);
    CHECK(e.issues[0] == "params.gamma: must satisfy gamma > 1");
  }
}

TEST_CASE("config: every problem is reported at once") {
  try {
    parse_config(R"(
[grid]
N = 100
L = -1
[params]
gamma = 1
dt = abc
colour = blue
[initial_data]
kind = hydrodynamic
[output]
formats = csv, xml
)");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string all = e.what();
    for (const char* field : {"grid.N", "grid.L", "params.gamma", "params.dt", "params.colour",
                              "lifting", "output.formats"})
      CHECK_MESSAGE(all.find(field) != std::string::npos, field);
  }
}

TEST_CASE("config: duplicate keys and malformed lines") {
  CHECK_THROWS_AS(parse_config("[grid]\nN = 64\nN = 128\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid\nN = 64\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
}

TEST_CASE("config: canonical text parses back to the same config") {
  RunConfig c = abs_bump("out");
  c.params.gamma = 1.0 / 3.0 + 1.0;
  c.initial_data.velocity = 0.1;
  const RunConfig back = parse_config(to_text(c));
  CHECK(to_text(back) == to_text(c));
  CHECK(back.params.gamma == c.params.gamma);
  CHECK(back.lifting.present);
}

TEST_CASE("output root override") {
  RunConfig c = plane_wave("rel");
  ::setenv("QHD_OUTPUT_ROOT", "/tmp/somewhere", 1);
  CHECK(output_directory(c) == fs::path("/tmp/somewhere/rel"));
  c.output.directory = "/abs/dir";
  CHECK(output_directory(c) == fs::path("/abs/dir"));
  ::unsetenv("QHD_OUTPUT_ROOT");
  c.output.directory = "rel";
  CHECK(output_directory(c) == fs::path("rel"));
}

TEST_CASE("initial data families") {
  RunConfig c = plane_wave("unused");
  c.initial_data.family = "gaussian";
  c.initial_data.amplitude = 2.0;
  c.initial_data.width = 1.5;
  c.initial_data.center = 1.0;
  c.initial_data.velocity = 0.5;
  const ComplexField psi = build_initial_state(c);
  const double x = psi.grid->x()[140];
  const complex expect = 2.0 * std::exp(-(x - 1) * (x - 1) / 2.25) * std::polar(1.0, 0.5 * x);
  CHECK(std::abs(psi[140] - expect) < 1e-14);

  c.initial_data.family = "plane_wave";
  c.initial_data.amplitude = 1.0;
  const ComplexField pw = build_initial_state(c);
  CHECK(std::arg(pw[1] / pw[0]) == doctest::Approx(2 * std::numbers::pi / 10 * pw.grid->dx()));
}

TEST_CASE("hydrodynamic |x| bump lifts to a smooth odd wave function") {
  const RunConfig c = abs_bump("unused");
  std::vector<Junction> info;
  const ComplexField psi = build_initial_state(c, &info);
  REQUIRE_FALSE(info.empty());
  CHECK(info[0].matched);
  const auto x = psi.grid->x();
  const complex phase = psi[150] / std::abs(psi[150]);
  for (std::size_t i = 0; i < psi.size(); ++i)
    CHECK(std::abs(psi[i] / phase - x[i] * std::exp(-x[i] * x[i] / 2)) < 1e-8);
}

TEST_CASE("plane-wave run writes the artifact set") {
  const fs::path dir = scratch("plane");
  const RunArtifacts a = run(plane_wave(dir));
  CHECK(a.status == ExitCode::ok);
  CHECK(a.snapshots == 11);
  for (const char* f : {"diagnostics.csv", "decay.csv", "summary.json", "config.echo", "fields_0000.csv",
                        "fields_0010.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);

  const json s = load_json(dir / "summary.json");
  CHECK(s["status"] == "ok");
  CHECK(s["drifts"]["mass"].get<double>() < 1e-12);
  CHECK(s["drifts"]["momentum"].get<double>() < 1e-10);
  for (const char* key : {"dispersive", "gcp", "lambda_measure", "pseudo_conformal", "morawetz",
                          "i_growth", "space_time", "warnings", "errors"})
    CHECK_MESSAGE(s.contains(key), key);
  // uniform density touches the box edge from the start
  CHECK_FALSE(s["warnings"].empty());
}

TEST_CASE("diagnostics.csv schema") {
  const fs::path dir = scratch("schema");
  run(plane_wave(dir));
  const auto l = lines(dir / "diagnostics.csv");
  REQUIRE(l.size() == 13);
  CHECK(l[0] == "# qhd-diagnostics v1");
  CHECK(l[1] == "t,M,E,P,I,H,H_alt,moment_inertia,morawetz,entropy_residual_norm,boundary_rho");
  for (std::size_t k = 2; k < l.size(); ++k)
    CHECK(std::count(l[k].begin(), l[k].end(), ',') == 10);
  const auto d = lines(dir / "decay.csv");
  CHECK(d[0] == "# qhd-decay v1");
  CHECK(d[1] == "t,grad_sqrt_rho_l2,kinetic_dispersion,rho_gamma_integral,sqrt_rho_max");
}

TEST_CASE("fields csv: schema, full precision and read back") {
  const fs::path dir = scratch("fields");
  run(abs_bump(dir));
  const auto l = lines(dir / "fields_0005.csv");
  CHECK(l[0] == "# qhd-fields v1");
  CHECK(l[1].rfind("# t=", 0) == 0);
  CHECK(l[2] == "x,sqrt_rho,Lambda,rho,J,e,lambda");
  CHECK(l.size() == 3 + 256);
  const FieldsSnapshot f = read_fields_csv(dir / "fields_0005.csv");
  CHECK(f.t == doctest::Approx(0.05));
  REQUIRE(f.columns.size() == 7);
  CHECK(f.columns[0].size() == 256);
  CHECK(f.columns[0][0] == -10.0);
  // 17 significant digits survive the round trip
  CHECK(f.columns[0][1] == -10.0 + 20.0 / 256);
}

TEST_CASE("|x| bump run reports one atom at the zero") {
  const fs::path dir = scratch("bump");
  const RunArtifacts a = run(abs_bump(dir));
  REQUIRE(a.status == ExitCode::ok);
  const json s = load_json(dir / "summary.json");
  const json& atoms = s["lambda_measure"]["atoms"];
  REQUIRE(atoms.size() == 1);
  CHECK(std::abs(atoms[0]["x"].get<double>()) < 0.1);
  CHECK(atoms[0]["w"].get<double>() == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(atoms[0]["flag"] == "ok");
  CHECK(s["lambda_measure"]["density_csv_ref"] == "fields_0000.csv");
  CHECK(s["lifting"]["junctions"].size() == 2);
}

TEST_CASE("same config, byte-identical artifacts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunConfig ca = abs_bump(a), cb = abs_bump(b);
  run(ca);
  run(cb);
  for (const char* f : {"diagnostics.csv", "summary.json", "fields_0005.csv"})
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  run(ca);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("numerical abort keeps partial artifacts and an error record") {
  const fs::path dir = scratch("abort");
  RunConfig c = plane_wave(dir);
  c.initial_data.family = "gaussian";
  c.initial_data.amplitude = 1e160;
  const RunArtifacts a = run(c);
  CHECK(a.status == ExitCode::numerical);
  CHECK_FALSE(a.error.empty());
  const json s = load_json(dir / "summary.json");
  CHECK(s["status"] == "numerical_error");
  // the solver abort plus the unanalyzable initial snapshot
  CHECK(s["errors"].size() == 2);
  CHECK(s["snapshots"] == 0);
  CHECK(lines(dir / "diagnostics.csv").size() == 2);
}

TEST_CASE("sweep: empty, duplicates, gamma targets") {
  CHECK(sweep({}, {}, 4).empty());

  const fs::path root = scratch("sweep");
  std::vector<RunConfig> dup{plane_wave(root / "same"), plane_wave(root / "same")};
  CHECK_THROWS_AS(sweep(dup, {}, 2), ConfigError);
  CHECK_FALSE(fs::exists(root / "same"));

  std::vector<RunConfig> cfgs;
  for (double g : {1.5, 2.0, 3.0, 4.0}) {
    RunConfig c = plane_wave(root / ("g" + std::to_string(g)));
    c.initial_data.family = "gaussian";
    c.params.gamma = g;
    c.params.t_end = 0.2;
    c.params.save_every = 20;
    cfgs.push_back(c);
  }
  const auto out = sweep(cfgs, {}, 3);
  REQUIRE(out.size() == 4);
  const double sigma[4] = {0.25, 0.5, 1.0, 1.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(out[i].artifacts.status == ExitCode::ok);
    const json s = load_json(out[i].artifacts.directory / "summary.json");
    CHECK(s["dispersive"]["sigma"].get<double>() == doctest::Approx(sigma[i]));
    CHECK(s["dispersive"]["quantities"][0]["target"].get<double>() == doctest::Approx(-sigma[i]));
  }
  // a sweep matches the single runs bit for bit
  const fs::path solo = scratch("solo");
  RunConfig c = cfgs[1];
  c.output.directory = solo.string();
  run(c);
  CHECK(slurp(solo / "diagnostics.csv") == slurp(out[1].artifacts.directory / "diagnostics.csv"));
}

TEST_CASE("sweep isolates failures") {
  const fs::path root = scratch("sweep_fail");
  RunConfig ok = plane_wave(root / "ok"), bad = plane_wave(root / "bad");
  bad.initial_data.family = "gaussian";
  bad.initial_data.amplitude = 1e160;
  const auto out = sweep({ok, bad}, {"ok.cfg", "bad.cfg"}, 2);
  CHECK(out[0].artifacts.status == ExitCode::ok);
  CHECK(out[1].artifacts.status == ExitCode::numerical);
  CHECK(out[1].config == fs::path("bad.cfg"));
}

TEST_CASE("analyze recomputes diagnostics from stored fields") {
  const fs::path dir = scratch("analyze");
  run(abs_bump(dir));
  const RunArtifacts a = analyze_run_dir(dir);
  CHECK(a.snapshots == 3);
  CHECK(fs::exists(dir / "analysis" / "diagnostics.csv"));
  const json s = load_json(dir / "analysis" / "summary.json");
  CHECK(s["lambda_measure"]["atoms"].size() == 1);
  // the stored snapshot reproduces the in-run mass
  const auto orig = lines(dir / "diagnostics.csv"), redo = lines(dir / "analysis" / "diagnostics.csv");
  auto mass = [](const std::string& row) { return std::stod(row.substr(row.find(',') + 1)); };
  CHECK(mass(redo[2]) == doctest::Approx(mass(orig[2])).epsilon(1e-14));
  CHECK_THROWS(analyze_run_dir(scratch("empty")));
}

TEST_CASE("custom hydrodynamic file and standalone lift") {
  const fs::path dir = scratch("custom");
  {
    std::ofstream f(dir / "h.csv");
    f.precision(17);
    f << "x,sqrt_rho,Lambda\n";
    for (int i = 0; i < 256; ++i) {
      const double x = -10.0 + 20.0 * i / 256;
      f << x << ',' << std::abs(x) * std::exp(-x * x / 2) << ",0\n";
    }
  }
  LiftCommand cmd;
  cmd.input = dir / "h.csv";
  cmd.output = dir / "psi.csv";
  cmd.h2 = true;
  lift_file(cmd);
  const ComplexField psi = read_psi_csv(dir / "psi.csv");
  const complex phase = psi[150] / std::abs(psi[150]);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = psi.grid->x()[i];
    CHECK(std::abs(psi[i] / phase - x * std::exp(-x * x / 2)) < 1e-8);
  }

  std::ofstream(dir / "run.cfg") << "[grid]\nL = 10\nN = 256\n[params]\nt_end = 0.01\n"
                                    "[initial_data]\nkind = hydrodynamic\nfamily = custom_file\n"
                                    "file = h.csv\n[lifting]\n[output]\ndirectory = "
                                 << (dir / "out").string() << "\n";
  const RunConfig c = load_config(dir / "run.cfg");
  CHECK(run(c).status == ExitCode::ok);
  const RunConfig echo = load_config(dir / "out" / "config.echo");
  CHECK(fs::path(echo.initial_data.file).is_absolute());

  RunConfig wrong = c;
  wrong.grid.N = 128;
  CHECK_THROWS_AS(build_initial_state(wrong), ConfigError);
}

TEST_CASE("malformed CSV input is a validation error") {
  const fs::path dir = scratch("badcsv");
  std::ofstream(dir / "a.csv") << "x,sqrt_rho\n0,1\n";
  CHECK_THROWS_AS(read_hydro_csv(dir / "a.csv"), std::invalid_argument);
  std::ofstream(dir / "b.csv") << "x,sqrt_rho,Lambda\n0,1,zz\n";
  CHECK_THROWS_AS(read_hydro_csv(dir / "b.csv"), std::invalid_argument);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  const std::string exe = QHDLAB_PATH;
  auto status = [&](const std::string& args) {
    const int rc = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
  };
  std::ofstream(dir / "bad.cfg") << "[params]\ngamma = 0.5\n";
  CHECK(status("run " + (dir / "bad.cfg").string()) == 2);
  std::ofstream(dir / "good.cfg") << "[grid]\nN = 64\n[params]\nt_end = 0.01\n[output]\ndirectory = "
                                  << (dir / "good").string() << "\n";
  CHECK(status("run " + (dir / "good.cfg").string()) == 0);
  std::ofstream(dir / "nan.cfg") << "[grid]\nN = 64\n[params]\nt_end = 0.01\n[initial_data]\n"
                                    "amplitude = 1e160\n[output]\ndirectory = "
                                 << (dir / "nan").string() << "\n";
  CHECK(status("run " + (dir / "nan.cfg").string()) == 3);
  CHECK(status("analyze " + (dir / "good").string()) == 0);
  CHECK(status("bogus") == 2);

  const fs::path sw = dir / "sweep";
  fs::create_directories(sw);
  for (int k = 0; k < 3; ++k)
    std::ofstream(sw / ("r" + std::to_string(k) + ".cfg"))
        << "[grid]\nN = 64\n[params]\nt_end = 0.01\n[output]\ndirectory = "
        << (dir / ("s" + std::to_string(k))).string() << "\n";
  CHECK(status("sweep " + sw.string() + " --workers 2 --summary " + (dir / "sweep.json").string()) == 0);
  CHECK(load_json(dir / "sweep.json").size() == 3);
}
