#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gtp/config.hpp"
#include "gtp/errors.hpp"
#include "gtp/experiments.hpp"
#include "json.hpp"

using namespace gtp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("gtp_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct RunResult {
  int code = -1;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path errf = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + GTP_CLI_PATH + "\" " + args + " >\"" + (dir / "stdout.txt").string() +
                          "\" 2>\"" + errf.string() + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(errf);
  return r;
}

int line_of_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

int validation_line(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("config round trip") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.01, 5);
  const std::vector<std::string> kinds = {"ball", "half_space", "ellipse", "superellipse"};
  for (int trial = 0; trial < 50; ++trial) {
    ExperimentConfig c;
    c.experiment = experiment_names()[trial % experiment_names().size()];
    c.seed = rng();
    c.out_dir = "out_" + std::to_string(trial);
    c.domain.kind = kinds[trial % kinds.size()];
    c.domain.radius = U(rng);
    c.domain.a = U(rng);
    c.domain.b = U(rng);
    c.domain.m = 2 + U(rng);
    c.p = trial % 5 == 0 ? PExponent::infinity() : PExponent::finite(1 + U(rng));
    c.N = 2 + trial % 4;
    c.R = U(rng);
    if (trial % 2) c.center = {U(rng), U(rng)};
    c.pi_gamma = U(rng) / 5;
    c.distances = {U(rng), U(rng) / 3};
    c.t0 = U(rng) / 100;
    c.ratio = U(rng) / 5.1;
    c.count = 3 + trial;
    c.q = {1 + U(rng), std::numeric_limits<double>::infinity()};
    c.eps = {U(rng) / 10};
    c.h = 1.0 / (8 + trial);
    c.T = U(rng) / 10;
    c.dt = U(rng) / 1e5;
    c.data_low = U(rng) / 10;
    c.data_high = c.data_low + U(rng);
    c.tolerance = U(rng) / 100;
    const std::string text = emit_config(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(emit_config(back) == text);
  }
  for (const char* f : {"constants.cfg", "heat_content.cfg", "varadhan_half_space.cfg"}) {
    const auto c = load_config(std::string(GTP_CONFIG_DIR) + "/" + f);
    CHECK_NOTHROW(validate_config(c));
    CHECK(parse_config(emit_config(c)) == c);
  }
}

TEST_CASE("config errors carry line numbers") {
  CHECK(line_of_error("experiment = fd\n\n[fd]\nhh = 0.1\n") == 4);
  CHECK(line_of_error("[problem]\np = 2\np = 3\n") == 3);
  CHECK(line_of_error("[problem]\n# comment\nR = abc\n") == 3);
  CHECK(line_of_error("[problem]\nN = 2.5\n") == 2);
  CHECK(line_of_error("[nowhere]\n") == 1);
  CHECK(line_of_error("[problem\n") == 1);
  CHECK(line_of_error("[time]\nt0\n") == 2);
  CHECK(line_of_error("[problem]\np = 0.5\n") == 2);
  CHECK(line_of_error("[qmean]\nq = 1.5, , 3\n") == 2);
  CHECK(line_of_error("seed = -4\n") == 1);
  CHECK(line_of_error("[problem]\np = inf # comment\n") == -1);

  CHECK(validation_line("experiment = varadhan\n[time]\nratio = 1.5\n") == 3);
  CHECK(validation_line("experiment = qmean\n[domain]\nkind = ellipse\n") == 3);
  CHECK(validation_line("experiment = fd\n[fd]\nh = 0.01\ndata_low = 3\ndata_high = 1\n") == 4);
  CHECK(validation_line("experiment = nope\n") == 1);
  CHECK(validation_line("experiment = heat-content\n[problem]\nR = 1.5\n") == 3);
  try {
    load_config("/nonexistent/file.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 0);
  }
}

TEST_CASE("too large a time step is rejected before the run") {
  ExperimentConfig c = parse_config("experiment = fd\n[fd]\nh = 0.125\nT = 0.01\ndt = 0.5\n");
  try {
    run_experiment(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 5);
  }
}

TEST_CASE("constants subcommand") {
  const auto dir = scratch("constants");
  const auto r = run_cli("constants --config \"" + std::string(GTP_CONFIG_DIR) + "/constants.cfg\" --out \"" +
                             (dir / "out").string() + "\"",
                         dir);
  CHECK(r.code == kExitPass);
  for (const char* f : {"constants.csv", "constants.json", "summary.json"}) CHECK(fs::exists(dir / "out" / f));
  const auto j = nlohmann::json::parse(read_file(dir / "out" / "constants.json"));
  CHECK(j["data"]["heat_content_exponent"].get<double>() == 0.75);
  CHECK(j["data"].contains("heat_content_constant"));
  CHECK(j["data"].contains("qmean_constant"));
  CHECK(j["meta"].contains("git_revision"));
  CHECK(j["meta"].contains("wall_time_s"));
  const auto s = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
  CHECK(s["pass"] == true);
  CHECK(s["exit_code"] == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  write_file(dir / "bad.cfg", "experiment = constants\n\n[problem]\nR = -1\n");
  auto r = run_cli("constants --config \"" + (dir / "bad.cfg").string() + "\" --out \"" + (dir / "o1").string() + "\"",
                   dir);
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("line 4") != std::string::npos);

  write_file(dir / "typo.cfg", "experiment = constants\n[problem]\nradius = 1\n");
  r = run_cli("constants --config \"" + (dir / "typo.cfg").string() + "\"", dir);
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("line 3") != std::string::npos);

  r = run_cli("heat-content --config \"" + std::string(GTP_CONFIG_DIR) + "/constants.cfg\"", dir);
  CHECK(r.code == kExitConfig);
  r = run_cli("constants --config \"" + (dir / "missing.cfg").string() + "\"", dir);
  CHECK(r.code == kExitConfig);
  r = run_cli("nosuch --config x", dir);
  CHECK(r.code == kExitConfig);

  // an unreachable tolerance turns a passing run into a tolerance failure
  write_file(dir / "tight.cfg",
             "experiment = heat-content\n[domain]\nkind = ball\nradius = 1\n[problem]\np = 3\nR = 0.5\n"
             "[time]\nt0 = 1e-2\nratio = 0.1\ncount = 3\n[check]\ntolerance = 1e-12\n");
  r = run_cli("heat-content --config \"" + (dir / "tight.cfg").string() + "\" --out \"" + (dir / "o2").string() + "\"",
              dir);
  CHECK(r.code == kExitTolerance);
  const auto s = nlohmann::json::parse(read_file(dir / "o2" / "summary.json"));
  CHECK(s["pass"] == false);
  CHECK(s["exit_code"] == kExitTolerance);
}

TEST_CASE("half-space residuals are non-positive") {
  const auto c = load_config(std::string(GTP_CONFIG_DIR) + "/varadhan_half_space.cfg");
  const auto out = run_experiment(c);
  CHECK(out.pass());
  std::istringstream csv(out.csv);
  std::string line;
  std::getline(csv, line);
  const auto header = line;
  const auto col = std::count(header.begin(), header.begin() + header.find("residual"), ',');
  int rows = 0;
  while (std::getline(csv, line)) {
    std::stringstream ls(line);
    std::string cell;
    for (int i = 0; i <= col; ++i) std::getline(ls, cell, ',');
    CHECK(std::stod(cell) <= 0.0);
    ++rows;
  }
  CHECK(rows > 0);
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  const auto dir = scratch("determinism");
  const std::string cfg = std::string(GTP_CONFIG_DIR) + "/varadhan_half_space.cfg";
  for (const char* sub : {"a", "b"})
    CHECK(run_cli("varadhan --config \"" + cfg + "\" --seed 99 --out \"" + (dir / sub).string() + "\"", dir).code ==
          kExitPass);
  CHECK(read_file(dir / "a" / "varadhan.csv") == read_file(dir / "b" / "varadhan.csv"));
  CHECK(!read_file(dir / "a" / "varadhan.csv").empty());

  // Monte Carlo areas depend on the seed only
  ExperimentConfig g = parse_config(
      "experiment = geometry\n[domain]\nkind = ellipse\n[problem]\nR = 0.3\n[time]\nt0 = 1e-3\nratio = 0.5\ncount = "
      "3\n");
  g.seed = 7;
  const auto a = run_experiment(g), b = run_experiment(g);
  CHECK(a.csv == b.csv);
}
