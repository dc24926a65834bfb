#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "snlab/config.hpp"
#include "snlab/errors.hpp"
#include "snlab/run.hpp"

using namespace snlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("snlab_test_run_" + tag)) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::vector<double>> csv_rows(const fs::path& p, std::vector<std::string>* header = nullptr) {
  std::vector<std::vector<double>> rows;
  bool seen_header = false;
  for (const auto& line : lines_of(slurp(p))) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!seen_header) {
      seen_header = true;
      if (header) *header = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

// Strips the "# " prefix from the embedded config block of an artifact.
std::string embedded_config(const std::string& text) {
  std::string cfg;
  for (const auto& line : lines_of(text)) {
    if (line.rfind("# snlab ", 0) == 0) continue;
    if (line.rfind("# ", 0) != 0) break;
    cfg += line.substr(2) + "\n";
  }
  return cfg;
}

RunConfig quick_evolve() {
  RunConfig cfg = default_config("evolve");
  cfg.points_per_axis = 128;
  cfg.steps = 100;
  return cfg;
}

}  // namespace

TEST_CASE("self-focus run writes the three artifacts") {
  TempDir dir("artifacts");
  const RunConfig cfg = quick_evolve();
  std::ostringstream err;
  REQUIRE(run(cfg, dir.path, err) == 0);
  CHECK(err.str().empty());
  for (const char* f : {"metadata.txt", "timeseries.csv", "summary.txt"}) CHECK(fs::exists(dir.path / f));
  std::vector<std::string> header;
  const auto rows = csv_rows(dir.path / "timeseries.csv", &header);
  CHECK(rows.size() == static_cast<std::size_t>(cfg.steps / cfg.record_every + 1));
  REQUIRE(!header.empty());
  CHECK(header[0] == "time");
}

TEST_CASE("artifacts embed the config and seed and contain finite increasing times") {
  TempDir dir("embed");
  RunConfig cfg = quick_evolve();
  cfg.seed = 4242;
  std::ostringstream err;
  REQUIRE(run(cfg, dir.path, err) == 0);
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    CAPTURE(entry.path().string());
    const std::string text = slurp(entry.path());
    CHECK(text.rfind("# snlab ", 0) == 0);
    CHECK(lines_of(text)[0].find("seed 4242") != std::string::npos);
    CHECK(parse_config_text(embedded_config(text)) == cfg);
    if (entry.path().extension() == ".csv") {
      const auto rows = csv_rows(entry.path());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (double v : rows[i]) CHECK(std::isfinite(v));
        if (i > 0) CHECK(rows[i][0] > rows[i - 1][0]);
      }
    }
  }
}

TEST_CASE("metadata carries units, constants and the schema") {
  TempDir dir("metadata");
  std::ostringstream err;
  REQUIRE(run(quick_evolve(), dir.path, err) == 0);
  const std::string meta = slurp(dir.path / "metadata.txt");
  for (const char* key : {"schema_version: 1", "library_version: ", "seed: ", "config.physics.mass_kg: ",
                          "constants.G: ", "units.length_scale_m: ", "units.kappa_effective: ",
                          "table.sn.file: timeseries.csv", "table.sn.columns: ", "summary.file: summary.txt"}) {
    CAPTURE(key);
    CHECK(meta.find(std::string("\n") + key) != std::string::npos);
  }
}

TEST_CASE("identical configs give byte-identical summaries") {
  TempDir a("det_a"), b("det_b");
  RunConfig cfg = default_config("collapse-sde");
  cfg.ensemble_size = 50;
  cfg.steps = 20;
  std::ostringstream err;
  REQUIRE(run(cfg, a.path, err) == 0);
  REQUIRE(run(cfg, b.path, err) == 0);
  CHECK(slurp(a.path / "summary.txt") == slurp(b.path / "summary.txt"));
  CHECK(slurp(a.path / "timeseries.csv") == slurp(b.path / "timeseries.csv"));
}

TEST_CASE("echoed config re-runs to identical results") {
  TempDir a("echo_a"), b("echo_b");
  const RunConfig cfg = quick_evolve();
  std::ostringstream err;
  REQUIRE(run(cfg, a.path, err) == 0);
  const RunConfig echoed = parse_config_text(embedded_config(slurp(a.path / "summary.txt")));
  REQUIRE(run(echoed, b.path, err) == 0);
  CHECK(slurp(a.path / "summary.txt") == slurp(b.path / "summary.txt"));
}

TEST_CASE("signalling summary reports about a light-year") {
  TempDir dir("signalling");
  std::ostringstream err;
  REQUIRE(run(default_config("signalling"), dir.path, err) == 0);
  const std::string summary = slurp(dir.path / "summary.txt");
  const auto pos = summary.find("\nS_min_lightyears: ");
  REQUIRE(pos != std::string::npos);
  const double ly = std::stod(summary.substr(pos + 19));
  CHECK(ly == doctest::Approx(1.3).epsilon(0.05));
}

TEST_CASE("exit codes distinguish validation, convergence and blowup") {
  std::ostringstream err;
  {
    TempDir dir("exit_validation");
    RunConfig cfg = quick_evolve();
    cfg.mass_kg = -1.0;
    CHECK(run(cfg, dir.path, err) == 2);
    CHECK_FALSE(fs::exists(dir.path / "summary.txt"));
  }
  {
    TempDir dir("exit_convergence");
    RunConfig cfg = default_config("ground-state");
    cfg.points_per_axis = 16;
    cfg.max_iterations = 10;
    CHECK(run(cfg, dir.path, err) == 3);
  }
  {
    TempDir dir("exit_blowup");
    RunConfig cfg = quick_evolve();
    cfg.gravity_scale = 5e307;
    CHECK(run(cfg, dir.path, err) == 4);
  }
  CHECK(err.str().find("error") != std::string::npos);
  CHECK(exit_code(ErrorKind::parse) == 2);
  CHECK(exit_code(ErrorKind::resolution) == 2);
  CHECK(exit_code(ErrorKind::step_size) == 4);
  CHECK(exit_code(ErrorKind::contract_violation) == 1);
}

TEST_CASE("every scenario runs through the artifact writer") {
  for (const auto& name : scenario_names()) {
    if (name == "ground-state") continue;
    CAPTURE(name);
    TempDir dir("all_" + name);
    RunConfig cfg = default_config(name);
    if (cfg.steps > 50) {
      cfg.steps = 50;
      cfg.record_every = 10;
    }
    if (name == "stern-gerlach") cfg.detection_time_s = cfg.dt_s * 50;
    if (name == "two-packet") cfg.fit_time_s = cfg.dt_s * 40;
    cfg.ensemble_size = 40;
    std::ostringstream err;
    CHECK(run(cfg, dir.path, err) == 0);
    CHECK(err.str() == "");
    CHECK(fs::exists(dir.path / "summary.txt"));
  }
}
