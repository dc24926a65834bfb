#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "snlab/config.hpp"
#include "snlab/run.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = "snlab-out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool print_config = false;
};

std::vector<std::pair<std::string, std::string>> overrides(const Common& c) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw snlab::ParseError(0, "--set expects section.key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed) out.emplace_back("run.seed", std::to_string(*c.seed));
  return out;
}

int run_one(const std::string& scenario, const Common& c) {
  try {
    const auto ov = overrides(c);
    const snlab::RunConfig cfg = c.config.empty() ? snlab::parse_config_text("", scenario, ov)
                                                  : snlab::parse_config_file(c.config, scenario, ov);
    if (c.print_config) {
      std::cout << snlab::serialize_config(cfg);
      return 0;
    }
    const int code = snlab::run(cfg, c.out, std::cerr);
    if (code == 0) std::cout << "wrote " << (std::filesystem::path(c.out) / "summary.txt").string() << "\n";
    return code;
  } catch (const snlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return snlab::exit_code(e.kind());
  }
}

// Runs each config file into out_root/<file stem>; returns the largest exit code.
int sweep(const std::vector<std::string>& configs, const std::string& out_root, int jobs) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream err;
      int code = 0;
      try {
        const snlab::RunConfig cfg = snlab::parse_config_file(configs[i]);
        code = snlab::run(cfg, std::filesystem::path(out_root) / std::filesystem::path(configs[i]).stem(), err);
      } catch (const snlab::Error& e) {
        err << "error: " << e.what() << "\n";
        code = snlab::exit_code(e.kind());
      }
      std::lock_guard lock(io);
      std::cerr << err.str();
      std::cout << configs[i] << ": exit " << code << "\n";
      int prev = worst.load();
      while (code > prev && !worst.compare_exchange_weak(prev, code)) {
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schrodinger-Newton and collapse-model simulations"};
  app.set_version_flag("--version", snlab::library_version());
  app.require_subcommand(1);

  Common common;
  std::string chosen;
  for (const auto& name : snlab::scenario_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--config", common.config, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "random seed (overrides run.seed)");
    sub->add_option("--set", common.sets, "override section.key=value")->take_all();
    sub->add_flag("--print-config", common.print_config, "print the resolved config and exit");
    sub->callback([&chosen, name] { chosen = name; });
  }

  std::vector<std::string> sweep_configs;
  std::string sweep_root = "snlab-sweep";
  int jobs = 1;
  CLI::App* sw = app.add_subcommand("sweep", "run several config files, each into its own directory");
  sw->add_option("configs", sweep_configs, "config files naming their scenario")->required()->check(CLI::ExistingFile);
  sw->add_option("--out", sweep_root, "root output directory")->capture_default_str();
  sw->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber)->capture_default_str();
  sw->callback([&chosen] { chosen = "sweep"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (chosen == "sweep") return sweep(sweep_configs, sweep_root, jobs);
  return run_one(chosen, common);
}
