// subgeo: command-line front end (verify, geodesic, log, sweep, families).

#include "subgeo/errors.hpp"
#include "subgeo/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace subgeo;

namespace {

struct Common {
  std::string config_path;
  std::string family;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::vector<std::string> suites;
  std::optional<int> trials;
  std::optional<int> grid;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON run configuration");
  app->add_option("--family", c.family, "built-in family instead of a config file (see `families`)");
  app->add_option("--seed", c.seed, "64-bit seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--suite", c.suites, "suite to run (repeatable)");
  app->add_option("--trials", c.trials, "samples per check");
  app->add_option("--grid", c.grid, "curve resolution (intervals on [0, 1])");
}

RunConfig resolve(const Common& c) {
  if (c.config_path.empty() == c.family.empty()) throw ConfigError("give exactly one of --config or --family");
  RunConfig cfg = c.config_path.empty() ? parse_config("{\"inclusion\": {\"family\": \"" + c.family + "\"}}")
                                        : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.output_dir = *c.out;
  if (c.trials) {
    if (*c.trials < 0) throw ConfigError("--trials must be non-negative");
    cfg.trials = *c.trials;
  }
  if (c.grid) cfg.grid = *c.grid;
  if (!c.suites.empty()) {
    std::vector<std::string> chosen;
    for (const std::string& name : suite_order()) {
      for (const std::string& s : c.suites) {
        if (s == name) {
          chosen.push_back(name);
          break;
        }
      }
    }
    for (const std::string& s : c.suites) {
      bool known = false;
      for (const std::string& name : suite_order()) known = known || s == name;
      if (!known) throw ConfigError("unknown suite '" + s + "'");
    }
    cfg.suites = chosen;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical geometry of the Jones projection orbit for finite-dimensional inclusions"};
  app.require_subcommand(1);

  Common verify_opts, geo_opts, log_opts, sweep_opts;
  CLI::App* verify = app.add_subcommand("verify", "run the verification suites and write report.json");
  add_common(verify, verify_opts);

  CLI::App* geodesic = app.add_subcommand("geodesic", "sample e^{tz} q e^{-tz} and write CSV + JSON sidecar");
  add_common(geodesic, geo_opts);
  GeodesicOptions gopts;
  std::string z_path, q0w_path;
  geodesic->add_option("--z", z_path, "horizontal z (matrix text file); random when omitted");
  geodesic->add_option("--z-norm", gopts.z_norm, "2-norm of a random z");
  geodesic->add_option("--q0-witness", q0w_path, "unitary witness u of the start point u p u*");

  CLI::App* logc = app.add_subcommand("log", "local logarithm between two orbit points");
  add_common(logc, log_opts);
  std::string q0_path, q1_path;
  logc->add_option("--q0", q0_path, "start point file (witness or projection)")->required();
  logc->add_option("--q1", q1_path, "end point file (witness or projection)")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "minimality, convexity or radius_probe experiment");
  add_common(sweep, sweep_opts);
  std::string experiment;
  sweep->add_option("--experiment", experiment, "minimality | convexity | radius_probe")->required();

  app.add_subcommand("families", "list built-in inclusion families with their lambda");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  try {
    apply_environment();
    if (verify->parsed()) {
      const RunConfig cfg = resolve(verify_opts);
      if (cfg.grid < 8) throw ConfigError("--grid must be at least 8 for verify");
      return cmd_verify(cfg, std::cout).exit_code;
    }
    if (geodesic->parsed()) {
      const RunConfig cfg = resolve(geo_opts);
      if (!z_path.empty()) gopts.z_path = z_path;
      if (!q0w_path.empty()) gopts.q0_witness_path = q0w_path;
      return cmd_geodesic(cfg, gopts, std::cout);
    }
    if (logc->parsed()) return cmd_log(resolve(log_opts), q0_path, q1_path, std::cout);
    if (sweep->parsed()) {
      const RunConfig cfg = resolve(sweep_opts);
      return cmd_sweep(cfg, experiment, cfg.trials, std::cout);
    }
    return cmd_families(std::cout);
  } catch (...) {
    return report_exception(std::cerr);
  }
}
