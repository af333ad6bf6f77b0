#pragma once

// Run configuration, suite orchestration and report emission behind the CLI.

#include "subgeo/checks.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace subgeo {

/// Exit-code contract of every command.
enum ExitCode : int { exit_pass = 0, exit_check_failure = 1, exit_config_error = 2, exit_numerical_error = 3 };

/// Suites in execution order.
const std::vector<std::string>& suite_order();

struct RunConfig {
  /// Normalized inclusion block (JSON text, keys sorted).
  std::string inclusion;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, double>> tolerances;
  std::vector<std::string> suites;
  int grid = 128;
  std::string output_dir = "subgeo-out";
  double probe_radius = 0.5;
  int trials = 20;
  double perturbation_scale = 0.1;
};

/// JSON config. Unknown keys, unknown suites, bad types → ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON of everything that affects results (output_dir excluded).
std::string canonical_config(const RunConfig& cfg);
/// FNV-1a 64 of the canonical config, 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Builds the inclusion block. ConfigError on malformed specs; the λ override is applied unchecked.
Inclusion make_inclusion(const RunConfig& cfg);

struct SuiteResult {
  std::string name;
  std::vector<CheckRecord> checks;
  bool passed() const;
};

struct VerifyOutcome {
  int exit_code = exit_pass;
  std::string config_hash;
  std::vector<SuiteResult> suites;
  std::string error;
  double wall_seconds = 0.0;
};

/// Runs the selected suites, writes <output_dir>/report.json and prints a table to `out`.
VerifyOutcome cmd_verify(const RunConfig& cfg, std::ostream& out);

struct GeodesicOptions {
  std::optional<std::string> z_path;
  double z_norm = 1.0;  // τ 2-norm of a seed-generated z
  std::optional<std::string> q0_witness_path;
};

/// Writes geodesic.csv and geodesic.json into output_dir.
int cmd_geodesic(const RunConfig& cfg, const GeodesicOptions& opts, std::ostream& out);

/// Reads q0/q1 files (n x n witness or D x D projection) and writes log.json and z.txt.
int cmd_log(const RunConfig& cfg, const std::string& q0_path, const std::string& q1_path, std::ostream& out);

/// experiment ∈ {minimality, convexity, radius_probe}; writes sweep_<experiment>.csv/.json.
int cmd_sweep(const RunConfig& cfg, const std::string& experiment, int n_trials, std::ostream& out);

int cmd_families(std::ostream& out);

/// Maps library exceptions to the exit-code contract, printing a diagnostic to `err`.
int report_exception(std::ostream& err);

/// Reads SUBFACTOR_GEO_TOL into the global spectral tolerance. ConfigError when unparsable.
void apply_environment();

}  // namespace subgeo
