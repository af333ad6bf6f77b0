// Acceptance run: one PASS/FAIL line per criterion over the family set.

#include "subgeo/checks.hpp"
#include "subgeo/errors.hpp"
#include "subgeo/families.hpp"
#include "subgeo/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace subgeo;

namespace {

struct Criterion {
  bool passed = true;
  std::vector<std::string> notes;

  void add(const std::string& family, const CheckRecord& r) {
    if (!r.passed) passed = false;
    if (!r.passed || !r.detail.empty()) {
      notes.push_back(family + " " + r.name + (r.passed ? "" : " FAILED") + " worst " + fmt(r.worst_defect) +
                      (r.detail.empty() ? "" : " (" + r.detail + ")"));
    }
  }
  void add(const std::string& family, const std::vector<CheckRecord>& rs) {
    for (const auto& r : rs) add(family, r);
  }
  void require(bool ok, const std::string& note) {
    if (!ok) passed = false;
    notes.push_back(note + (ok ? "" : " FAILED"));
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
  }
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  bool verbose = false;
  for (int i = 1; i < argc; ++i) verbose = verbose || std::string(argv[i]) == "-v";

  const std::map<std::string, double> expected_lambda = {{"tensor(1,2)", 0.25},
                                                         {"tensor(1,3)", 1.0 / 9.0},
                                                         {"tensor(2,2)", 0.25},
                                                         {"group_flip(scalars)", 0.5},
                                                         {"group_flip(M2,flip)", 0.5}};
  std::map<int, Criterion> c;
  const std::uint64_t seed = 20240611;

  for (const BuiltinFamily& fam : builtin_families()) {
    const auto start = std::chrono::steady_clock::now();
    const std::string& name = fam.name;
    std::optional<BasicConstruction> built;
    try {
      built.emplace(build_basic_construction(make_builtin_family(name)));
    } catch (const Error& e) {
      for (int k = 1; k <= 13; ++k) c[k].require(false, name + ": construction failed: " + e.what());
      continue;
    }
    const BasicConstruction& bc = *built;
    CheckContext ctx{bc, seed};

    c[1].add(name, check_construction(ctx, 16));
    c[1].require(std::abs(bc.lambda() - expected_lambda.at(name)) <= 1e-12,
                 name + " λ = " + Criterion::fmt(bc.lambda()));
    const PimsnerPopaReport at = pimsner_popa_validate(bc.inclusion(), 16, bc.lambda(), seed);
    const PimsnerPopaReport above = pimsner_popa_validate(bc.inclusion(), 16, bc.lambda() + 1e-3, seed);
    c[1].require(at.feasible && !above.feasible, name + " feasible at λ (margin " + Criterion::fmt(at.worst_margin) +
                                                     "), infeasible at λ + 1e-3 (margin " +
                                                     Criterion::fmt(above.worst_margin) + ")");
    c[2].add(name, check_unitary_recovery(ctx, 50));
    c[3].add(name, check_isometry(ctx, 100));
    c[4].add(name, check_tangent_projection(ctx, 100));
    c[5].add(name, check_geodesic_equation(ctx, 20));
    c[6].add(name, check_lifts(ctx, 50));
    c[7].add(name, check_first_variation(ctx, 50));
    c[8].add(name, check_commutator_bound(ctx, 200));
    c[8].add(name, check_displacement_bound(ctx, 200));
    c[9].add(name, check_block_exponential(ctx, 100));

    TotallyGeodesicReport audit;
    const std::vector<CheckRecord> deg = check_degeneracy(ctx, 100);
    c[10].add(name, std::vector<CheckRecord>(deg.begin() + 1, deg.end()));
    const CheckRecord aud = check_audit(ctx, &audit);
    c[11].add(name, aud);
    if (name == "tensor(1,3)") {
      c[11].require(!audit.holds && audit.witness.has_value(), name + " holds = false with witness");
    } else if (name != "tensor(2,2)") {
      c[11].require(audit.holds, name + " holds = true");
    }

    const std::vector<CheckRecord> lg = check_orbit_log(ctx, 50);
    c[12].add(name, lg[0]);
    c[13].add(name, check_minimality(ctx, 100));
    c[13].add(name, check_convexity(ctx, 50));

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "family " << name << " done in " << Criterion::fmt(secs) << " s" << std::endl;
  }

  // Determinism of the verify report.
  {
    const auto dir = std::filesystem::temp_directory_path() / ("subgeo_acceptance_" + std::to_string(seed));
    std::filesystem::remove_all(dir);
    const std::string cfg_text = R"cfg({"inclusion": {"family": "tensor(1,2)"}, "seed": 42, "trials": 10})cfg";
    std::string reports[2];
    std::string hashes[2];
    for (int run = 0; run < 2; ++run) {
      RunConfig cfg = parse_config(cfg_text);
      cfg.output_dir = (dir / ("run" + std::to_string(run))).string();
      std::ostringstream sink;
      const VerifyOutcome out = cmd_verify(cfg, sink);
      hashes[run] = out.config_hash;
      reports[run] = read_file(std::filesystem::path(cfg.output_dir) / "report.json");
    }
    c[14].require(hashes[0] == hashes[1], "config hash " + hashes[0]);
    c[14].require(!reports[0].empty() && reports[0] == reports[1],
                  "report bytes identical (" + std::to_string(reports[0].size()) + " bytes)");
    std::filesystem::remove_all(dir);
  }

  bool all = true;
  for (int k = 1; k <= 14; ++k) {
    const Criterion& cr = c[k];
    all = all && cr.passed;
    std::cout << "criterion " << k << ": " << (cr.passed ? "PASS" : "FAIL") << std::endl;
    if (verbose || !cr.passed) {
      for (const auto& n : cr.notes) std::cout << "    " << n << std::endl;
    }
  }
  return all ? 0 : 1;
}
