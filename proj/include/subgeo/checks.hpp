#pragma once

// Randomized property checks shared by the verify suites and the acceptance run.
// Each check draws its samples from Rng(trial_seed(seed, i)).

#include "subgeo/experiments.hpp"
#include "subgeo/grassmann.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace subgeo {

struct CheckRecord {
  std::string name;
  std::string anchor;
  bool passed = false;
  double worst_defect = 0.0;
  int samples = 0;
  std::string detail;
};

/// Named tolerances; every entry may be overridden from a run configuration.
struct Tolerances {
  std::map<std::string, double> values;

  static Tolerances defaults();
  double operator[](const std::string& key) const;
  /// Throws DomainError on an unknown key.
  void set(const std::string& key, double value);
};

struct CheckContext {
  const BasicConstruction& bc;
  std::uint64_t seed = 0;
  Tolerances tol = Tolerances::defaults();
  int grid_n = 128;
  double probe_radius = 0.5;
  double perturbation_scale = 0.1;
};

/// Random smooth witness path t ↦ exp(t a1 + t² a2 + sin(πt) a3) exp(a0) in U_M.
std::function<ComplexMatrix(double)> random_witness_path(const Inclusion& inc, Rng& rng, double scale = 1.0);

/// ω = left_rep(v) exp(i h) with h = p h1 p + (1 - p) h2 (1 - p): a unitary of M1 fixing O(p).
ComplexMatrix random_orbit_preserving(const BasicConstruction& bc, Rng& rng);

// construction
std::vector<CheckRecord> check_construction(const CheckContext& ctx, int n);
CheckRecord check_unitary_recovery(const CheckContext& ctx, int n);

// metric
CheckRecord check_isometry(const CheckContext& ctx, int n);
std::vector<CheckRecord> check_tangent_projection(const CheckContext& ctx, int n);
CheckRecord check_commutator_bound(const CheckContext& ctx, int n);
CheckRecord check_displacement_bound(const CheckContext& ctx, int n);
CheckRecord check_geodesic_equation(const CheckContext& ctx, int n);
std::vector<CheckRecord> check_orbit_log(const CheckContext& ctx, int n);

// lifts
std::vector<CheckRecord> check_lifts(const CheckContext& ctx, int n);

// variation
std::vector<CheckRecord> check_first_variation(const CheckContext& ctx, int n);

// minimality
std::vector<CheckRecord> check_minimality(const CheckContext& ctx, int n);
std::vector<CheckRecord> check_polygonal(const CheckContext& ctx);

// convexity
CheckRecord check_convexity(const CheckContext& ctx, int n);

// grassmann
std::vector<CheckRecord> check_block_exponential(const CheckContext& ctx, int n);
CheckRecord check_tangent_splitting(const CheckContext& ctx, int n);
CheckRecord check_tangent_membership(const CheckContext& ctx);

// degeneracy
std::vector<CheckRecord> check_degeneracy(const CheckContext& ctx, int n);
CheckRecord check_audit(const CheckContext& ctx, TotallyGeodesicReport* out = nullptr);

}  // namespace subgeo
