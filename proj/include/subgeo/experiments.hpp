#pragma once

// Empirical surfaces: minimality of geodesics against endpoint-fixing
// perturbations, convexity of the squared unitary distance, and the
// radius at which orbit_log stops round-tripping.

#include "subgeo/sections.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace subgeo {

struct MinimalityTrial {
  int index = 0;
  double l2 = 0.0;
  double linf = 0.0;
  double max_distance = 0.0;  // max_t ||γ(t) - q0||
  bool admissible = false;    // max_distance <= probe radius
  bool l2_violation = false;  // admissible and L2(γ) < L2(α) - 1e-8
  bool dichotomy_violation = false;  // admissible and both L2 and L∞ strictly below the geodesic
};

struct MinimalityReport {
  double geodesic_l2 = 0.0;
  double geodesic_linf = 0.0;
  std::vector<MinimalityTrial> trials;
  int admissible = 0;
  int violations = 0;
  int dichotomy_violations = 0;
};

/// Perturbed lifts t ↦ e^{tz} exp(scale·b(t)·w) u0 with polynomial bumps b vanishing at 0 and 1.
/// Throws RadiusError when the geodesic end point leaves the probe radius.
MinimalityReport minimality_experiment(const BasicConstruction& bc, const OrbitPoint& q0, const ComplexMatrix& z,
                                       int n_trials, double scale, std::uint64_t seed, int grid_n = 128,
                                       double probe_radius = 0.5);

struct ConvexityReport {
  std::vector<double> s;
  std::vector<double> f;
  std::vector<double> second_differences;  // f'' estimates at interior grid points
  double min_second_difference = 0.0;
  bool passed = false;
};

/// The convexity radius √(2 - √2).
double convexity_radius();

/// f(s) = ||log(u0* u1 exp(s log(u1* u2)))||_2², s ∈ [0, 1].
/// Throws RadiusError when a pairwise op-norm distance reaches the convexity radius.
ConvexityReport convexity_probe(const Inclusion& inc, const ComplexMatrix& u0, const ComplexMatrix& u1,
                                const ComplexMatrix& u2, int grid_n = 64);

struct UnitaryTriple {
  ComplexMatrix u0, u1, u2;
};

/// exp of random anti-Hermitian elements of M, resampled until pairwise distances are admissible.
UnitaryTriple random_admissible_triple(const Inclusion& inc, Rng& rng);

struct RadiusProbeRow {
  int trial = 0;
  double radius = 0.0;
  double distance = 0.0;  // ||q0 - q1||
  double residual = 0.0;
  int iterations = 0;
  double recovered_error = 0.0;  // ||z - z0||_2
  bool passed = false;
  std::string error;
};

struct RadiusProbeReport {
  std::vector<RadiusProbeRow> rows;
  std::optional<double> largest_passing_radius;
};

std::vector<double> default_probe_radii();

/// Round trip q1 = e^{z0} q0 e^{-z0} → orbit_log for unit-op-norm horizontal directions scaled by each radius.
RadiusProbeReport radius_probe(const BasicConstruction& bc, const std::vector<double>& radii, int n_trials,
                               std::uint64_t seed, double tol = 1e-7);

/// A uniformly random witness exp(a), a ∈ M_ah with ||a|| <= spread.
OrbitPoint random_orbit_point(const BasicConstruction& bc, Rng& rng, double spread = 1.0);

}  // namespace subgeo
