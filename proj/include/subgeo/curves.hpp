#pragma once

// Sampled curves on O(p) and in U_M: finite-difference velocities, quadrature,
// length functionals, covariant derivative, horizontal lift and first variation.

#include "subgeo/orbit.hpp"

#include <functional>
#include <vector>

namespace subgeo {

/// Orbit samples on the uniform grid t_k = k / grid_n of [0, 1].
struct DiscreteCurve {
  std::vector<OrbitPoint> samples;

  int grid_n() const { return static_cast<int>(samples.size()) - 1; }
  double step() const { return 1.0 / grid_n(); }
  std::vector<ComplexMatrix> projections() const;
};

/// Resolution guard: consecutive samples within op-norm 0.5. Throws RefinementError otherwise.
DiscreteCurve make_curve(std::vector<OrbitPoint> samples);

DiscreteCurve sample_geodesic(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z,
                              int grid_n);
/// Push down of a witness path t ↦ u(t) ∈ U_M.
DiscreteCurve sample_witness_path(const BasicConstruction& bc,
                                  const std::function<ComplexMatrix(double)>& u_of_t, int grid_n);

// ---------------------------------------------------------------------------
// Grid calculus on [0, 1].

/// Fourth-order central differences (one-sided fourth order at the ends).
/// Falls back to lower order when fewer than 5 samples are given.
std::vector<ComplexMatrix> fd_velocity(const std::vector<ComplexMatrix>& f, double h);
/// Fourth-order second derivative; needs at least 6 samples.
std::vector<ComplexMatrix> fd_second_derivative(const std::vector<ComplexMatrix>& f, double h);
/// Composite Simpson (3/8 rule on the last three intervals when the count is odd).
double simpson(const std::vector<double>& f, double h);

enum class LengthMetric { two_norm, op_norm, energy };

/// ∫ ||ċ||_2, ∫ ||ċ|| or ∫ ||ċ||_2² over a sampled path on [0, 1].
double path_length(const std::vector<ComplexMatrix>& samples, LengthMetric metric,
                   const std::function<double(const ComplexMatrix&)>& two_norm);

/// Lengths of orbit curves use τ1.
double curve_length(const BasicConstruction& bc, const DiscreteCurve& curve, LengthMetric metric);
/// Lengths of M-valued paths (lifts) use τ.
double lift_length(const Inclusion& inc, const std::vector<ComplexMatrix>& path, LengthMetric metric);
/// Lengths of M1-valued paths use τ1.
double m1_path_length(const BasicConstruction& bc, const std::vector<ComplexMatrix>& path, LengthMetric metric);

// ---------------------------------------------------------------------------

/// DX/dt = Π_γ(Ẋ) with second-order differences (one-sided at the ends).
std::vector<ComplexMatrix> covariant_derivative(const BasicConstruction& bc, const DiscreteCurve& curve,
                                                const std::vector<ComplexMatrix>& field);

/// max_k ||Π_γ(γ̈)(t_k)||_2 with fourth-order second differences.
double geodesic_residual(const BasicConstruction& bc, const DiscreteCurve& curve);

struct LiftResult {
  std::vector<ComplexMatrix> gamma;  // Γ(t_k) ∈ U_M, Γ(0) = 1
  double reconstruction_defect = 0.0;
  double unitarity_defect = 0.0;
  double horizontality_defect = 0.0;
};

/// Γ̇ = κ_γ(γ̇)Γ by RK4 with re-unitarization. Throws RefinementError when the
/// post-hoc checks exceed lift_tol (unitarity: 1e-10).
LiftResult horizontal_lift(const BasicConstruction& bc, const DiscreteCurve& curve, double lift_tol = 1e-6);

/// Unitary curves γ_{-h}, γ_0, γ_h in M sampled on the same grid.
struct VariationFamily {
  std::vector<ComplexMatrix> minus;
  std::vector<ComplexMatrix> zero;
  std::vector<ComplexMatrix> plus;
  double h = 1e-3;
};

struct FirstVariationResult {
  double formula = 0.0;            // ⟨x0, y0⟩|_0^1 - ∫ ⟨ẋ0, y0⟩
  double finite_difference = 0.0;  // (F2(γ_h) - F2(γ_{-h})) / 4h
  double tolerance = 0.0;
  bool agrees = false;
};

/// ⟨x, y⟩ = Re τ(y* x). Throws DomainError on non-unitary samples.
FirstVariationResult first_variation(const Inclusion& inc, const VariationFamily& family);

}  // namespace subgeo
