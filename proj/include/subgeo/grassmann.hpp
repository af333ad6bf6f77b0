#pragma once

// The ambient Grassmann manifold P(M1) at p: tangent splitting, block exponential,
// degeneracy directions and the totally geodesic audit.

#include "subgeo/basic_construction.hpp"
#include "subgeo/random.hpp"

#include <optional>
#include <string>

namespace subgeo {

/// A tangent vector xp + px* of P(M1) at p, parametrized by x ∈ N^⊥.
struct GrassmannTangent {
  ComplexMatrix x;
  ComplexMatrix ambient;
  ComplexMatrix orbit_part;   // anti-Hermitian part of x
  ComplexMatrix normal_part;  // Hermitian part of x
};

/// v Hermitian with pvp = (1-p)v(1-p) = 0 (within 1e-9); x = R(v).
/// Throws DomainError on non-Hermitian or non-codiagonal input, ConsistencyError if xp + px* misses v.
GrassmannTangent tangent_decompose(const BasicConstruction& bc, const ComplexMatrix& v);

/// e^{t(xp - px*)} p e^{-t(xp - px*)} from the 2x2 block formula.
/// Requires E(x) = 0 (DomainError) and ||x|| < π (RadiusError).
ComplexMatrix grassmann_exp_block(const BasicConstruction& bc, const ComplexMatrix& x, double t);

/// The same curve by dense exponentiation in M1 (no preconditions on x beyond membership).
ComplexMatrix grassmann_exp_dense(const BasicConstruction& bc, const ComplexMatrix& x, double t);

/// e^{tx} p e^{-tx}.
ComplexMatrix orbit_curve_point(const BasicConstruction& bc, const ComplexMatrix& x, double t);

/// ||[e^{xp - px*}, p]||_2.
double effectiveness_commutator(const BasicConstruction& bc, const ComplexMatrix& x);

struct DegeneracyResult {
  bool degenerate = false;
  double defect = 0.0;  // max(||x + x*||_2, ||x² - E(x²)||_2)
  bool zero_speed = false;  // x ∈ N: the orbit curve is constant
};

DegeneracyResult degeneracy_test(const Inclusion& inc, const ComplexMatrix& x);

/// p cos²(t|x|) + upu* sin²(t|x|) + ½[u, p] sin(2t|x|) with x = u|x|. DomainError unless x is degenerate.
ComplexMatrix degenerate_geodesic_closed_form(const BasicConstruction& bc, const ComplexMatrix& x, double t);

/// max over a uniform grid on [0, 1] of ||grassmann curve of x - E(x)  -  e^{tx}pe^{-tx}||.
double orbit_grassmann_divergence(const BasicConstruction& bc, const ComplexMatrix& x, int grid_n = 32);

struct TotallyGeodesicReport {
  std::string family;
  bool holds = false;
  double max_defect = 0.0;        // max ||ab + ba - E(ab + ba)||_2 over basis pairs of N^⊥
  double max_product_defect = 0.0;  // max ||ab - E(ab)||_2, informational
  std::optional<std::pair<ComplexMatrix, ComplexMatrix>> witness;
  bool degeneracy_agrees = false;
  int basis_size = 0;
  double tolerance = 1e-10;
};

/// Decides whether every square of an element of N^⊥ lies in N.
TotallyGeodesicReport totally_geodesic_audit(const Inclusion& inc);

/// A trace-orthonormal basis of N^⊥ ∩ M.
std::vector<ComplexMatrix> n_perp_basis(const Inclusion& inc);

/// A random x ∈ N^⊥_ah with x² ∈ N and ||x|| in [0.2, 1.5], if the family has one besides 0.
std::optional<ComplexMatrix> random_degenerate_direction(const Inclusion& inc, bool holds, Rng& rng);

struct TangentMembershipReport {
  int kernel_dimension = 0;  // dim_R {y Hermitian codiagonal in M1 : E1(y) = 0}
  int orbit_dimension = 0;   // dim_R {zp - pz : z ∈ M_ah}
  double span_defect = 0.0;  // largest distance between unit vectors of the two spans
  bool agrees = false;
};

/// Compares the kernel of E1 on the P(M1)-tangent space at p with the orbit tangent space.
TangentMembershipReport tangent_membership_check(const BasicConstruction& bc, double tol = 1e-9);

}  // namespace subgeo
