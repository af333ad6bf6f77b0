#pragma once

// The basic construction on L²(M, τ): left regular representation, Jones
// projection p, the algebra M1 = span(M ∪ MpM), its trace τ1 = Tr/D and the
// expectation E1 onto M.

#include "subgeo/tracial.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace subgeo {

class BasicConstruction {
 public:
  /// Throws ConstructionError naming the failed property (0 = Markov/representation defect).
  static BasicConstruction build(const Inclusion& inc);

  const Inclusion& inclusion() const { return inc_; }
  double lambda() const { return inc_.lambda; }

  /// D = dim M = dim L²(M).
  Eigen::Index dim() const { return static_cast<Eigen::Index>(l2_.size()); }
  /// τ-orthonormal basis of M; the first dim N vectors span N and the first is 1.
  const std::vector<ComplexMatrix>& l2_basis() const { return l2_; }

  /// Left multiplication by P_M(x) in the L² basis coordinates.
  ComplexMatrix left_rep(const ComplexMatrix& x) const;
  const ComplexMatrix& jones_p() const { return p_; }
  const TracialAlgebra& m1() const { return m1_; }
  ComplexMatrix identity1() const { return ComplexMatrix::Identity(dim(), dim()); }

  Complex tau1(const ComplexMatrix& y) const { return y.trace() / static_cast<double>(dim()); }
  double two_norm1(const ComplexMatrix& y) const;

  /// m ∈ M with left_rep(m) = E1(y); no membership check on y.
  ComplexMatrix e1_pullback(const ComplexMatrix& y) const;
  /// E1(y) as a D x D matrix; no membership check on y.
  ComplexMatrix e1(const ComplexMatrix& y) const { return left_rep(e1_pullback(y)); }
  /// (1/λ) E1(y p) pulled back to M; no membership check on y.
  ComplexMatrix reduce(const ComplexMatrix& y) const;

  double m1_membership_defect(const ComplexMatrix& y) const { return m1_.membership_defect(y); }

 private:
  Inclusion inc_;
  std::vector<ComplexMatrix> l2_;
  TracialAlgebra l2_frame_;
  ComplexMatrix lv_;  // D^2 x D, column j = vec(left_rep(v_j))
  ComplexMatrix p_;
  TracialAlgebra m1_;
};

BasicConstruction build_basic_construction(const Inclusion& inc);

/// E1 with the membership check (defect > 1e-8 → MembershipError).
ComplexMatrix expectation_E1(const BasicConstruction& bc, const ComplexMatrix& y);

/// R(y) = (1/λ) E1(y p), as an element of M.
ComplexMatrix reduce_R(const BasicConstruction& bc, const ComplexMatrix& y);

/// u = (1/λ) E1(ω p); throws DomainError when u is not unitary.
ComplexMatrix recover_unitary(const BasicConstruction& bc, const ComplexMatrix& omega);

struct PropertyCheck {
  int index = 0;
  std::string anchor;
  bool passed = false;
  double worst_defect = 0.0;
  int samples = 0;
};

struct ConstructionReport {
  std::array<PropertyCheck, 8> properties;
  int commutant_dimension = 0;
  int n_dimension = 0;
  int center_dimension = 0;
  int m1_dimension = 0;
  double markov_defect = 0.0;
  /// Pimsner–Popa margin at λ + 1e-3 (negative means λ is sharp).
  double sharpness_margin = 0.0;
  bool lambda_sharp = false;

  bool all_passed() const;
};

ConstructionReport verify_construction_properties(const BasicConstruction& bc, int n_samples,
                                                  std::uint64_t seed);

/// Number of linearly independent solutions of [y, b] = 0 for b over the basis of `alg`.
int center_dimension(const TracialAlgebra& alg);

}  // namespace subgeo
