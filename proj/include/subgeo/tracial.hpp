#pragma once

// Finite-dimensional tracial *-algebras realized inside M_n, inclusions N ⊂ M,
// the trace-preserving conditional expectation E and the horizontal space H.

#include "subgeo/linalg.hpp"
#include "subgeo/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subgeo {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

/// Direct sum of full matrix blocks with trace weights t_i, sum t_i d_i = 1.
struct AlgebraDescriptor {
  std::vector<int> block_dims;
  std::vector<double> trace_weights;

  Eigen::Index ambient_dim() const;
  /// Throws DomainError unless dims and weights are positive and normalized.
  void validate() const;
};

/// A *-subalgebra A ⊂ M_n with the trace τ(x) = Σ_j w_j x_jj (w > 0).
///
/// The inner product is ⟨a, b⟩ = τ(b* a). Internally the algebra is stored as an
/// orthonormal frame Q of vec(a · diag(√w)), so coordinates and projections are
/// single matrix-vector products.
class TracialAlgebra {
 public:
  TracialAlgebra() = default;

  static TracialAlgebra from_descriptor(const AlgebraDescriptor& desc);

  /// Span of the given matrices, orthonormalized by two-pass Gram–Schmidt.
  /// Candidates whose residual falls below drop_tol (relative) are discarded.
  static TracialAlgebra from_spanning_set(const Eigen::VectorXd& weights,
                                          const std::vector<ComplexMatrix>& span,
                                          double drop_tol = 1e-9);

  Eigen::Index ambient_dim() const { return weights_.size(); }
  Eigen::Index dim() const { return frame_.cols(); }
  const Eigen::VectorXd& weights() const { return weights_; }

  Complex trace(const ComplexMatrix& x) const;
  Complex inner(const ComplexMatrix& a, const ComplexMatrix& b) const;  // τ(b* a)
  double two_norm(const ComplexMatrix& x) const;

  /// τ-orthonormal basis element i.
  ComplexMatrix basis(Eigen::Index i) const;
  std::vector<ComplexMatrix> basis() const;

  /// ⟨x, b_i⟩ for every basis element.
  ComplexVector coordinates(const ComplexMatrix& x) const;
  ComplexMatrix from_coordinates(const ComplexVector& c) const;

  /// τ-orthogonal projection of an ambient matrix onto the algebra.
  ComplexMatrix project(const ComplexMatrix& x) const;
  /// ||x - project(x)||_2 with respect to the ambient weighted trace.
  double membership_defect(const ComplexMatrix& x) const;

  ComplexMatrix identity() const;
  /// Gaussian ambient matrix projected onto the algebra.
  ComplexMatrix random_element(Rng& rng) const;
  ComplexMatrix random_antihermitian(Rng& rng) const;
  ComplexMatrix random_hermitian(Rng& rng) const;

  /// Worst |τ(ab) - τ(ba)| over basis pairs.
  double trace_defect() const;
  /// Worst distance of basis products and adjoints from the algebra.
  double closure_defect() const;

 private:
  ComplexVector weighted_vec(const ComplexMatrix& x) const;
  ComplexMatrix unweighted_mat(const ComplexVector& v) const;

  Eigen::VectorXd weights_;
  Eigen::VectorXd sqrt_weights_;
  ComplexMatrix frame_;  // n^2 x dim, orthonormal columns
};

struct FamilyTag {
  enum class Kind { tensor, group_flip, custom };
  Kind kind = Kind::custom;
  int m = 0;
  int k = 0;
  std::string label;
};

/// Order-two automorphism of N used by the group-flip family.
struct Theta {
  enum class Kind { identity, conjugation, block_swap };
  Kind kind = Kind::identity;
  /// Diagonal unitary diag(signs) for conjugation; entries must be ±1 or unimodular.
  std::vector<Complex> signs;

  ComplexMatrix apply(const AlgebraDescriptor& n_desc, const ComplexMatrix& a) const;
  std::string describe() const;
};

/// Unital trace-compatible inclusion N ⊂ M realized in M's ambient matrices.
struct Inclusion {
  AlgebraDescriptor sub;            // abstract N
  TracialAlgebra n_algebra;         // N in its own block coordinates
  TracialAlgebra m_algebra;         // M inside its ambient M_n
  TracialAlgebra n_image;           // image of N inside M's ambient
  std::function<ComplexMatrix(const ComplexMatrix&)> embed;
  double lambda = 1.0;
  FamilyTag family;

  Eigen::Index ambient_dim() const { return m_algebra.ambient_dim(); }
  /// True when N has a single block, so M1 = (JNJ)' is a factor.
  bool predicts_factor_m1() const { return sub.block_dims.size() == 1; }
};

Inclusion make_tensor_inclusion(int m, int k);
Inclusion make_group_flip_inclusion(const AlgebraDescriptor& n_desc, const Theta& theta);
/// M given by a descriptor; N is the unital *-algebra generated by `generators`
/// (matrices in M's ambient). λ must be supplied.
Inclusion make_custom_inclusion(const AlgebraDescriptor& m_desc,
                                const std::vector<ComplexMatrix>& generators, double lambda);

/// Replace λ (e.g. a config override). Validation happens in the basic construction.
Inclusion with_lambda(Inclusion inc, double lambda);

ComplexMatrix expectation_E(const Inclusion& inc, const ComplexMatrix& x);

/// (x - x*)/2 minus its expectation: the component in H = ker E ∩ M_ah.
ComplexMatrix horizontal_projection(const Inclusion& inc, const ComplexMatrix& x);

/// max(||z + z*||_2, ||E(z)||_2).
double horizontal_defect(const Inclusion& inc, const ComplexMatrix& z);

/// Uniformly oriented random element of H (Gaussian, then projected).
ComplexMatrix random_horizontal(const Inclusion& inc, Rng& rng);

struct PimsnerPopaReport {
  bool feasible = true;
  double worst_margin = 0.0;        // most negative eigenvalue of (E⊗id)(x*x) - λ x*x
  std::optional<ComplexMatrix> witness;
  int samples = 0;
};

/// Checks (E ⊗ id_r)(x*x) >= λ x*x for x in M ⊗ M_r over the basis of M, n_samples
/// Gaussian elements, spectral projections of their squares and projected maximally
/// entangled vectors. amplification = 0 means r = ambient dim of M.
PimsnerPopaReport pimsner_popa_validate(const Inclusion& inc, int n_samples, double lambda,
                                        std::uint64_t seed, int amplification = 0);

struct Norms {
  double two_norm;
  double op_norm;
};

Norms norms(const TracialAlgebra& alg, const ComplexMatrix& x);
Norms norms(const AlgebraDescriptor& desc, const ComplexMatrix& x);

}  // namespace subgeo
