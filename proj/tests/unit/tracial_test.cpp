#include "subgeo/errors.hpp"
#include "subgeo/families.hpp"
#include "subgeo/tracial.hpp"

#include <gtest/gtest.h>

using namespace subgeo;

namespace {

// (id ⊗ tr_k)(x) ⊗ 1_k on M_m ⊗ M_k, index order i*k + a.
ComplexMatrix partial_trace_oracle(const ComplexMatrix& x, int m, int k) {
  ComplexMatrix out = ComplexMatrix::Zero(m * k, m * k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Complex s = 0.0;
      for (int a = 0; a < k; ++a) s += x(i * k + a, j * k + a);
      for (int a = 0; a < k; ++a) out(i * k + a, j * k + a) = s / static_cast<double>(k);
    }
  return out;
}

}  // namespace

TEST(AlgebraDescriptor, Validation) {
  AlgebraDescriptor ok{{2, 1}, {0.25, 0.5}};
  EXPECT_NO_THROW(ok.validate());
  EXPECT_EQ(ok.ambient_dim(), 3);
  AlgebraDescriptor unnormalized{{2, 1}, {0.5, 0.5}};
  EXPECT_THROW(unnormalized.validate(), DomainError);
  AlgebraDescriptor negative{{1, 1}, {1.5, -0.5}};
  EXPECT_THROW(negative.validate(), DomainError);
}

TEST(TracialAlgebra, DirectSumBasics) {
  const TracialAlgebra a = TracialAlgebra::from_descriptor({{2, 1}, {0.25, 0.5}});
  EXPECT_EQ(a.dim(), 5);
  EXPECT_NEAR(a.trace(a.identity()).real(), 1.0, 1e-14);
  EXPECT_LT(a.closure_defect(), 1e-12);
  EXPECT_LT(a.trace_defect(), 1e-12);

  // Orthonormality of the basis under τ(b* a).
  const auto b = a.basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      EXPECT_NEAR(std::abs(a.inner(b[i], b[j]) - Complex(i == j ? 1.0 : 0.0)), 0.0, 1e-12);

  // Off-block entries are projected away.
  ComplexMatrix x = ComplexMatrix::Zero(3, 3);
  x(0, 2) = 1.0;
  x(1, 1) = 2.0;
  const ComplexMatrix px = a.project(x);
  EXPECT_EQ(std::abs(px(0, 2)), 0.0);
  EXPECT_NEAR(px(1, 1).real(), 2.0, 1e-14);
  EXPECT_NEAR(a.membership_defect(x), std::sqrt(0.5), 1e-12);  // column 2 carries weight 1/2

  Rng rng(3);
  const ComplexMatrix r = a.random_element(rng);
  EXPECT_LT(a.membership_defect(r), 1e-12);
  EXPECT_LT((a.from_coordinates(a.coordinates(r)) - r).norm(), 1e-12);
  EXPECT_LT(linalg::antihermitian_defect(a.random_antihermitian(rng)), 1e-12);
}

TEST(TracialAlgebra, SpanningSetDropsDependentElements) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 0.5);
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  const TracialAlgebra a =
      TracialAlgebra::from_spanning_set(w, {ComplexMatrix::Identity(2, 2), d, 3.0 * d, ComplexMatrix::Identity(2, 2) - d});
  EXPECT_EQ(a.dim(), 2);
}

TEST(Expectation, TensorMatchesPartialTrace) {
  for (auto [m, k] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
    const Inclusion inc = make_tensor_inclusion(m, k);
    EXPECT_NEAR(inc.lambda, 1.0 / (k * k), 1e-15);
    Rng rng(7 + m * 10 + k);
    for (int t = 0; t < 5; ++t) {
      const ComplexMatrix x = inc.m_algebra.random_element(rng);
      EXPECT_LT((expectation_E(inc, x) - partial_trace_oracle(x, m, k)).norm(), 1e-12);
    }
  }
}

TEST(Expectation, ScalarSubalgebraIsTrace) {
  const Inclusion inc = make_builtin_family("group_flip(scalars)");
  EXPECT_EQ(inc.m_algebra.dim(), 2);
  EXPECT_EQ(inc.n_image.dim(), 1);
  Rng rng(5);
  const ComplexMatrix x = inc.m_algebra.random_element(rng);
  const ComplexMatrix oracle = inc.m_algebra.trace(x) * inc.m_algebra.identity();
  EXPECT_LT((expectation_E(inc, x) - oracle).norm(), 1e-12);
}

TEST(Expectation, BimoduleAndTraceProperties) {
  for (const auto& fam : builtin_families()) {
    const Inclusion inc = make_builtin_family(fam.name);
    Rng rng(9);
    const ComplexMatrix x = inc.m_algebra.random_element(rng);
    const ComplexMatrix a = inc.n_image.random_element(rng);
    const ComplexMatrix b = inc.n_image.random_element(rng);
    const ComplexMatrix ex = expectation_E(inc, x);
    EXPECT_LT(inc.n_image.membership_defect(ex), 1e-12) << fam.name;
    EXPECT_LT((expectation_E(inc, ex) - ex).norm(), 1e-12) << fam.name;
    EXPECT_LT((expectation_E(inc, a * x * b) - a * ex * b).norm(), 1e-11) << fam.name;
    EXPECT_LT(std::abs(inc.m_algebra.trace(ex) - inc.m_algebra.trace(x)), 1e-12) << fam.name;
    // Positivity: E(x*x) >= 0.
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(expectation_E(inc, x.adjoint() * x));
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12) << fam.name;
  }
}

TEST(Horizontal, ProjectionIsIdempotentAndHorizontal) {
  const Inclusion inc = make_tensor_inclusion(2, 2);
  Rng rng(21);
  const ComplexMatrix x = inc.m_algebra.random_element(rng);
  const ComplexMatrix z = horizontal_projection(inc, x);
  EXPECT_LT(horizontal_defect(inc, z), 1e-12);
  EXPECT_LT((horizontal_projection(inc, z) - z).norm(), 1e-12);
  EXPECT_LT(horizontal_defect(inc, random_horizontal(inc, rng)), 1e-12);
  // An element of N has no horizontal part.
  EXPECT_LT(horizontal_projection(inc, inc.n_image.random_element(rng)).norm(), 1e-12);
}

TEST(PimsnerPopa, SharpConstantForTensorFamilies) {
  for (int k : {2, 3}) {
    const Inclusion inc = make_tensor_inclusion(1, k);
    const double lambda = 1.0 / (k * k);
    EXPECT_TRUE(pimsner_popa_validate(inc, 8, lambda, 1).feasible) << k;
    EXPECT_FALSE(pimsner_popa_validate(inc, 8, lambda + 1e-3, 1).feasible) << k;
  }
}

TEST(PimsnerPopa, UnamplifiedConstantIsLarger) {
  // Without amplification E(x*x) >= λ x*x on M_2 ⊃ C holds up to λ = 1/2.
  const Inclusion inc = make_tensor_inclusion(1, 2);
  EXPECT_TRUE(pimsner_popa_validate(inc, 16, 0.5, 3, 1).feasible);
  EXPECT_FALSE(pimsner_popa_validate(inc, 16, 0.5 + 1e-3, 3, 1).feasible);
}

TEST(PimsnerPopa, DiagonalMasa) {
  ComplexMatrix g = ComplexMatrix::Zero(2, 2);
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  const Inclusion inc = make_custom_inclusion({{2}, {0.5}}, {g}, 0.5);
  EXPECT_EQ(inc.n_image.dim(), 2);
  EXPECT_TRUE(pimsner_popa_validate(inc, 8, 0.5, 2).feasible);
  EXPECT_FALSE(pimsner_popa_validate(inc, 8, 0.51, 2).feasible);
  // E is the diagonal part.
  ComplexMatrix x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 4.0;
  EXPECT_LT((expectation_E(inc, x) - d).norm(), 1e-12);
}

TEST(Families, BuiltinLambdas) {
  const auto fams = builtin_families();
  ASSERT_EQ(fams.size(), 5u);
  for (const auto& f : fams) EXPECT_NEAR(make_builtin_family(f.name).lambda, f.lambda, 1e-15) << f.name;
  EXPECT_THROW(make_builtin_family("tensor(9,9)x"), DomainError);
}

TEST(Norms, TwoNormBelowOpNorm) {
  const Inclusion inc = make_builtin_family("group_flip(M2,flip)");
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix x = inc.m_algebra.random_element(rng);
    const Norms n = norms(inc.m_algebra, x);
    EXPECT_LE(n.two_norm, n.op_norm + 1e-12);
  }
}
