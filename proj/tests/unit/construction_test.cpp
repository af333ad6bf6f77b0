#include "subgeo/basic_construction.hpp"
#include "subgeo/errors.hpp"
#include "subgeo/families.hpp"

#include <gtest/gtest.h>

using namespace subgeo;

namespace {

// Matrix of left multiplication by x in the τ-orthonormal basis: ⟨x b_j, b_i⟩.
ComplexMatrix left_oracle(const BasicConstruction& bc, const ComplexMatrix& x) {
  const auto& b = bc.l2_basis();
  const auto& m = bc.inclusion().m_algebra;
  ComplexMatrix out(bc.dim(), bc.dim());
  for (Eigen::Index i = 0; i < bc.dim(); ++i)
    for (Eigen::Index j = 0; j < bc.dim(); ++j) out(i, j) = m.inner(x * b[j], b[i]);
  return out;
}

ComplexMatrix right_oracle(const BasicConstruction& bc, const ComplexMatrix& y) {
  const auto& b = bc.l2_basis();
  const auto& m = bc.inclusion().m_algebra;
  ComplexMatrix out(bc.dim(), bc.dim());
  for (Eigen::Index i = 0; i < bc.dim(); ++i)
    for (Eigen::Index j = 0; j < bc.dim(); ++j) out(i, j) = m.inner(b[j] * y, b[i]);
  return out;
}

class ConstructionFamilies : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(ConstructionFamilies, LeftRepresentationMatchesOracle) {
  const BasicConstruction bc = build_basic_construction(make_builtin_family(GetParam()));
  Rng rng(31);
  const ComplexMatrix x = bc.inclusion().m_algebra.random_element(rng);
  const ComplexMatrix y = bc.inclusion().m_algebra.random_element(rng);
  EXPECT_LT((bc.left_rep(x) - left_oracle(bc, x)).norm(), 1e-12);
  EXPECT_LT((bc.left_rep(x * y) - bc.left_rep(x) * bc.left_rep(y)).norm(), 1e-11);
  EXPECT_LT((bc.left_rep(x.adjoint()) - bc.left_rep(x).adjoint()).norm(), 1e-12);
}

TEST_P(ConstructionFamilies, JonesProjection) {
  const BasicConstruction bc = build_basic_construction(make_builtin_family(GetParam()));
  const ComplexMatrix& p = bc.jones_p();
  EXPECT_LT(linalg::projection_defect(p), 1e-12);
  EXPECT_NEAR(bc.tau1(p).real(), bc.lambda(), 1e-12);
  EXPECT_NEAR(p.trace().real(), static_cast<double>(bc.inclusion().n_image.dim()), 1e-10);
  EXPECT_LT((bc.e1(p) - bc.lambda() * bc.identity1()).norm(), 1e-11);

  Rng rng(32);
  const ComplexMatrix x = bc.inclusion().m_algebra.random_element(rng);
  const ComplexMatrix ex = expectation_E(bc.inclusion(), x);
  EXPECT_LT((p * bc.left_rep(x) * p - bc.left_rep(ex) * p).norm(), 1e-11);
}

TEST_P(ConstructionFamilies, M1CommutesWithRightAction) {
  const BasicConstruction bc = build_basic_construction(make_builtin_family(GetParam()));
  Rng rng(33);
  const ComplexMatrix rn = right_oracle(bc, bc.inclusion().n_image.random_element(rng));
  for (Eigen::Index i = 0; i < bc.m1().dim(); ++i) {
    const ComplexMatrix y = bc.m1().basis(i);
    EXPECT_LT((y * rn - rn * y).norm(), 1e-10);
  }
  // M1 = (JNJ)': dim = Σ over blocks of N of (multiplicity in L²M)², which equals D² for N = C.
  if (bc.inclusion().n_image.dim() == 1) EXPECT_EQ(bc.m1().dim(), bc.dim() * bc.dim());
}

TEST_P(ConstructionFamilies, RecoverUnitaryAndReduce) {
  const BasicConstruction bc = build_basic_construction(make_builtin_family(GetParam()));
  Rng rng(34);
  const ComplexMatrix u = linalg::expm_antihermitian(bc.inclusion().m_algebra.random_antihermitian(rng));
  const ComplexMatrix omega = bc.left_rep(u) * bc.jones_p();
  EXPECT_LT((recover_unitary(bc, omega) - u).norm(), 1e-10);
  const ComplexMatrix x = bc.inclusion().m_algebra.random_element(rng);
  EXPECT_LT((reduce_R(bc, bc.left_rep(x) * bc.jones_p()) - x).norm(), 1e-10);
  EXPECT_THROW(recover_unitary(bc, 0.5 * omega), DomainError);
}

TEST_P(ConstructionFamilies, PropertiesReportPasses) {
  const BasicConstruction bc = build_basic_construction(make_builtin_family(GetParam()));
  const ConstructionReport rep = verify_construction_properties(bc, 8, 5);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_TRUE(rep.lambda_sharp);
  EXPECT_LT(rep.sharpness_margin, 0.0);
  EXPECT_EQ(rep.m1_dimension, static_cast<int>(bc.m1().dim()));
}

INSTANTIATE_TEST_SUITE_P(Builtin, ConstructionFamilies,
                         ::testing::Values("tensor(1,2)", "tensor(1,3)", "group_flip(scalars)",
                                           "group_flip(M2,flip)"));

TEST(Construction, WrongLambdaIsRejected) {
  const Inclusion inc = with_lambda(make_tensor_inclusion(1, 2), 0.3);
  try {
    build_basic_construction(inc);
    FAIL() << "expected ConstructionError";
  } catch (const ConstructionError& e) {
    EXPECT_GT(e.property(), 0);
  }
}

TEST(Construction, CenterDimension) {
  EXPECT_EQ(center_dimension(TracialAlgebra::from_descriptor({{2, 1}, {0.25, 0.5}})), 2);
  EXPECT_EQ(center_dimension(TracialAlgebra::from_descriptor({{3}, {1.0 / 3.0}})), 1);
}
