#include "subgeo/errors.hpp"
#include "subgeo/linalg.hpp"
#include "subgeo/random.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace subgeo;
using namespace subgeo::linalg;

namespace {

ComplexMatrix random_ah(Rng& rng, int n, double scale) {
  const ComplexMatrix g = rng.gaussian(n, n);
  return scale * antihermitian_part(g);
}

ComplexMatrix random_herm(Rng& rng, int n) { return hermitian_part(rng.gaussian(n, n)); }

}  // namespace

TEST(Linalg, ExpAntihermitianMatchesPade) {
  Rng rng(11);
  for (int n : {1, 2, 5, 8}) {
    const ComplexMatrix x = random_ah(rng, n, 1.7);
    const ComplexMatrix oracle = x.exp();
    const ComplexMatrix u = expm_antihermitian(x);
    EXPECT_LT((u - oracle).norm(), 1e-12 * n);
    EXPECT_LT(unitary_defect(u), 1e-13);
  }
}

TEST(Linalg, PrincipalLogInvertsExp) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix x = random_ah(rng, 6, 1.0);
    x = x * (2.5 / op_norm(x));  // spectrum inside (-iπ, iπ)
    const ComplexMatrix u = x.exp();
    const ComplexMatrix l = log_unitary_principal(u);
    EXPECT_LT((l - x).norm(), 1e-10);
    EXPECT_LT(antihermitian_defect(l), 1e-12);
  }
}

TEST(Linalg, PrincipalLogRejectsMinusOne) {
  ComplexMatrix u = ComplexMatrix::Identity(3, 3);
  u(1, 1) = -1.0;
  EXPECT_THROW(log_unitary_principal(u), BranchError);
}

TEST(Linalg, SpectralFunctionsOnHermitian) {
  Rng rng(13);
  const ComplexMatrix h = random_herm(rng, 5);
  const ComplexMatrix c = spectral_function(h, ScalarFunction::cos);
  const ComplexMatrix s = spectral_function(h, ScalarFunction::sin);
  EXPECT_LT((c * c + s * s - ComplexMatrix::Identity(5, 5)).norm(), 1e-12);

  // cos via the Padé exponential of ih.
  const ComplexMatrix e = (Complex(0, 1) * h).exp();
  EXPECT_LT((c - 0.5 * (e + e.adjoint())).norm(), 1e-12);

  const ComplexMatrix sq = spectral_function(h * h, ScalarFunction::sqrt);
  EXPECT_LT((sq * sq - h * h).norm(), 1e-11);
  EXPECT_LT(hermitian_defect(sq), 1e-13);

  // sinc(h) h = sin(h).
  const ComplexMatrix sc = spectral_function(h, ScalarFunction::sinc);
  EXPECT_LT((sc * h - s).norm(), 1e-12);
}

TEST(Linalg, SincAtZero) {
  EXPECT_DOUBLE_EQ(sinc(0.0).real(), 1.0);
  EXPECT_NEAR(sinc(1e-9).real(), 1.0, 1e-15);
  EXPECT_NEAR(sinc(M_PI / 2).real(), 2.0 / M_PI, 1e-15);
  const ComplexMatrix z = ComplexMatrix::Zero(3, 3);
  EXPECT_LT((spectral_function(z, ScalarFunction::sinc) - ComplexMatrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(Linalg, NonNormalInputRejected) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(decompose_normal(a), DomainError);
  EXPECT_THROW(spectral_function(a, ScalarFunction::exp), DomainError);
}

TEST(Linalg, DecomposeUnitary) {
  Rng rng(14);
  const ComplexMatrix u = random_ah(rng, 4, 1.0).exp();
  const SpectralDecomposition d = decompose_normal(u);
  EXPECT_LT((d.reconstruct() - u).norm(), 1e-12);
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) EXPECT_NEAR(std::abs(d.eigenvalues(i)), 1.0, 1e-12);
}

TEST(Linalg, PolarOfAntihermitian) {
  Rng rng(15);
  // Rank deficient: kernel of dimension 2.
  const ComplexMatrix v = rng.gaussian(5, 3);
  const ComplexMatrix x = v * random_ah(rng, 3, 1.0) * v.adjoint();
  const PolarParts pp = polar_antihermitian(x);
  EXPECT_LT((pp.u * pp.absx - x).norm(), 1e-11);
  EXPECT_LT((pp.absx * pp.absx + x * x).norm(), 1e-10);
  EXPECT_LT(antihermitian_defect(pp.u), 1e-12);
  EXPECT_LT((pp.u * pp.absx - pp.absx * pp.u).norm(), 1e-11);
  // u*u is the range projection of x.
  const ComplexMatrix r = pp.u.adjoint() * pp.u;
  EXPECT_LT(projection_defect(r), 1e-10);
  EXPECT_NEAR(r.trace().real(), 3.0, 1e-9);
}

TEST(Linalg, NearestUnitaryMatchesSvd) {
  Rng rng(16);
  const ComplexMatrix a = rng.gaussian(4, 4);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix oracle = svd.matrixU() * svd.matrixV().adjoint();
  EXPECT_LT((nearest_unitary(a) - oracle).norm(), 1e-11);
}

TEST(Linalg, OpNormAndDefects) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = Complex(0, -3.0);
  EXPECT_NEAR(op_norm(d), 3.0, 1e-14);
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  EXPECT_LT(projection_defect(p), 1e-15);
  EXPECT_NEAR(normalized_trace(p).real(), 0.5, 1e-15);
  EXPECT_TRUE(is_hermitian(p, 1e-14));
  EXPECT_FALSE(is_unitary(p, 1e-3));
}

TEST(Linalg, KronEntries) {
  Rng rng(17);
  const ComplexMatrix a = rng.gaussian(2, 3);
  const ComplexMatrix b = rng.gaussian(3, 2);
  const ComplexMatrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 6);
  ASSERT_EQ(k.cols(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 2; ++s) EXPECT_EQ(k(i * 3 + r, j * 2 + s), a(i, j) * b(r, s));
}

TEST(Linalg, FrobeniusInner) {
  Rng rng(18);
  const ComplexMatrix a = rng.gaussian(3, 3);
  const ComplexMatrix b = rng.gaussian(3, 3);
  EXPECT_LT(std::abs(frobenius_inner(a, b) - (a.adjoint() * b).trace()), 1e-13);
}

TEST(Linalg, TextRoundTrip) {
  Rng rng(19);
  const ComplexMatrix a = rng.gaussian(3, 4);
  const ComplexMatrix back = from_text(to_text(a));
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 4);
  EXPECT_EQ((back - a).norm(), 0.0);
}

TEST(Linalg, TextParsesPlainEntries) {
  const ComplexMatrix a = from_text("1 0\n0 -2.5\n");
  EXPECT_EQ(a(1, 1), Complex(-2.5, 0.0));
  EXPECT_THROW(from_text("1 2\n3\n"), DomainError);
}
