#include "subgeo/curves.hpp"
#include "subgeo/errors.hpp"
#include "subgeo/families.hpp"
#include "subgeo/sections.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace subgeo;

namespace {

class OrbitFixture : public ::testing::TestWithParam<std::string> {
 protected:
  OrbitFixture() : bc(build_basic_construction(make_builtin_family(GetParam()))) {}
  BasicConstruction bc;

  OrbitPoint random_point(Rng& rng) {
    return orbit_point(bc, linalg::expm_antihermitian(bc.inclusion().m_algebra.random_antihermitian(rng)));
  }
};

}  // namespace

TEST_P(OrbitFixture, PointsAreProjectionsOfTraceLambda) {
  Rng rng(41);
  const OrbitPoint q = random_point(rng);
  EXPECT_LT(orbit_point_defect(bc, q), 1e-10);
  EXPECT_NEAR(bc.tau1(q.q).real(), bc.lambda(), 1e-12);
  EXPECT_THROW(orbit_point(bc, 2.0 * q.witness_u), DomainError);
}

TEST_P(OrbitFixture, GeodesicMatchesPadeConjugation) {
  Rng rng(42);
  const OrbitPoint q = random_point(rng);
  const ComplexMatrix z = random_horizontal_at(bc, q, rng);
  const ComplexMatrix lz = bc.left_rep(z);
  for (double t : {0.0, 0.3, 1.0}) {
    const ComplexMatrix e = (t * lz).exp();
    const ComplexMatrix oracle = e * q.q * e.adjoint();
    EXPECT_LT((geodesic_at(bc, q, z, t).q - oracle).norm(), 1e-11) << t;
  }
}

TEST_P(OrbitFixture, TangentProjectionAndKappa) {
  Rng rng(43);
  const OrbitPoint q = random_point(rng);
  const ComplexMatrix z = random_horizontal_at(bc, q, rng);
  EXPECT_LT(horizontal_defect_at(bc, q, z), 1e-12);
  const TangentVector v = delta_q(bc, q, z);
  EXPECT_LT((v.ambient - (bc.left_rep(z) * q.q - q.q * bc.left_rep(z))).norm(), 1e-12);
  EXPECT_LT((kappa_q(bc, q, v.ambient) - z).norm(), 1e-10);

  // Π is idempotent, fixes tangent vectors and is τ1-self-adjoint.
  const ComplexMatrix h = linalg::hermitian_part(bc.m1().random_element(rng));
  const ComplexMatrix k = linalg::hermitian_part(bc.m1().random_element(rng));
  const ComplexMatrix ph = tangent_projection(bc, q, h);
  EXPECT_LT((tangent_projection(bc, q, ph) - ph).norm(), 1e-11);
  EXPECT_LT((tangent_projection(bc, q, v.ambient) - v.ambient).norm(), 1e-11);
  EXPECT_LT(std::abs(bc.tau1(ph * k) - bc.tau1(h * tangent_projection(bc, q, k))), 1e-11);
  // Tangent vectors at q are q-codiagonal.
  EXPECT_LT((q.q * ph * q.q).norm(), 1e-11);
  EXPECT_THROW(delta_q(bc, q, bc.inclusion().m_algebra.identity() * Complex(0, 1)), DomainError);
}

TEST_P(OrbitFixture, GeodesicLengthIsConstantSpeed) {
  Rng rng(44);
  const OrbitPoint q = random_point(rng);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q, rng), 0.4);
  const ComplexMatrix lz = bc.left_rep(z);
  const double speed = bc.two_norm1(lz * q.q - q.q * lz);
  const DiscreteCurve c = sample_geodesic(bc, q, z, 256);
  EXPECT_NEAR(curve_length(bc, c, LengthMetric::two_norm), speed, 1e-10);
  EXPECT_NEAR(curve_length(bc, c, LengthMetric::energy), speed * speed, 1e-10);
  EXPECT_NEAR(speed, std::sqrt(2.0 * bc.lambda()) * bc.inclusion().m_algebra.two_norm(z), 1e-12);
  EXPECT_LT(geodesic_residual(bc, c), 1e-7);
}

TEST_P(OrbitFixture, HorizontalLiftOfGeodesicIsExponential) {
  Rng rng(45);
  const OrbitPoint q = base_point(bc);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q, rng), 0.5);
  const DiscreteCurve c = sample_geodesic(bc, q, z, 64);
  const LiftResult lift = horizontal_lift(bc, c);
  const ComplexMatrix oracle = z.exp();
  EXPECT_LT((lift.gamma.back() - oracle).norm(), 1e-6);
  EXPECT_LT(lift.unitarity_defect, 1e-10);
}

TEST_P(OrbitFixture, GrassmannSectionRoundTrip) {
  Rng rng(46);
  const OrbitPoint q0 = random_point(rng);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), 0.25);
  const OrbitPoint q1 = geodesic_at(bc, q0, z, 1.0);
  const ComplexMatrix x = grassmann_section(q0.q, q1.q);
  const ComplexMatrix e = x.exp();
  EXPECT_LT((e * q0.q * e.adjoint() - q1.q).norm(), 1e-10);
  EXPECT_LT((q0.q * x * q0.q).norm(), 1e-10);
  EXPECT_LT(linalg::op_norm(x), M_PI / 2);

  const ComplexMatrix theta = orbit_section_theta(bc, q1);
  const ComplexMatrix lt = bc.left_rep(theta);
  EXPECT_LT((lt * bc.jones_p() * lt.adjoint() - q1.q).norm(), 1e-10);
}

TEST_P(OrbitFixture, LogInvertsExponential) {
  Rng rng(47);
  const OrbitPoint q0 = random_point(rng);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), 0.2);
  const OrbitPoint q1 = geodesic_at(bc, q0, z, 1.0);
  const LogResult lr = orbit_log(bc, q0, q1, 1e-10);
  EXPECT_LT(bc.inclusion().m_algebra.two_norm(lr.z - z), 1e-8);
  EXPECT_LT(horizontal_defect_at(bc, q0, lr.z), 1e-10);
  EXPECT_LT(lr.residual, 1e-10);
}

TEST_P(OrbitFixture, PolygonalShortening) {
  Rng rng(48);
  const Inclusion& inc = bc.inclusion();
  const ComplexMatrix a = 0.6 * inc.m_algebra.random_antihermitian(rng);
  const ComplexMatrix b = 0.6 * inc.m_algebra.random_antihermitian(rng);
  const DiscreteCurve c = sample_witness_path(
      bc, [&](double t) { return linalg::expm_antihermitian(ComplexMatrix(t * a + t * t * b)); }, 64);
  const PolygonalResult pr = shorten_to_polygonal(bc, c, 0.2);
  ASSERT_FALSE(pr.arcs.empty());
  EXPECT_DOUBLE_EQ(pr.arcs.front().t_start, 0.0);
  EXPECT_DOUBLE_EQ(pr.arcs.back().t_end, 1.0);
  EXPECT_LE(pr.polygonal_length, pr.curve_length + 1e-6);
  for (std::size_t i = 1; i < pr.arcs.size(); ++i) EXPECT_DOUBLE_EQ(pr.arcs[i].t_start, pr.arcs[i - 1].t_end);
}

INSTANTIATE_TEST_SUITE_P(Builtin, OrbitFixture,
                         ::testing::Values("tensor(1,2)", "tensor(1,3)", "group_flip(scalars)",
                                           "group_flip(M2,flip)"));

TEST(Orbit, LogRadiusGuard) {
  const BasicConstruction bc = build_basic_construction(make_tensor_inclusion(1, 2));
  Rng rng(49);
  const OrbitPoint q0 = base_point(bc);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, q0, rng), 1.2);
  EXPECT_THROW(orbit_log(bc, q0, geodesic_at(bc, q0, z, 1.0)), RadiusError);
}

TEST(Orbit, GrassmannSectionRadiusGuard) {
  ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
  p1(0, 0) = 1.0;
  ComplexMatrix p2 = ComplexMatrix::Zero(2, 2);
  p2(1, 1) = 1.0;
  EXPECT_THROW(grassmann_section(p1, p2), RadiusError);
}

TEST(Orbit, CornerJumpVanishesForEqualDirections) {
  const BasicConstruction bc = build_basic_construction(make_tensor_inclusion(1, 2));
  Rng rng(50);
  const OrbitPoint q = base_point(bc);
  const ComplexMatrix z = random_horizontal_at(bc, q, rng);
  EXPECT_LT(corner_jump(bc, q, z, z), 1e-15);
  EXPECT_GT(corner_jump(bc, q, z, -z), 1e-3);
}

TEST(GridCalculus, FourthOrderRulesAreExactOnQuartics) {
  const int n = 10;
  const double h = 1.0 / n;
  std::vector<ComplexMatrix> f;
  std::vector<double> g;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    ComplexMatrix m(1, 1);
    m(0, 0) = t * t * t * t - 2.0 * t * t + t;
    f.push_back(m);
    g.push_back(t * t * t);
  }
  const auto v = fd_velocity(f, h);
  const auto a = fd_second_derivative(f, h);
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    EXPECT_NEAR(v[k](0, 0).real(), 4.0 * t * t * t - 4.0 * t + 1.0, 1e-10) << k;
    EXPECT_NEAR(a[k](0, 0).real(), 12.0 * t * t - 4.0, 1e-8) << k;
  }
  EXPECT_NEAR(simpson(g, h), 0.25, 1e-14);
  std::vector<double> odd;  // 9 intervals: 3/8 tail
  for (int k = 0; k <= 9; ++k) odd.push_back(std::pow(k / 9.0, 3));
  EXPECT_NEAR(simpson(odd, 1.0 / 9.0), 0.25, 1e-14);
}

TEST(GridCalculus, ResolutionGuard) {
  const BasicConstruction bc = build_basic_construction(make_tensor_inclusion(1, 2));
  Rng rng(51);
  const ComplexMatrix z = with_op_norm(random_horizontal_at(bc, base_point(bc), rng), 1.5);
  EXPECT_THROW(sample_geodesic(bc, base_point(bc), z, 2), RefinementError);
}
