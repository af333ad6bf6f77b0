#include "subgeo/orbit.hpp"

#include "subgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subgeo {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

double frob_hermitian_defect(const ComplexMatrix& x) { return (x - x.adjoint()).norm() * 0.5; }

}  // namespace

OrbitPoint base_point(const BasicConstruction& bc) {
  const Eigen::Index n = bc.inclusion().ambient_dim();
  return {bc.jones_p(), ComplexMatrix::Identity(n, n)};
}

OrbitPoint orbit_point(const BasicConstruction& bc, const ComplexMatrix& u) {
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  if (u.rows() != m.ambient_dim() || u.cols() != m.ambient_dim()) {
    throw DomainError("orbit_point: witness has the wrong shape");
  }
  const double mem = m.membership_defect(u);
  if (mem > 1e-8) throw DomainError("orbit_point: witness is not in M (defect " + fmt(mem) + ")");
  const double udef = linalg::unitary_defect(u);
  if (udef > 1e-8) throw DomainError("orbit_point: witness is not unitary (defect " + fmt(udef) + ")");
  const ComplexMatrix lu = bc.left_rep(u);
  return {linalg::hermitian_part(ComplexMatrix(lu * bc.jones_p() * lu.adjoint())), u};
}

double orbit_point_defect(const BasicConstruction& bc, const OrbitPoint& point) {
  const ComplexMatrix& q = point.q;
  const double lambda = bc.lambda();
  const ComplexMatrix lu = bc.left_rep(point.witness_u);
  double d = linalg::projection_defect(q);
  d = std::max(d, std::abs(bc.tau1(q) - lambda));
  d = std::max(d, linalg::op_norm(bc.e1(q) - lambda * bc.identity1()));
  d = std::max(d, linalg::op_norm(lu * bc.jones_p() * lu.adjoint() - q));
  return d;
}

OrbitPoint translate(const BasicConstruction& bc, const ComplexMatrix& w, const OrbitPoint& point) {
  return orbit_point(bc, w * point.witness_u);
}

ComplexMatrix translated_expectation(const BasicConstruction& bc, const OrbitPoint& point,
                                     const ComplexMatrix& x) {
  const ComplexMatrix& u = point.witness_u;
  return u * expectation_E(bc.inclusion(), u.adjoint() * x * u) * u.adjoint();
}

ComplexMatrix horizontal_projection_at(const BasicConstruction& bc, const OrbitPoint& point,
                                       const ComplexMatrix& x) {
  const ComplexMatrix a = linalg::antihermitian_part(bc.inclusion().m_algebra.project(x));
  return linalg::antihermitian_part(ComplexMatrix(a - translated_expectation(bc, point, a)));
}

double horizontal_defect_at(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z) {
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  return std::max({m.two_norm(z + z.adjoint()), m.two_norm(translated_expectation(bc, point, z)),
                   m.membership_defect(z)});
}

ComplexMatrix random_horizontal_at(const BasicConstruction& bc, const OrbitPoint& point, Rng& rng) {
  return horizontal_projection_at(bc, point, bc.inclusion().m_algebra.random_element(rng));
}

TangentVector delta_q(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z) {
  const double scale = std::max(1.0, bc.inclusion().m_algebra.two_norm(z));
  const double defect = horizontal_defect_at(bc, point, z);
  if (defect > 1e-10 * scale) throw DomainError("delta_q: z is not horizontal at q (defect " + fmt(defect) + ")");
  const ComplexMatrix lz = bc.left_rep(z);
  return {z, lz * point.q - point.q * lz};
}

ComplexMatrix tangent_projection(const BasicConstruction& bc, const OrbitPoint& point,
                                 const ComplexMatrix& x) {
  const double herm = frob_hermitian_defect(x);
  if (herm > 1e-10 * std::max(1.0, x.norm())) {
    throw DomainError("tangent_projection: input is not Hermitian (defect " + fmt(herm) + ")");
  }
  const ComplexMatrix& q = point.q;
  const ComplexMatrix e = bc.e1(x * q - q * x);
  return (e * q - q * e) / (2.0 * bc.lambda());
}

ComplexMatrix kappa_projected(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& x) {
  const ComplexMatrix& u = point.witness_u;
  const ComplexMatrix lu = bc.left_rep(u);
  const ComplexMatrix v = tangent_projection(bc, point, linalg::hermitian_part(x));
  const ComplexMatrix z0 = bc.reduce(lu.adjoint() * v * lu);
  return horizontal_projection_at(bc, point, u * z0 * u.adjoint());
}

ComplexMatrix kappa_q(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& v) {
  const ComplexMatrix vh = linalg::hermitian_part(v);
  const double residual = std::max((v - vh).norm(), (vh - tangent_projection(bc, point, vh)).norm()) /
                          std::sqrt(static_cast<double>(bc.dim()));
  if (residual > 1e-8 * std::max(1.0, bc.two_norm1(v))) {
    throw DomainError("kappa_q: v is not tangent at q (residual " + fmt(residual) + ")");
  }
  const ComplexMatrix& u = point.witness_u;
  const ComplexMatrix lu = bc.left_rep(u);
  const ComplexMatrix z0 = bc.reduce(lu.adjoint() * vh * lu);
  return horizontal_projection_at(bc, point, u * z0 * u.adjoint());
}

OrbitPoint geodesic_at(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z, double t) {
  if (t == 0.0) return point;
  const ComplexMatrix w = linalg::expm_antihermitian(linalg::antihermitian_part(ComplexMatrix(t * z)));
  const ComplexMatrix u = w * point.witness_u;
  const ComplexMatrix lu = bc.left_rep(u);
  return {linalg::hermitian_part(ComplexMatrix(lu * bc.jones_p() * lu.adjoint())), u};
}

ComplexMatrix with_op_norm(const ComplexMatrix& z, double norm) {
  const double n = linalg::op_norm(z);
  if (n == 0.0) return z;
  return z * (norm / n);
}

}  // namespace subgeo
