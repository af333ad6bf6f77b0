#include "subgeo/sections.hpp"

#include "subgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace subgeo {

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

}  // namespace

ComplexMatrix grassmann_section(const ComplexMatrix& p1, const ComplexMatrix& p2) {
  const double dist = linalg::op_norm(p1 - p2);
  if (!(dist < 1.0)) throw RadiusError("grassmann_section: ||p1 - p2|| = " + fmt(dist) + " is not < 1");
  const Eigen::Index d = p1.rows();
  const ComplexMatrix one = ComplexMatrix::Identity(d, d);
  const ComplexMatrix u = (2.0 * p2 - one) * (2.0 * p1 - one);
  const ComplexMatrix x = 0.5 * linalg::log_unitary_principal(u);

  const ComplexMatrix e = linalg::expm_antihermitian(x);
  const double moved = linalg::op_norm(e * p1 * e.adjoint() - p2);
  const double diag = std::max(linalg::op_norm(p1 * x * p1), linalg::op_norm((one - p1) * x * (one - p1)));
  const double nx = linalg::op_norm(x);
  if (moved > 1e-9 || diag > 1e-9 || !(nx < std::numbers::pi / 2)) {
    throw ConsistencyError("grassmann_section: postcondition failed (transport " + fmt(moved) + ", diagonal part " +
                           fmt(diag) + ", norm " + fmt(nx) + ")");
  }
  return x;
}

ComplexMatrix orbit_section_theta(const BasicConstruction& bc, const OrbitPoint& q) {
  const ComplexMatrix& p = bc.jones_p();
  const double dist = linalg::op_norm(q.q - p);
  if (!(dist < 1.0)) throw RadiusError("orbit_section_theta: ||q - p|| = " + fmt(dist) + " is not < 1");
  const ComplexMatrix s = linalg::expm_antihermitian(grassmann_section(p, q.q));
  const ComplexMatrix u = recover_unitary(bc, s);
  const ComplexMatrix lu = bc.left_rep(u);
  const double residual = linalg::op_norm(lu * p * lu.adjoint() - q.q);
  if (residual > 1e-8) throw ConsistencyError("orbit_section_theta: theta p theta* differs from q by " + fmt(residual));
  return u;
}

// ---------------------------------------------------------------------------

LogResult orbit_log(const BasicConstruction& bc, const OrbitPoint& q0, const OrbitPoint& q1, double tol,
                    int max_iter) {
  const double dist = linalg::op_norm(q0.q - q1.q);
  if (dist > 0.5) {
    throw RadiusError("orbit_log: ||q0 - q1|| = " + fmt(dist) + " exceeds 0.5; split the segment");
  }
  // Solve at p: e^z p e^{-z} = u0* q1 u0, then translate back.
  const ComplexMatrix& u0 = q0.witness_u;
  const ComplexMatrix l0 = bc.left_rep(u0);
  const ComplexMatrix target = linalg::hermitian_part(ComplexMatrix(l0.adjoint() * q1.q * l0));
  const OrbitPoint p = base_point(bc);
  const Eigen::Index n = u0.rows();

  auto residual_of = [&](const ComplexMatrix& z, ComplexMatrix* pulled) {
    const ComplexMatrix lw = bc.left_rep(linalg::expm_antihermitian(z));
    const ComplexMatrix r = linalg::hermitian_part(ComplexMatrix(lw.adjoint() * target * lw)) - p.q;
    if (pulled) *pulled = r;
    return bc.two_norm1(r);
  };

  LogResult out;
  ComplexMatrix z = ComplexMatrix::Zero(n, n);
  ComplexMatrix r;
  double res = residual_of(z, &r);
  while (res > tol) {
    if (out.iterations >= max_iter) {
      throw ConvergenceError("orbit_log: no convergence after " + std::to_string(max_iter) +
                                 " iterations (residual " + fmt(res) + "); try a smaller radius",
                             res);
    }
    const ComplexMatrix step = kappa_projected(bc, p, r);
    double alpha = 1.0;
    for (;;) {
      const ComplexMatrix trial = horizontal_projection_at(bc, p, z + alpha * step);
      ComplexMatrix r_trial;
      const double res_trial = residual_of(trial, &r_trial);
      if (res_trial < res) {
        z = trial;
        r = r_trial;
        res = res_trial;
        break;
      }
      alpha *= 0.5;
      if (alpha < 1e-6) {
        throw ConvergenceError("orbit_log: step halving stalled at residual " + fmt(res) + "; try a smaller radius",
                               res);
      }
    }
    ++out.iterations;
  }
  out.z = horizontal_projection_at(bc, q0, u0 * z * u0.adjoint());
  out.residual = res;
  return out;
}

// ---------------------------------------------------------------------------

PolygonalResult shorten_to_polygonal(const BasicConstruction& bc, const DiscreteCurve& curve, double segment_bound) {
  const double bound = std::min(segment_bound, 0.5);
  const auto& s = curve.samples;
  const int n = curve.grid_n();
  const TracialAlgebra& m = bc.inclusion().m_algebra;
  const double scale = std::sqrt(2.0 * bc.lambda());

  PolygonalResult out;
  out.curve_length = curve_length(bc, curve, LengthMetric::two_norm);
  int i = 0;
  while (i < n) {
    if (linalg::op_norm(s[i + 1].q - s[i].q) >= bound) {
      throw DomainError("shorten_to_polygonal: samples " + std::to_string(i) + " and " + std::to_string(i + 1) +
                        " are farther apart than the segment bound");
    }
    int j = i + 1;
    while (j < n && linalg::op_norm(s[j + 1].q - s[i].q) < bound) ++j;
    LogResult lg;
    try {
      lg = orbit_log(bc, s[i], s[j], 1e-10);
    } catch (const ConvergenceError& e) {
      throw RefinementError(std::string("shorten_to_polygonal: segment logarithm failed: ") + e.what());
    }
    GeodesicArc arc;
    arc.t_start = static_cast<double>(i) / n;
    arc.t_end = static_cast<double>(j) / n;
    arc.base = s[i];
    arc.z = lg.z;
    arc.l2 = scale * m.two_norm(lg.z);
    out.polygonal_length += arc.l2;
    out.arcs.push_back(std::move(arc));
    i = j;
  }
  return out;
}

double corner_jump(const BasicConstruction& bc, const OrbitPoint& corner, const ComplexMatrix& z_in,
                   const ComplexMatrix& z_out) {
  const ComplexMatrix lz = bc.left_rep(z_out - z_in);
  return bc.two_norm1(lz * corner.q - corner.q * lz);
}

}  // namespace subgeo
