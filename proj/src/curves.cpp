#include "subgeo/curves.hpp"

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

// Cubic midpoint value between nodes k and k + 1.
ComplexMatrix midpoint(const std::vector<ComplexMatrix>& a, std::size_t k) {
  const std::size_t n = a.size() - 1;
  if (n < 3) return 0.5 * (a[k] + a[k + 1]);
  if (k == 0) return (5.0 * a[0] + 15.0 * a[1] - 5.0 * a[2] + a[3]) / 16.0;
  if (k == n - 1) return (a[n - 3] - 5.0 * a[n - 2] + 15.0 * a[n - 1] + 5.0 * a[n]) / 16.0;
  return (-a[k - 1] + 9.0 * a[k] + 9.0 * a[k + 1] - a[k + 2]) / 16.0;
}

}  // namespace

std::vector<ComplexMatrix> DiscreteCurve::projections() const {
  std::vector<ComplexMatrix> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.q);
  return out;
}

DiscreteCurve make_curve(std::vector<OrbitPoint> samples) {
  if (samples.size() < 2) throw DomainError("curve: at least 2 samples are required");
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double gap = linalg::op_norm(samples[k + 1].q - samples[k].q);
    if (gap > 0.5) {
      throw RefinementError("curve: samples " + std::to_string(k) + " and " + std::to_string(k + 1) +
                            " are " + fmt(gap) + " apart (guard 0.5); use a finer grid");
    }
  }
  return DiscreteCurve{std::move(samples)};
}

DiscreteCurve sample_geodesic(const BasicConstruction& bc, const OrbitPoint& point, const ComplexMatrix& z,
                              int grid_n) {
  if (grid_n < 1) throw DomainError("sample_geodesic: grid needs at least 2 points");
  std::vector<OrbitPoint> s;
  for (int k = 0; k <= grid_n; ++k) s.push_back(geodesic_at(bc, point, z, static_cast<double>(k) / grid_n));
  return make_curve(std::move(s));
}

DiscreteCurve sample_witness_path(const BasicConstruction& bc,
                                  const std::function<ComplexMatrix(double)>& u_of_t, int grid_n) {
  if (grid_n < 1) throw DomainError("sample_witness_path: grid needs at least 2 points");
  std::vector<OrbitPoint> s;
  for (int k = 0; k <= grid_n; ++k) s.push_back(orbit_point(bc, u_of_t(static_cast<double>(k) / grid_n)));
  return make_curve(std::move(s));
}

// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> fd_velocity(const std::vector<ComplexMatrix>& f, double h) {
  const std::size_t m = f.size();
  if (m < 2) throw DomainError("fd_velocity: at least 2 samples are required");
  std::vector<ComplexMatrix> d(m);
  if (m == 2) {
    d[0] = d[1] = (f[1] - f[0]) / h;
    return d;
  }
  if (m < 5) {
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * h);
    return d;
  }
  const double c = 1.0 / (12.0 * h);
  d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
  d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  for (std::size_t i = 2; i + 2 < m; ++i) d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
  const std::size_t e = m - 1;
  d[e - 1] = c * (3.0 * f[e] + 10.0 * f[e - 1] - 18.0 * f[e - 2] + 6.0 * f[e - 3] - f[e - 4]);
  d[e] = c * (25.0 * f[e] - 48.0 * f[e - 1] + 36.0 * f[e - 2] - 16.0 * f[e - 3] + 3.0 * f[e - 4]);
  return d;
}

std::vector<ComplexMatrix> fd_second_derivative(const std::vector<ComplexMatrix>& f, double h) {
  const std::size_t m = f.size();
  if (m < 6) throw DomainError("fd_second_derivative: at least 6 samples are required");
  const double c = 1.0 / (12.0 * h * h);
  std::vector<ComplexMatrix> d(m);
  d[0] = c * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]);
  d[1] = c * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]);
  for (std::size_t i = 2; i + 2 < m; ++i) {
    d[i] = c * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
  }
  const std::size_t e = m - 1;
  d[e - 1] = c * (10.0 * f[e] - 15.0 * f[e - 1] - 4.0 * f[e - 2] + 14.0 * f[e - 3] - 6.0 * f[e - 4] + f[e - 5]);
  d[e] = c * (45.0 * f[e] - 154.0 * f[e - 1] + 214.0 * f[e - 2] - 156.0 * f[e - 3] + 61.0 * f[e - 4] - 10.0 * f[e - 5]);
  return d;
}

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;  // intervals
  if (f.size() < 2) throw DomainError("simpson: at least 2 samples are required");
  if (n == 1) return 0.5 * h * (f[0] + f[1]);
  std::size_t even_end = n;
  double tail = 0.0;
  if (n % 2 == 1) {
    even_end = n - 3;
    tail = 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
  }
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even_end; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  return s * h / 3.0 + tail;
}

double path_length(const std::vector<ComplexMatrix>& samples, LengthMetric metric,
                   const std::function<double(const ComplexMatrix&)>& two_norm) {
  if (samples.size() < 2) throw DomainError("path_length: at least 2 samples are required");
  const double h = 1.0 / static_cast<double>(samples.size() - 1);
  const auto v = fd_velocity(samples, h);
  std::vector<double> integrand(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    switch (metric) {
      case LengthMetric::two_norm: integrand[k] = two_norm(v[k]); break;
      case LengthMetric::op_norm: integrand[k] = linalg::op_norm(v[k]); break;
      case LengthMetric::energy: {
        const double n2 = two_norm(v[k]);
        integrand[k] = n2 * n2;
        break;
      }
    }
  }
  return simpson(integrand, h);
}

double curve_length(const BasicConstruction& bc, const DiscreteCurve& curve, LengthMetric metric) {
  return m1_path_length(bc, curve.projections(), metric);
}

double lift_length(const Inclusion& inc, const std::vector<ComplexMatrix>& path, LengthMetric metric) {
  return path_length(path, metric, [&](const ComplexMatrix& x) { return inc.m_algebra.two_norm(x); });
}

double m1_path_length(const BasicConstruction& bc, const std::vector<ComplexMatrix>& path, LengthMetric metric) {
  return path_length(path, metric, [&](const ComplexMatrix& x) { return bc.two_norm1(x); });
}

// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> covariant_derivative(const BasicConstruction& bc, const DiscreteCurve& curve,
                                                const std::vector<ComplexMatrix>& field) {
  if (field.size() != curve.samples.size()) {
    throw DomainError("covariant_derivative: field has " + std::to_string(field.size()) + " samples, curve has " +
                      std::to_string(curve.samples.size()));
  }
  const std::size_t m = field.size();
  const double h = curve.step();
  std::vector<ComplexMatrix> d(m);
  if (m == 2) {
    d[0] = d[1] = (field[1] - field[0]) / h;
  } else {
    d[0] = (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (field[i + 1] - field[i - 1]) / (2.0 * h);
    d[m - 1] = (3.0 * field[m - 1] - 4.0 * field[m - 2] + field[m - 3]) / (2.0 * h);
  }
  for (std::size_t i = 0; i < m; ++i) d[i] = tangent_projection(bc, curve.samples[i], linalg::hermitian_part(d[i]));
  return d;
}

double geodesic_residual(const BasicConstruction& bc, const DiscreteCurve& curve) {
  const auto acc = fd_second_derivative(curve.projections(), curve.step());
  double worst = 0.0;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    const ComplexMatrix pi = tangent_projection(bc, curve.samples[k], linalg::hermitian_part(acc[k]));
    worst = std::max(worst, bc.two_norm1(pi));
  }
  return worst;
}

LiftResult horizontal_lift(const BasicConstruction& bc, const DiscreteCurve& curve, double lift_tol) {
  const std::size_t m = curve.samples.size();
  const double h = curve.step();
  const auto q = curve.projections();
  const auto vel = fd_velocity(q, h);

  std::vector<ComplexMatrix> a(m);
  for (std::size_t k = 0; k < m; ++k) a[k] = kappa_projected(bc, curve.samples[k], vel[k]);

  const Eigen::Index n = bc.inclusion().ambient_dim();
  LiftResult out;
  out.gamma.reserve(m);
  out.gamma.push_back(ComplexMatrix::Identity(n, n));
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const ComplexMatrix& g = out.gamma.back();
    const ComplexMatrix am = midpoint(a, k);
    const ComplexMatrix k1 = a[k] * g;
    const ComplexMatrix k2 = am * (g + 0.5 * h * k1);
    const ComplexMatrix k3 = am * (g + 0.5 * h * k2);
    const ComplexMatrix k4 = a[k + 1] * (g + h * k3);
    out.gamma.push_back(linalg::nearest_unitary(g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)));
  }

  const ComplexMatrix& q0 = q.front();
  for (std::size_t k = 0; k < m; ++k) {
    const ComplexMatrix lg = bc.left_rep(out.gamma[k]);
    out.reconstruction_defect = std::max(out.reconstruction_defect, linalg::op_norm(lg * q0 * lg.adjoint() - q[k]));
    out.unitarity_defect = std::max(out.unitarity_defect, linalg::unitary_defect(out.gamma[k]));
  }
  const auto gdot = fd_velocity(out.gamma, h);
  const TracialAlgebra& malg = bc.inclusion().m_algebra;
  for (std::size_t k = 0; k < m; ++k) {
    const ComplexMatrix gen = gdot[k] * out.gamma[k].adjoint();
    out.horizontality_defect =
        std::max(out.horizontality_defect, malg.two_norm(translated_expectation(bc, curve.samples[k], gen)));
  }

  if (out.reconstruction_defect > lift_tol || out.horizontality_defect > lift_tol ||
      out.unitarity_defect > 1e-10) {
    throw RefinementError("horizontal_lift: post-hoc check failed (reconstruction " +
                          fmt(out.reconstruction_defect) + ", horizontality " + fmt(out.horizontality_defect) +
                          ", unitarity " + fmt(out.unitarity_defect) + "); use a finer grid than " +
                          std::to_string(curve.grid_n()));
  }
  return out;
}

// ---------------------------------------------------------------------------

FirstVariationResult first_variation(const Inclusion& inc, const VariationFamily& family) {
  const std::size_t m = family.zero.size();
  if (m < 2 || family.minus.size() != m || family.plus.size() != m) {
    throw DomainError("first_variation: the three curves must share a grid of at least 2 samples");
  }
  if (!(family.h > 0.0)) throw DomainError("first_variation: h must be positive");
  for (const auto* curve : {&family.minus, &family.zero, &family.plus}) {
    for (const auto& u : *curve) {
      if (linalg::unitary_defect(u) > 1e-8) throw DomainError("first_variation: samples must be unitary");
    }
  }
  const TracialAlgebra& malg = inc.m_algebra;
  const double dt = 1.0 / static_cast<double>(m - 1);
  auto inner = [&](const ComplexMatrix& x, const ComplexMatrix& y) { return malg.inner(x, y).real(); };

  const auto gdot = fd_velocity(family.zero, dt);
  std::vector<ComplexMatrix> x0(m), y0(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ComplexMatrix gs = family.zero[k].adjoint();
    x0[k] = gs * gdot[k];
    y0[k] = gs * (family.plus[k] - family.minus[k]) / (2.0 * family.h);
  }
  const auto xdot = fd_velocity(x0, dt);
  std::vector<double> integrand(m);
  for (std::size_t k = 0; k < m; ++k) integrand[k] = inner(xdot[k], y0[k]);

  FirstVariationResult r;
  r.formula = inner(x0.back(), y0.back()) - inner(x0.front(), y0.front()) - simpson(integrand, dt);
  r.finite_difference = (lift_length(inc, family.plus, LengthMetric::energy) -
                         lift_length(inc, family.minus, LengthMetric::energy)) /
                        (4.0 * family.h);
  r.tolerance = std::max(1e-5, 10.0 * family.h * family.h);
  r.agrees = std::abs(r.formula - r.finite_difference) <= r.tolerance;
  return r;
}

}  // namespace subgeo
