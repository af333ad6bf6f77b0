#include "subgeo/grassmann.hpp"

#include "subgeo/errors.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

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

Eigen::VectorXd realify(const ComplexMatrix& a) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd v(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(2 * i) = a.data()[i].real();
    v(2 * i + 1) = a.data()[i].imag();
  }
  return v;
}

// Orthonormal basis of the column span.
Eigen::MatrixXd orth(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the null space.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().rightCols(a.cols() - r);
}

double subspace_excess(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() == 0) return 0.0;
  if (b.cols() == 0) return 1.0;
  const Eigen::MatrixXd r = a - b * (b.transpose() * a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  return svd.singularValues()(0);
}

ComplexMatrix random_unitary(Eigen::Index k, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(rng.gaussian(k, k));
  return qr.householderQ() * ComplexMatrix::Identity(k, k);
}

}  // namespace

GrassmannTangent tangent_decompose(const BasicConstruction& bc, const ComplexMatrix& v) {
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix one = bc.identity1();
  const double herm = linalg::hermitian_defect(v);
  if (herm > 1e-9) throw DomainError("tangent_decompose: v is not Hermitian (defect " + fmt(herm) + ")");
  const double diag = std::max(linalg::op_norm(p * v * p), linalg::op_norm((one - p) * v * (one - p)));
  if (diag > 1e-9) throw DomainError("tangent_decompose: v is not p-codiagonal (defect " + fmt(diag) + ")");

  GrassmannTangent out;
  out.x = bc.reduce(v);
  const ComplexMatrix lx = bc.left_rep(out.x);
  out.ambient = lx * p + p * lx.adjoint();
  const double miss = linalg::op_norm(out.ambient - v);
  if (miss > 1e-9) throw ConsistencyError("tangent_decompose: xp + px* differs from v by " + fmt(miss));
  out.orbit_part = linalg::antihermitian_part(out.x);
  out.normal_part = linalg::hermitian_part(out.x);
  return out;
}

ComplexMatrix grassmann_exp_block(const BasicConstruction& bc, const ComplexMatrix& x, double t) {
  const Inclusion& inc = bc.inclusion();
  const double ex = inc.m_algebra.two_norm(expectation_E(inc, x));
  if (ex > 1e-10) throw DomainError("grassmann_exp_block: E(x) != 0 (defect " + fmt(ex) + ")");
  const double nx = linalg::op_norm(x);
  if (!(nx < std::numbers::pi)) throw RadiusError("grassmann_exp_block: ||x|| = " + fmt(nx) + " is not < pi");

  const ComplexMatrix y = t * x;
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix ly = bc.left_rep(y);
  const ComplexMatrix e = linalg::hermitian_part(expectation_E(inc, y.adjoint() * y));
  const ComplexMatrix root = linalg::spectral_function(e, linalg::ScalarFunction::sqrt);
  const ComplexMatrix c = linalg::spectral_function(root, linalg::ScalarFunction::cos);
  const ComplexMatrix sc = linalg::spectral_function(ComplexMatrix(2.0 * root), linalg::ScalarFunction::sinc);

  const ComplexMatrix lsc = bc.left_rep(sc);
  const ComplexMatrix top_left = bc.left_rep(c * c) * p;
  const ComplexMatrix top_right = lsc * p * ly.adjoint();
  const ComplexMatrix bottom_left = ly * p * lsc;
  const ComplexMatrix sn = linalg::spectral_function(
      linalg::spectral_function(linalg::hermitian_part(ComplexMatrix(ly * p * ly.adjoint())),
                                linalg::ScalarFunction::sqrt),
      linalg::ScalarFunction::sin);
  return linalg::hermitian_part(ComplexMatrix(top_left + top_right + bottom_left + sn * sn));
}

ComplexMatrix grassmann_exp_dense(const BasicConstruction& bc, const ComplexMatrix& x, double t) {
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix lx = bc.left_rep(x);
  const ComplexMatrix gen = linalg::antihermitian_part(ComplexMatrix(t * (lx * p - p * lx.adjoint())));
  const ComplexMatrix w = linalg::expm_antihermitian(gen);
  return linalg::hermitian_part(ComplexMatrix(w * p * w.adjoint()));
}

ComplexMatrix orbit_curve_point(const BasicConstruction& bc, const ComplexMatrix& x, double t) {
  const ComplexMatrix w = bc.left_rep(linalg::expm_antihermitian(linalg::antihermitian_part(ComplexMatrix(t * x))));
  return linalg::hermitian_part(ComplexMatrix(w * bc.jones_p() * w.adjoint()));
}

double effectiveness_commutator(const BasicConstruction& bc, const ComplexMatrix& x) {
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix lx = bc.left_rep(x);
  const ComplexMatrix w = linalg::expm_antihermitian(linalg::antihermitian_part(ComplexMatrix(lx * p - p * lx.adjoint())));
  return bc.two_norm1(w * p - p * w);
}

DegeneracyResult degeneracy_test(const Inclusion& inc, const ComplexMatrix& x) {
  const TracialAlgebra& m = inc.m_algebra;
  const ComplexMatrix sq = x * x;
  const double a = m.two_norm(x + x.adjoint());
  const double b = m.two_norm(sq - expectation_E(inc, sq));
  DegeneracyResult r;
  r.defect = std::max(a, b);
  r.degenerate = a <= 1e-10 && b <= 1e-10;
  r.zero_speed = r.degenerate && m.two_norm(x - expectation_E(inc, x)) <= 1e-10;
  return r;
}

ComplexMatrix degenerate_geodesic_closed_form(const BasicConstruction& bc, const ComplexMatrix& x, double t) {
  const DegeneracyResult d = degeneracy_test(bc.inclusion(), x);
  if (!d.degenerate) {
    throw DomainError("degenerate_geodesic_closed_form: x fails the degeneracy test (defect " + fmt(d.defect) + ")");
  }
  const linalg::PolarParts pp = linalg::polar_antihermitian(linalg::antihermitian_part(x));
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix ta = t * pp.absx;
  const ComplexMatrix c = linalg::spectral_function(ta, linalg::ScalarFunction::cos);
  const ComplexMatrix s = linalg::spectral_function(ta, linalg::ScalarFunction::sin);
  const ComplexMatrix lu = bc.left_rep(pp.u);
  const ComplexMatrix g = p * bc.left_rep(c * c) + lu * p * lu.adjoint() * bc.left_rep(s * s) +
                          (lu * p - p * lu) * bc.left_rep(s * c);
  return linalg::hermitian_part(g);
}

double orbit_grassmann_divergence(const BasicConstruction& bc, const ComplexMatrix& x, int grid_n) {
  const ComplexMatrix xp = x - expectation_E(bc.inclusion(), x);
  double worst = 0.0;
  for (int k = 0; k <= grid_n; ++k) {
    const double t = static_cast<double>(k) / grid_n;
    worst = std::max(worst, linalg::op_norm(grassmann_exp_dense(bc, xp, t) - orbit_curve_point(bc, x, t)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> n_perp_basis(const Inclusion& inc) {
  const TracialAlgebra& m = inc.m_algebra;
  std::vector<ComplexMatrix> out;
  for (const ComplexMatrix& b : m.basis()) {
    ComplexMatrix c = b - expectation_E(inc, b);
    for (const ComplexMatrix& e : out) c -= m.inner(c, e) * e;
    for (const ComplexMatrix& e : out) c -= m.inner(c, e) * e;
    const double nc = m.two_norm(c);
    if (nc > 1e-9) out.push_back(c / nc);
  }
  return out;
}

TotallyGeodesicReport totally_geodesic_audit(const Inclusion& inc) {
  const TracialAlgebra& m = inc.m_algebra;
  TotallyGeodesicReport rep;
  rep.family = inc.family.label;
  const std::vector<ComplexMatrix> basis = n_perp_basis(inc);
  rep.basis_size = static_cast<int>(basis.size());

  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const ComplexMatrix ab = basis[i] * basis[j];
      const ComplexMatrix s = ab + basis[j] * basis[i];
      const double d = m.two_norm(s - expectation_E(inc, s));
      rep.max_product_defect = std::max(rep.max_product_defect, m.two_norm(ab - expectation_E(inc, ab)));
      if (d > rep.max_defect) {
        rep.max_defect = d;
        if (d > rep.tolerance) rep.witness = std::make_pair(basis[i], basis[j]);
      }
    }
  }
  rep.holds = rep.max_defect <= rep.tolerance;
  if (rep.holds) rep.witness.reset();

  std::vector<ComplexMatrix> ah;
  for (const ComplexMatrix& b : basis) {
    for (const Complex c : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
      const ComplexMatrix z = linalg::antihermitian_part(ComplexMatrix(c * b));
      if (m.two_norm(z) > 1e-9) ah.push_back(z);
    }
  }
  bool all_degenerate = true;
  for (std::size_t i = 0; i < ah.size() && all_degenerate; ++i) {
    for (std::size_t j = i; j < ah.size() && all_degenerate; ++j) {
      const ComplexMatrix z = i == j ? ah[i] : ComplexMatrix(ah[i] + ah[j]);
      all_degenerate = degeneracy_test(inc, z).degenerate;
    }
  }
  rep.degeneracy_agrees = all_degenerate == rep.holds;
  return rep;
}

std::optional<ComplexMatrix> random_degenerate_direction(const Inclusion& inc, bool holds, Rng& rng) {
  ComplexMatrix x;
  if (holds) {
    x = random_horizontal(inc, rng);
  } else if (inc.family.kind == FamilyTag::Kind::tensor && inc.family.k % 2 == 0) {
    const int m = inc.family.m;
    const int k = inc.family.k;
    const ComplexMatrix g = rng.gaussian(m, m);
    const ComplexMatrix h = linalg::hermitian_part(g);
    Eigen::VectorXcd signs(k);
    for (int i = 0; i < k; ++i) signs(i) = i < k / 2 ? 1.0 : -1.0;
    const ComplexMatrix u = random_unitary(k, rng);
    const ComplexMatrix s = Complex(0.0, 1.0) * (u * signs.asDiagonal() * u.adjoint());
    x = linalg::antihermitian_part(linalg::kron(h, s));
  } else {
    return std::nullopt;
  }
  const double n = linalg::op_norm(x);
  if (n < 1e-12) return std::nullopt;
  return ComplexMatrix(x * (rng.uniform(0.2, 1.5) / n));
}

// ---------------------------------------------------------------------------

TangentMembershipReport tangent_membership_check(const BasicConstruction& bc, double tol) {
  const ComplexMatrix& p = bc.jones_p();
  const ComplexMatrix q = bc.identity1() - p;
  const Eigen::Index d = bc.dim();
  const Eigen::Index len = 2 * d * d;

  // Real span of the Hermitian part of M1.
  const std::vector<ComplexMatrix> m1_basis = bc.m1().basis();
  Eigen::MatrixXd herm(len, 2 * static_cast<Eigen::Index>(m1_basis.size()));
  for (std::size_t i = 0; i < m1_basis.size(); ++i) {
    herm.col(2 * i) = realify(linalg::hermitian_part(m1_basis[i]));
    herm.col(2 * i + 1) = realify(linalg::hermitian_part(ComplexMatrix(Complex(0.0, 1.0) * m1_basis[i])));
  }
  const Eigen::MatrixXd h = orth(herm, 1e-10);

  // Codiagonal and E1-free constraints on that span.
  Eigen::MatrixXd constraints(3 * len, h.cols());
  for (Eigen::Index j = 0; j < h.cols(); ++j) {
    ComplexMatrix y(d, d);
    for (Eigen::Index i = 0; i < d * d; ++i) y.data()[i] = Complex(h(2 * i, j), h(2 * i + 1, j));
    constraints.col(j) << realify(p * y * p), realify(q * y * q), realify(bc.e1(y));
  }
  const Eigen::MatrixXd kernel = orth(h * null_space(constraints, 1e-10), 1e-10);

  const std::vector<ComplexMatrix> m_basis = bc.inclusion().m_algebra.basis();
  Eigen::MatrixXd orbit(len, 2 * static_cast<Eigen::Index>(m_basis.size()));
  for (std::size_t i = 0; i < m_basis.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      const Complex c = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
      const ComplexMatrix lz = bc.left_rep(linalg::antihermitian_part(ComplexMatrix(c * m_basis[i])));
      orbit.col(2 * i + part) = realify(lz * p - p * lz);
    }
  }
  const Eigen::MatrixXd tangent = orth(orbit, 1e-10);

  TangentMembershipReport rep;
  rep.kernel_dimension = static_cast<int>(kernel.cols());
  rep.orbit_dimension = static_cast<int>(tangent.cols());
  rep.span_defect = std::max(subspace_excess(kernel, tangent), subspace_excess(tangent, kernel));
  rep.agrees = rep.kernel_dimension == rep.orbit_dimension && rep.span_defect <= tol;
  return rep;
}

}  // namespace subgeo
