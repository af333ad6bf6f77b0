#include "subgeo/basic_construction.hpp"

#include "subgeo/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subgeo {

namespace {

constexpr double kPropertyTol = 1e-10;
constexpr double kMembershipTol = 1e-8;
constexpr std::uint64_t kBuildSeed = 0x5eedba5e;

const char* const kAnchors[8] = {
    "M₁ = ⟨M, p⟩",
    "p x p = E(x)p",
    "{p}′ ∩ M = N",
    "N → Np",
    "M₁p = Mp",
    "‖a‖ ≥ ‖ap‖ ≥ √λ‖a‖",
    "E₁(p) = λ",
    "E(x*x) ≥ λ x*x",
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

// Right singular vectors of k with singular value below tol * max(1, σ_max).
ComplexMatrix null_space(const ComplexMatrix& k, double tol, Eigen::VectorXd* small_values = nullptr) {
  Eigen::BDCSVD<ComplexMatrix> svd(k, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  const Eigen::Index nullity = k.cols() - rank;
  if (small_values) {
    small_values->setZero(nullity);
    for (Eigen::Index i = rank; i < s.size(); ++i) (*small_values)(i - rank) = s(i);
  }
  return svd.matrixV().rightCols(nullity);
}

ConstructionReport run_checks(const BasicConstruction& bc, int n_samples, std::uint64_t seed, bool full);

}  // namespace

// ---------------------------------------------------------------------------

double BasicConstruction::two_norm1(const ComplexMatrix& y) const {
  return y.norm() / std::sqrt(static_cast<double>(dim()));
}

ComplexMatrix BasicConstruction::left_rep(const ComplexMatrix& x) const {
  const Eigen::Index d = dim();
  const ComplexVector v = lv_ * l2_frame_.coordinates(x);
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix BasicConstruction::e1_pullback(const ComplexMatrix& y) const {
  const Eigen::Map<const ComplexVector> vy(y.data(), y.size());
  const ComplexVector c = lv_.adjoint() * vy / static_cast<double>(dim());
  return l2_frame_.from_coordinates(c);
}

ComplexMatrix BasicConstruction::reduce(const ComplexMatrix& y) const {
  return e1_pullback(y * p_) / lambda();
}

BasicConstruction BasicConstruction::build(const Inclusion& inc) {
  const PimsnerPopaReport pp = pimsner_popa_validate(inc, 16, inc.lambda, kBuildSeed);
  if (!pp.feasible) {
    throw ConstructionError(8, "property 8 (E(x*x) >= lambda x*x) fails at lambda = " +
                                   std::to_string(inc.lambda) + ": worst margin " + fmt(pp.worst_margin));
  }

  BasicConstruction bc;
  bc.inc_ = inc;
  const TracialAlgebra& m = inc.m_algebra;

  std::vector<ComplexMatrix> span = inc.n_image.basis();
  for (const auto& b : m.basis()) span.push_back(b);
  bc.l2_frame_ = TracialAlgebra::from_spanning_set(m.weights(), span);
  if (bc.l2_frame_.dim() != m.dim()) {
    throw ConstructionError(0, "L2 basis has dimension " + std::to_string(bc.l2_frame_.dim()) +
                                   ", expected dim M = " + std::to_string(m.dim()));
  }
  bc.l2_ = bc.l2_frame_.basis();
  const Eigen::Index d = bc.dim();
  const Eigen::Index dn = inc.n_image.dim();

  bc.lv_.resize(d * d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    ComplexMatrix lj(d, d);
    for (Eigen::Index k = 0; k < d; ++k) lj.col(k) = bc.l2_frame_.coordinates(bc.l2_[j] * bc.l2_[k]);
    bc.lv_.col(j) = Eigen::Map<const ComplexVector>(lj.data(), d * d);
  }

  // Unital *-representation.
  double rep = linalg::op_norm(bc.left_rep(m.identity()) - bc.identity1());
  for (Eigen::Index i = 0; i < d; ++i) {
    const ComplexMatrix li = bc.left_rep(bc.l2_[i]);
    rep = std::max(rep, linalg::op_norm(bc.left_rep(bc.l2_[i].adjoint()) - li.adjoint()));
    for (Eigen::Index j = 0; j < d; ++j) {
      rep = std::max(rep, linalg::op_norm(bc.left_rep(bc.l2_[i] * bc.l2_[j]) - li * bc.left_rep(bc.l2_[j])));
    }
  }
  if (rep > kPropertyTol) {
    throw ConstructionError(0, "left representation is not a unital *-homomorphism (defect " + fmt(rep) + ")");
  }

  bc.p_ = ComplexMatrix::Zero(d, d);
  bc.p_.topLeftCorner(dn, dn).setIdentity();

  std::vector<ComplexMatrix> m1_span;
  std::vector<ComplexMatrix> lvs;
  for (Eigen::Index j = 0; j < d; ++j) lvs.push_back(bc.left_rep(bc.l2_[j]));
  for (const auto& l : lvs) m1_span.push_back(l);
  for (const auto& a : lvs)
    for (const auto& b : lvs) m1_span.push_back(a * bc.p_ * b);
  bc.m1_ = TracialAlgebra::from_spanning_set(Eigen::VectorXd::Constant(d, 1.0 / d), m1_span, 1e-9);

  double markov = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    markov = std::max(markov, std::abs(bc.tau1(lvs[j]) - m.trace(bc.l2_[j])));
  }
  if (markov > kPropertyTol) {
    throw ConstructionError(0, "Markov incompatibility: tau1(left_rep(x)) differs from tau(x) by " + fmt(markov));
  }

  // Cheap structural properties are enforced at build time.
  const ConstructionReport r = run_checks(bc, 4, kBuildSeed, false);
  for (int idx : {2, 4, 5, 6}) {
    const PropertyCheck& c = r.properties[idx - 1];
    if (!c.passed) {
      throw ConstructionError(idx, "property " + std::to_string(idx) + " (" + c.anchor + ") fails: worst defect " +
                                       fmt(c.worst_defect));
    }
  }
  return bc;
}

BasicConstruction build_basic_construction(const Inclusion& inc) { return BasicConstruction::build(inc); }

ComplexMatrix expectation_E1(const BasicConstruction& bc, const ComplexMatrix& y) {
  const double defect = bc.m1_membership_defect(y);
  if (defect > kMembershipTol) throw MembershipError("expectation_E1: element is not in M1 (defect " + fmt(defect) + ")");
  return bc.e1(y);
}

ComplexMatrix reduce_R(const BasicConstruction& bc, const ComplexMatrix& y) {
  const double defect = bc.m1_membership_defect(y);
  if (defect > kMembershipTol) throw MembershipError("reduce_R: element is not in M1 (defect " + fmt(defect) + ")");
  const ComplexMatrix m = bc.reduce(y);
  const double scale = std::max(1.0, linalg::op_norm(y));
  const double residual = linalg::op_norm(bc.left_rep(m) * bc.jones_p() - y * bc.jones_p());
  if (residual > 1e-10 * scale) {
    throw ConsistencyError("reduce_R: pullback does not satisfy mp = yp (residual " + fmt(residual) + ")");
  }
  return m;
}

ComplexMatrix recover_unitary(const BasicConstruction& bc, const ComplexMatrix& omega) {
  const double defect = bc.m1_membership_defect(omega);
  if (defect > kMembershipTol) throw MembershipError("recover_unitary: omega is not in M1 (defect " + fmt(defect) + ")");
  const ComplexMatrix wp = omega * bc.jones_p();
  const ComplexMatrix u = bc.e1_pullback(wp) / bc.lambda();
  const double udef = linalg::unitary_defect(u);
  if (udef > 1e-8) {
    throw DomainError("recover_unitary: omega does not preserve the orbit of p (u*u - 1 = " + fmt(udef) + ")");
  }
  const double residual = linalg::op_norm(bc.left_rep(u) * bc.jones_p() - wp);
  if (residual > 1e-8) throw ConsistencyError("recover_unitary: up differs from omega p by " + fmt(residual));
  return u;
}

// ---------------------------------------------------------------------------

int center_dimension(const TracialAlgebra& alg) {
  const auto b = alg.basis();
  const Eigen::Index n = alg.ambient_dim();
  const Eigen::Index dim = alg.dim();
  ComplexMatrix k(dim * n * n, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const ComplexMatrix c = b[i] * b[j] - b[j] * b[i];
      k.col(i).segment(j * n * n, n * n) = Eigen::Map<const ComplexVector>(c.data(), n * n);
    }
  }
  return static_cast<int>(null_space(k, 1e-8).cols());
}

bool ConstructionReport::all_passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyCheck& c) { return c.passed; });
}

namespace {

// full = false skips the trace/center scan of M1 and the Pimsner–Popa sampling.
ConstructionReport run_checks(const BasicConstruction& bc, int n_samples, std::uint64_t seed, bool full) {
  const Inclusion& inc = bc.inclusion();
  const TracialAlgebra& m = inc.m_algebra;
  const ComplexMatrix& p = bc.jones_p();
  const double lambda = bc.lambda();
  const auto& v = bc.l2_basis();
  const Eigen::Index d = bc.dim();

  ConstructionReport r;
  for (int i = 0; i < 8; ++i) {
    r.properties[i].index = i + 1;
    r.properties[i].anchor = kAnchors[i];
  }
  r.m1_dimension = static_cast<int>(bc.m1().dim());
  r.n_dimension = static_cast<int>(inc.n_image.dim());

  std::vector<ComplexMatrix> lv;
  for (const auto& x : v) lv.push_back(bc.left_rep(x));
  const auto m1b = bc.m1().basis();

  // 1: τ1 is a trace on M1 extending τ; factor when predicted.
  {
    auto& c = r.properties[0];
    double markov = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) markov = std::max(markov, std::abs(bc.tau1(lv[j]) - m.trace(v[j])));
    r.markov_defect = markov;
    const bool skip_heavy = !full;
    const double trace_def = skip_heavy ? 0.0 : bc.m1().trace_defect();
    r.center_dimension = skip_heavy ? 0 : center_dimension(bc.m1());
    c.worst_defect = std::max(markov, trace_def);
    c.samples = static_cast<int>(m1b.size() * (m1b.size() - 1) / 2 + d);
    const bool factor_ok = skip_heavy || !inc.predicts_factor_m1() || r.center_dimension == 1;
    c.passed = c.worst_defect <= kPropertyTol && factor_ok;
  }

  // 2: p x p = E(x) p.
  {
    auto& c = r.properties[1];
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix lhs = p * lv[j] * p;
      const ComplexMatrix rhs = bc.left_rep(expectation_E(inc, v[j])) * p;
      c.worst_defect = std::max(c.worst_defect, linalg::op_norm(lhs - rhs));
    }
    c.samples = static_cast<int>(d);
    c.passed = c.worst_defect <= kPropertyTol;
  }

  // 3: {p}' ∩ M = N, as a null space over M's basis.
  {
    auto& c = r.properties[2];
    ComplexMatrix k(d * d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const ComplexMatrix comm = lv[j] * p - p * lv[j];
      k.col(j) = Eigen::Map<const ComplexVector>(comm.data(), d * d);
    }
    Eigen::VectorXd small;
    const ComplexMatrix ns = null_space(k, 1e-8, &small);
    r.commutant_dimension = static_cast<int>(ns.cols());
    double defect = small.size() ? small.maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < ns.cols(); ++i) {
      ComplexMatrix x = ComplexMatrix::Zero(m.ambient_dim(), m.ambient_dim());
      for (Eigen::Index j = 0; j < d; ++j) x += ns(j, i) * v[j];
      defect = std::max(defect, m.two_norm(x - expectation_E(inc, x)));
    }
    for (const auto& b : inc.n_image.basis()) {
      const ComplexMatrix lb = bc.left_rep(b);
      defect = std::max(defect, linalg::op_norm(lb * p - p * lb));
    }
    c.worst_defect = defect;
    c.samples = static_cast<int>(d);
    c.passed = defect <= kPropertyTol && r.commutant_dimension == r.n_dimension;
  }

  // 4: N ∋ x ↦ xp is a *-isomorphism onto pM1p.
  {
    auto& c = r.properties[3];
    const auto nb = inc.n_image.basis();
    double defect = 0.0;
    for (const auto& a : nb) {
      const ComplexMatrix ap = bc.left_rep(a) * p;
      defect = std::max(defect, linalg::op_norm(ComplexMatrix(ap.adjoint()) - bc.left_rep(a.adjoint()) * p));
      for (const auto& b : nb) defect = std::max(defect, linalg::op_norm(ap * bc.left_rep(b) * p - bc.left_rep(a * b) * p));
    }
    for (const auto& y : m1b) {
      const ComplexMatrix pyp = p * y * p;
      const ComplexMatrix n = bc.e1_pullback(pyp) / lambda;
      defect = std::max(defect, linalg::op_norm(bc.left_rep(n) * p - pyp));
      defect = std::max(defect, m.two_norm(n - expectation_E(inc, n)));
    }
    // Injectivity: the images of N's basis stay independent.
    ComplexMatrix images(d * d, static_cast<Eigen::Index>(nb.size()));
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const ComplexMatrix ap = bc.left_rep(nb[i]) * p;
      images.col(i) = Eigen::Map<const ComplexVector>(ap.data(), d * d);
    }
    const bool injective = null_space(images, 1e-8).cols() == 0;
    c.worst_defect = defect;
    c.samples = static_cast<int>(nb.size() * nb.size() + m1b.size());
    c.passed = defect <= kPropertyTol && injective;
  }

  // 5: M1 p = M p.
  {
    auto& c = r.properties[4];
    for (const auto& y : m1b) {
      const ComplexMatrix mm = bc.reduce(y);
      c.worst_defect = std::max(c.worst_defect, linalg::op_norm(bc.left_rep(mm) * p - y * p));
    }
    c.samples = static_cast<int>(m1b.size());
    c.passed = c.worst_defect <= kPropertyTol;
  }

  // 6: ‖a‖ ≥ ‖ap‖ ≥ √λ‖a‖.
  {
    auto& c = r.properties[5];
    const double sl = std::sqrt(lambda);
    auto check = [&](const ComplexMatrix& a) {
      const double na = linalg::op_norm(a);
      const double nap = linalg::op_norm(bc.left_rep(a) * p);
      c.worst_defect = std::max({c.worst_defect, nap - na, sl * na - nap});
      ++c.samples;
    };
    for (const auto& x : v) check(x);
    Rng rng(seed);
    for (int s = 0; s < n_samples; ++s) {
      ComplexMatrix a = m.random_element(rng);
      check(a / linalg::op_norm(a));
    }
    c.passed = c.worst_defect <= kPropertyTol;
  }

  // 7: E1(p) = λ.
  {
    auto& c = r.properties[6];
    c.worst_defect = linalg::op_norm(bc.e1(p) - lambda * bc.identity1());
    c.worst_defect = std::max(c.worst_defect, bc.m1_membership_defect(p));
    c.samples = 1;
    c.passed = c.worst_defect <= kPropertyTol;
  }

  // 8: E(x*x) ≥ λ x*x, with the sharpness probe at λ + 1e-3.
  {
    auto& c = r.properties[7];
    if (full) {
      const PimsnerPopaReport pp = pimsner_popa_validate(inc, n_samples, lambda, seed);
      c.worst_defect = std::max(0.0, -pp.worst_margin);
      c.samples = pp.samples;
      c.passed = pp.feasible;
      const PimsnerPopaReport sharp = pimsner_popa_validate(inc, n_samples, lambda + 1e-3, seed);
      r.sharpness_margin = sharp.worst_margin;
      r.lambda_sharp = !sharp.feasible;
    } else {
      c.passed = true;
    }
  }
  return r;
}

}  // namespace

ConstructionReport verify_construction_properties(const BasicConstruction& bc, int n_samples,
                                                  std::uint64_t seed) {
  return run_checks(bc, std::max(n_samples, 1), seed, true);
}

}  // namespace subgeo
