#include "subgeo/tracial.hpp"

#include "subgeo/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subgeo {

namespace {

constexpr double kClosureTol = 1e-10;

std::vector<Eigen::Index> block_offsets(const AlgebraDescriptor& desc) {
  std::vector<Eigen::Index> off(desc.block_dims.size() + 1, 0);
  for (std::size_t i = 0; i < desc.block_dims.size(); ++i) off[i + 1] = off[i] + desc.block_dims[i];
  return off;
}

std::string describe_descriptor(const AlgebraDescriptor& d) {
  std::ostringstream s;
  for (std::size_t i = 0; i < d.block_dims.size(); ++i) s << (i ? "+" : "") << "M" << d.block_dims[i];
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// AlgebraDescriptor

Eigen::Index AlgebraDescriptor::ambient_dim() const {
  Eigen::Index n = 0;
  for (int d : block_dims) n += d;
  return n;
}

void AlgebraDescriptor::validate() const {
  if (block_dims.empty()) throw DomainError("algebra descriptor: no blocks");
  if (block_dims.size() != trace_weights.size()) {
    throw DomainError("algebra descriptor: block_dims and trace_weights differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < block_dims.size(); ++i) {
    if (block_dims[i] < 1) throw DomainError("algebra descriptor: block dimension < 1");
    if (!(trace_weights[i] > 0.0)) throw DomainError("algebra descriptor: non-positive trace weight");
    total += trace_weights[i] * block_dims[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("algebra descriptor: trace weights give tau(1) = " + std::to_string(total));
  }
}

// ---------------------------------------------------------------------------
// TracialAlgebra

ComplexVector TracialAlgebra::weighted_vec(const ComplexMatrix& x) const {
  const ComplexMatrix y = x * sqrt_weights_.cast<Complex>().asDiagonal();
  return Eigen::Map<const ComplexVector>(y.data(), y.size());
}

ComplexMatrix TracialAlgebra::unweighted_mat(const ComplexVector& v) const {
  const Eigen::Index n = ambient_dim();
  const Eigen::Map<const ComplexMatrix> y(v.data(), n, n);
  return y * sqrt_weights_.cwiseInverse().cast<Complex>().asDiagonal();
}

TracialAlgebra TracialAlgebra::from_spanning_set(const Eigen::VectorXd& weights,
                                                 const std::vector<ComplexMatrix>& span,
                                                 double drop_tol) {
  if (weights.size() == 0 || (weights.array() <= 0.0).any()) {
    throw DomainError("tracial algebra: weights must be positive");
  }
  TracialAlgebra alg;
  alg.weights_ = weights;
  alg.sqrt_weights_ = weights.cwiseSqrt();
  const Eigen::Index n = weights.size();

  ComplexMatrix frame(n * n, std::min<Eigen::Index>(n * n, static_cast<Eigen::Index>(span.size())));
  Eigen::Index count = 0;
  for (const ComplexMatrix& c : span) {
    if (c.rows() != n || c.cols() != n) throw DomainError("tracial algebra: spanning element has wrong shape");
    if (count == frame.cols()) break;
    ComplexVector v = alg.weighted_vec(c);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    v /= norm0;
    for (int pass = 0; pass < 2 && count > 0; ++pass) {
      v -= frame.leftCols(count) * (frame.leftCols(count).adjoint() * v);
    }
    const double r = v.norm();
    if (r < drop_tol) continue;
    frame.col(count++) = v / r;
  }
  alg.frame_ = frame.leftCols(count);
  return alg;
}

TracialAlgebra TracialAlgebra::from_descriptor(const AlgebraDescriptor& desc) {
  desc.validate();
  const Eigen::Index n = desc.ambient_dim();
  Eigen::VectorXd w(n);
  std::vector<ComplexMatrix> units;
  const auto off = block_offsets(desc);
  for (std::size_t b = 0; b < desc.block_dims.size(); ++b) {
    w.segment(off[b], desc.block_dims[b]).setConstant(desc.trace_weights[b]);
    for (int i = 0; i < desc.block_dims[b]; ++i) {
      for (int j = 0; j < desc.block_dims[b]; ++j) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(off[b] + i, off[b] + j) = 1.0 / std::sqrt(desc.trace_weights[b]);
        units.push_back(std::move(e));
      }
    }
  }
  return from_spanning_set(w, units);
}

Complex TracialAlgebra::trace(const ComplexMatrix& x) const {
  return (x.diagonal().array() * weights_.cast<Complex>().array()).sum();
}

Complex TracialAlgebra::inner(const ComplexMatrix& a, const ComplexMatrix& b) const {
  return weighted_vec(b).dot(weighted_vec(a));
}

double TracialAlgebra::two_norm(const ComplexMatrix& x) const { return weighted_vec(x).norm(); }

ComplexMatrix TracialAlgebra::basis(Eigen::Index i) const {
  return unweighted_mat(frame_.col(i));
}

std::vector<ComplexMatrix> TracialAlgebra::basis() const {
  std::vector<ComplexMatrix> out;
  out.reserve(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) out.push_back(basis(i));
  return out;
}

ComplexVector TracialAlgebra::coordinates(const ComplexMatrix& x) const {
  return frame_.adjoint() * weighted_vec(x);
}

ComplexMatrix TracialAlgebra::from_coordinates(const ComplexVector& c) const {
  return unweighted_mat(frame_ * c);
}

ComplexMatrix TracialAlgebra::project(const ComplexMatrix& x) const {
  return from_coordinates(coordinates(x));
}

double TracialAlgebra::membership_defect(const ComplexMatrix& x) const {
  const ComplexVector v = weighted_vec(x);
  return (v - frame_ * (frame_.adjoint() * v)).norm();
}

ComplexMatrix TracialAlgebra::identity() const {
  return ComplexMatrix::Identity(ambient_dim(), ambient_dim());
}

ComplexMatrix TracialAlgebra::random_element(Rng& rng) const {
  ComplexVector c(dim());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.complex_normal();
  return from_coordinates(c);
}

ComplexMatrix TracialAlgebra::random_antihermitian(Rng& rng) const {
  return linalg::antihermitian_part(random_element(rng));
}

ComplexMatrix TracialAlgebra::random_hermitian(Rng& rng) const {
  return linalg::hermitian_part(random_element(rng));
}

double TracialAlgebra::trace_defect() const {
  const auto b = basis();
  const Eigen::VectorXcd w = weights_.cast<Complex>();
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      // τ(ab) = Σ_jk w_j a_jk b_kj without forming the product.
      const Complex ab = (b[i].cwiseProduct(b[j].transpose()).rowwise().sum().array() * w.array()).sum();
      const Complex ba = (b[j].cwiseProduct(b[i].transpose()).rowwise().sum().array() * w.array()).sum();
      worst = std::max(worst, std::abs(ab - ba));
    }
  }
  return worst;
}

double TracialAlgebra::closure_defect() const {
  const auto b = basis();
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    worst = std::max(worst, membership_defect(b[i].adjoint()));
    for (std::size_t j = 0; j < b.size(); ++j) worst = std::max(worst, membership_defect(b[i] * b[j]));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Theta

ComplexMatrix Theta::apply(const AlgebraDescriptor& n_desc, const ComplexMatrix& a) const {
  switch (kind) {
    case Kind::identity:
      return a;
    case Kind::conjugation: {
      const Eigen::Map<const ComplexVector> w(signs.data(), static_cast<Eigen::Index>(signs.size()));
      return w.asDiagonal() * a * w.conjugate().asDiagonal();
    }
    case Kind::block_swap: {
      const auto off = block_offsets(n_desc);
      const Eigen::Index d = n_desc.block_dims[0];
      ComplexMatrix out = ComplexMatrix::Zero(a.rows(), a.cols());
      out.block(off[0], off[0], d, d) = a.block(off[1], off[1], d, d);
      out.block(off[1], off[1], d, d) = a.block(off[0], off[0], d, d);
      return out;
    }
  }
  return a;
}

std::string Theta::describe() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::block_swap: return "block_swap";
    case Kind::conjugation: {
      std::ostringstream s;
      s << "conjugation(";
      for (std::size_t i = 0; i < signs.size(); ++i) {
        if (i) s << ",";
        if (signs[i].imag() == 0.0) s << signs[i].real();
        else s << signs[i].real() << (signs[i].imag() < 0 ? "" : "+") << signs[i].imag() << "i";
      }
      s << ")";
      return s.str();
    }
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Inclusions

namespace {

void validate_inclusion(const Inclusion& inc) {
  const TracialAlgebra& n = inc.n_algebra;
  const TracialAlgebra& m = inc.m_algebra;
  if (!(inc.lambda > 0.0 && inc.lambda <= 1.0 + 1e-15)) {
    throw DomainError("inclusion: lambda must lie in (0, 1]");
  }
  const double unit = linalg::op_norm(inc.embed(n.identity()) - m.identity());
  if (unit > kClosureTol) throw DomainError("inclusion: embedding is not unital");

  const auto nb = n.basis();
  double hom = 0.0, tr = 0.0, mem = 0.0;
  for (const auto& a : nb) {
    const ComplexMatrix ia = inc.embed(a);
    mem = std::max(mem, m.membership_defect(ia));
    hom = std::max(hom, linalg::op_norm(inc.embed(ComplexMatrix(a.adjoint())) - ia.adjoint()));
    tr = std::max(tr, std::abs(m.trace(ia) - n.trace(a)));
    for (const auto& b : nb) hom = std::max(hom, linalg::op_norm(inc.embed(a * b) - ia * inc.embed(b)));
  }
  if (mem > kClosureTol) throw DomainError("inclusion: image of N is not contained in M");
  if (hom > kClosureTol) throw DomainError("inclusion: embedding is not a *-homomorphism");
  if (tr > kClosureTol) throw DomainError("inclusion: tau_M does not restrict to tau_N");
  if (inc.n_image.dim() != n.dim()) throw DomainError("inclusion: embedding is not injective");
}

TracialAlgebra image_of(const Inclusion& inc) {
  std::vector<ComplexMatrix> span;
  // Identity first so the image basis starts at 1.
  span.push_back(inc.m_algebra.identity());
  for (const auto& b : inc.n_algebra.basis()) span.push_back(inc.embed(b));
  return TracialAlgebra::from_spanning_set(inc.m_algebra.weights(), span);
}

}  // namespace

Inclusion make_tensor_inclusion(int m, int k) {
  if (m < 1 || k < 1) throw DomainError("tensor inclusion: m and k must be >= 1");
  Inclusion inc;
  inc.sub = {{m}, {1.0 / m}};
  inc.n_algebra = TracialAlgebra::from_descriptor(inc.sub);
  inc.m_algebra = TracialAlgebra::from_descriptor({{m * k}, {1.0 / (m * k)}});
  const ComplexMatrix ik = ComplexMatrix::Identity(k, k);
  inc.embed = [ik](const ComplexMatrix& a) { return linalg::kron(a, ik); };
  inc.lambda = 1.0 / (static_cast<double>(k) * k);
  inc.family = {FamilyTag::Kind::tensor, m, k, "tensor(" + std::to_string(m) + "," + std::to_string(k) + ")"};
  inc.n_image = image_of(inc);
  validate_inclusion(inc);
  return inc;
}

Inclusion make_group_flip_inclusion(const AlgebraDescriptor& n_desc, const Theta& theta) {
  n_desc.validate();
  const Eigen::Index n = n_desc.ambient_dim();
  if (theta.kind == Theta::Kind::conjugation) {
    if (static_cast<Eigen::Index>(theta.signs.size()) != n) {
      throw DomainError("group flip: conjugation needs one sign per ambient row of N");
    }
    for (const Complex& s : theta.signs) {
      if (std::abs(std::abs(s) - 1.0) > 1e-12) throw DomainError("group flip: conjugation entries must be unimodular");
    }
  }
  if (theta.kind == Theta::Kind::block_swap) {
    if (n_desc.block_dims.size() != 2 || n_desc.block_dims[0] != n_desc.block_dims[1] ||
        std::abs(n_desc.trace_weights[0] - n_desc.trace_weights[1]) > 1e-15) {
      throw DomainError("group flip: block_swap needs two blocks of equal size and weight");
    }
  }

  const TracialAlgebra nalg = TracialAlgebra::from_descriptor(n_desc);
  const auto nb = nalg.basis();
  double order2 = 0.0, into = 0.0, hom = 0.0, tr = 0.0;
  for (const auto& a : nb) {
    const ComplexMatrix ta = theta.apply(n_desc, a);
    into = std::max(into, nalg.membership_defect(ta));
    order2 = std::max(order2, linalg::op_norm(theta.apply(n_desc, ta) - a));
    tr = std::max(tr, std::abs(nalg.trace(ta) - nalg.trace(a)));
    for (const auto& b : nb) {
      hom = std::max(hom, linalg::op_norm(theta.apply(n_desc, a * b) - ta * theta.apply(n_desc, b)));
    }
  }
  if (into > kClosureTol) throw DomainError("group flip: theta does not map N into N");
  if (order2 > kClosureTol) throw DomainError("group flip: theta is not of order 2");
  if (hom > kClosureTol) throw DomainError("group flip: theta is not multiplicative");
  if (tr > kClosureTol) throw DomainError("group flip: theta does not preserve the trace");

  Inclusion inc;
  inc.sub = n_desc;
  inc.n_algebra = nalg;
  inc.embed = [n_desc, theta, n](const ComplexMatrix& a) {
    ComplexMatrix out = ComplexMatrix::Zero(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a;
    out.bottomRightCorner(n, n) = theta.apply(n_desc, a);
    return out;
  };

  // M = {[[a, b], [θ(b), θ(a)]]}.
  std::vector<ComplexMatrix> span;
  span.push_back(ComplexMatrix::Identity(2 * n, 2 * n));
  for (const auto& e : nb) {
    const ComplexMatrix te = theta.apply(n_desc, e);
    ComplexMatrix diag = ComplexMatrix::Zero(2 * n, 2 * n);
    diag.topLeftCorner(n, n) = e;
    diag.bottomRightCorner(n, n) = te;
    ComplexMatrix off = ComplexMatrix::Zero(2 * n, 2 * n);
    off.topRightCorner(n, n) = e;
    off.bottomLeftCorner(n, n) = te;
    span.push_back(std::move(diag));
    span.push_back(std::move(off));
  }
  Eigen::VectorXd w(2 * n);
  w << nalg.weights() / 2.0, nalg.weights() / 2.0;
  inc.m_algebra = TracialAlgebra::from_spanning_set(w, span);
  if (inc.m_algebra.closure_defect() > kClosureTol) {
    throw DomainError("group flip: the 2x2 block algebra is not closed under products");
  }
  if (inc.m_algebra.trace_defect() > kClosureTol) {
    throw DomainError("group flip: the induced functional is not a trace on M");
  }
  inc.lambda = 0.5;
  inc.family = {FamilyTag::Kind::group_flip, 0, 2,
                "group_flip(" + describe_descriptor(n_desc) + "," + theta.describe() + ")"};
  inc.n_image = image_of(inc);
  validate_inclusion(inc);
  return inc;
}

Inclusion make_custom_inclusion(const AlgebraDescriptor& m_desc,
                                const std::vector<ComplexMatrix>& generators, double lambda) {
  Inclusion inc;
  inc.m_algebra = TracialAlgebra::from_descriptor(m_desc);
  const Eigen::Index n = inc.m_algebra.ambient_dim();

  std::vector<ComplexMatrix> words{ComplexMatrix::Identity(n, n)};
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != n) throw DomainError("custom inclusion: generator has wrong shape");
    words.push_back(g);
    words.push_back(g.adjoint());
  }
  const std::vector<ComplexMatrix> letters(words.begin() + 1, words.end());
  TracialAlgebra alg = TracialAlgebra::from_spanning_set(inc.m_algebra.weights(), words);
  for (;;) {
    std::vector<ComplexMatrix> grown = alg.basis();
    for (const auto& b : alg.basis())
      for (const auto& l : letters) grown.push_back(b * l);
    TracialAlgebra next = TracialAlgebra::from_spanning_set(inc.m_algebra.weights(), grown);
    if (next.dim() == alg.dim()) break;
    alg = std::move(next);
  }
  inc.n_algebra = alg;
  inc.n_image = alg;
  inc.embed = [](const ComplexMatrix& a) { return a; };
  inc.sub = {};
  inc.lambda = lambda;
  inc.family = {FamilyTag::Kind::custom, 0, 0, "custom"};
  validate_inclusion(inc);
  return inc;
}

Inclusion with_lambda(Inclusion inc, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("inclusion: lambda must lie in (0, 1]");
  inc.lambda = lambda;
  return inc;
}

ComplexMatrix expectation_E(const Inclusion& inc, const ComplexMatrix& x) {
  return inc.n_image.project(x);
}

ComplexMatrix horizontal_projection(const Inclusion& inc, const ComplexMatrix& x) {
  const ComplexMatrix a = linalg::antihermitian_part(x);
  return linalg::antihermitian_part(ComplexMatrix(a - expectation_E(inc, a)));
}

double horizontal_defect(const Inclusion& inc, const ComplexMatrix& z) {
  const TracialAlgebra& m = inc.m_algebra;
  return std::max(m.two_norm(z + z.adjoint()), m.two_norm(expectation_E(inc, z)));
}

ComplexMatrix random_horizontal(const Inclusion& inc, Rng& rng) {
  return horizontal_projection(inc, inc.m_algebra.random_element(rng));
}

// ---------------------------------------------------------------------------
// Pimsner–Popa

namespace {

struct Amplified {
  const Inclusion& inc;
  Eigen::Index n;
  Eigen::Index r;

  ComplexMatrix expect(const ComplexMatrix& y) const {
    ComplexMatrix out(n * r, n * r);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j)
        out.block(i * n, j * n, n, n) = expectation_E(inc, y.block(i * n, j * n, n, n));
    return out;
  }

  ComplexMatrix project_to_algebra(const ComplexMatrix& y) const {
    ComplexMatrix out(n * r, n * r);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j)
        out.block(i * n, j * n, n, n) = inc.m_algebra.project(y.block(i * n, j * n, n, n));
    return out;
  }
};

// Minimum eigenvalue of E(y) - λ y for y = x*x scaled to unit norm.
double pp_margin(const Amplified& amp, const ComplexMatrix& y, double lambda) {
  const double scale = linalg::op_norm(y);
  if (scale == 0.0) return 0.0;
  const ComplexMatrix a = linalg::hermitian_part(ComplexMatrix((amp.expect(y) - lambda * y) / scale));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Spectral projections of a Hermitian matrix, one per eigenvalue cluster.
std::vector<ComplexMatrix> spectral_projections(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(linalg::hermitian_part(h));
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<ComplexMatrix> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > 1e-8 * scale) {
      const ComplexMatrix v = es.eigenvectors().middleCols(start, i - start);
      out.push_back(v * v.adjoint());
      start = i;
    }
  }
  return out;
}

}  // namespace

PimsnerPopaReport pimsner_popa_validate(const Inclusion& inc, int n_samples, double lambda,
                                        std::uint64_t seed, int amplification) {
  if (n_samples < 1) throw DomainError("pimsner_popa_validate: n_samples must be >= 1");
  const Eigen::Index n = inc.ambient_dim();
  const Eigen::Index r = amplification > 0 ? amplification : n;
  const Amplified amp{inc, n, r};
  const Amplified single{inc, n, 1};

  PimsnerPopaReport report;
  auto consider = [&](const Amplified& a, const ComplexMatrix& x) {
    const double margin = pp_margin(a, x.adjoint() * x, lambda);
    ++report.samples;
    if (!report.witness || margin < report.worst_margin) {
      report.worst_margin = margin;
      report.witness = x;
    }
  };

  for (const auto& b : inc.m_algebra.basis()) consider(single, b);

  if (r >= n) {
    // Maximally entangled vector Σ_a e_a ⊗ e_a, compressed into M ⊗ M_r.
    ComplexMatrix omega = ComplexMatrix::Zero(n * r, n * r);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) omega(a * n + a, b * n + b) = 1.0 / static_cast<double>(n);
    const ComplexMatrix y = amp.project_to_algebra(omega);
    consider(amp, y);
    for (const auto& proj : spectral_projections(y)) consider(amp, proj);
  }

  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    ComplexMatrix x(n * r, n * r);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j) x.block(i * n, j * n, n, n) = inc.m_algebra.random_element(rng);
    consider(amp, x);
    const auto projs = spectral_projections(x.adjoint() * x);
    consider(amp, projs.back());
  }
  report.feasible = report.worst_margin >= -1e-10;
  return report;
}

Norms norms(const TracialAlgebra& alg, const ComplexMatrix& x) {
  return {alg.two_norm(x), linalg::op_norm(x)};
}

Norms norms(const AlgebraDescriptor& desc, const ComplexMatrix& x) {
  return norms(TracialAlgebra::from_descriptor(desc), x);
}

}  // namespace subgeo
