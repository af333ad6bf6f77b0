#include "subgeo/linalg.hpp"

#include "subgeo/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace subgeo::linalg {

Settings& settings() {
  static Settings instance;
  return instance;
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

double op_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

double hermitian_defect(const ComplexMatrix& a) {
  return op_norm(a - a.adjoint()) * 0.5;
}

double antihermitian_defect(const ComplexMatrix& a) {
  return op_norm(a + a.adjoint()) * 0.5;
}

double unitary_defect(const ComplexMatrix& a) {
  return op_norm(a.adjoint() * a - ComplexMatrix::Identity(a.cols(), a.cols()));
}

double projection_defect(const ComplexMatrix& a) {
  return std::max(op_norm(a * a - a), op_norm(a - a.adjoint()));
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && hermitian_defect(a) <= tol;
}

bool is_antihermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && antihermitian_defect(a) <= tol;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && unitary_defect(a) <= tol;
}

Complex normalized_trace(const ComplexMatrix& a) {
  return a.trace() / static_cast<double>(a.rows());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

namespace {

void require_square(const ComplexMatrix& a, const char* op) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError(std::string(op) + ": square non-empty matrix required");
  }
  if (!a.allFinite()) throw DomainError(std::string(op) + ": non-finite entries");
}

SpectralDecomposition decompose_hermitian(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  return {es.eigenvalues().cast<Complex>(), es.eigenvectors()};
}

SpectralDecomposition decompose_antihermitian(const ComplexMatrix& x) {
  // x = iK with K Hermitian.
  const ComplexMatrix k = Complex(0.0, -1.0) * antihermitian_part(x);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(k));
  return {Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>(), es.eigenvectors()};
}

}  // namespace

SpectralDecomposition decompose_normal(const ComplexMatrix& a) {
  require_square(a, "decompose_normal");
  const double tol = settings().spectral_tol;
  if (hermitian_defect(a) <= tol) return decompose_hermitian(a);
  if (antihermitian_defect(a) <= tol) return decompose_antihermitian(a);

  Eigen::ComplexSchur<ComplexMatrix> schur(a);
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix off = t.triangularView<Eigen::StrictlyUpper>();
  const double scale = std::max(1.0, op_norm(a));
  if (op_norm(off) > tol * scale) {
    throw DomainError("decompose_normal: matrix is not normal (Schur off-diagonal " +
                      std::to_string(op_norm(off)) + ")");
  }
  return {t.diagonal(), schur.matrixU()};
}

Complex sinc(Complex z) {
  if (std::abs(z) < 1e-4) {
    const Complex z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

ComplexMatrix apply_spectral(const ComplexMatrix& h, const std::function<Complex(Complex)>& f) {
  const SpectralDecomposition sd = decompose_normal(h);
  ComplexVector values(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = f(sd.eigenvalues(i));
  return sd.eigenvectors * values.asDiagonal() * sd.eigenvectors.adjoint();
}

ComplexMatrix spectral_function(const ComplexMatrix& h, ScalarFunction f) {
  require_square(h, "spectral_function");
  const double tol = settings().spectral_tol;
  const bool herm = hermitian_defect(h) <= tol;
  const bool antiherm = !herm && antihermitian_defect(h) <= tol;
  if (!herm && !antiherm) {
    throw DomainError("spectral_function: input must be Hermitian or anti-Hermitian");
  }
  const SpectralDecomposition sd = herm ? decompose_hermitian(h) : decompose_antihermitian(h);

  ComplexVector values(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Complex z = sd.eigenvalues(i);
    switch (f) {
      case ScalarFunction::exp: values(i) = std::exp(z); break;
      case ScalarFunction::cos: values(i) = std::cos(z); break;
      case ScalarFunction::sin: values(i) = std::sin(z); break;
      case ScalarFunction::sinc: values(i) = sinc(z); break;
      case ScalarFunction::square: values(i) = z * z; break;
      case ScalarFunction::sqrt: {
        if (!herm) throw DomainError("spectral_function: sqrt requires a Hermitian input");
        const double r = z.real();
        if (r < -tol) {
          throw DomainError("spectral_function: sqrt of negative eigenvalue " + std::to_string(r));
        }
        values(i) = std::sqrt(std::max(r, 0.0));
        break;
      }
    }
  }
  ComplexMatrix out = sd.eigenvectors * values.asDiagonal() * sd.eigenvectors.adjoint();
  // Real-valued functions of Hermitian input stay Hermitian; drop rounding skew.
  if (herm) out = hermitian_part(out);
  return out;
}

ComplexMatrix expm_antihermitian(const ComplexMatrix& x) {
  if (!is_antihermitian(x, settings().spectral_tol)) {
    throw DomainError("expm_antihermitian: input is not anti-Hermitian");
  }
  return spectral_function(x, ScalarFunction::exp);
}

ComplexMatrix log_unitary_principal(const ComplexMatrix& u) {
  require_square(u, "log_unitary_principal");
  const Settings& s = settings();
  const double udef = unitary_defect(u);
  if (udef > s.spectral_tol) {
    throw DomainError("log_unitary_principal: input is not unitary (defect " +
                      std::to_string(udef) + ")");
  }
  const SpectralDecomposition sd = decompose_normal(u);
  ComplexVector logs(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    const Complex mu = sd.eigenvalues(i);
    const double theta = std::arg(mu);
    if (std::numbers::pi - std::abs(theta) < s.angle_guard) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "log_unitary_principal: eigenvalue " << mu.real() << (mu.imag() < 0 ? "" : "+")
          << mu.imag() << "i lies within the angle guard of -1";
      throw BranchError(msg.str());
    }
    logs(i) = Complex(0.0, theta);
  }
  return antihermitian_part(sd.eigenvectors * logs.asDiagonal() * sd.eigenvectors.adjoint());
}

PolarParts polar_antihermitian(const ComplexMatrix& x) {
  require_square(x, "polar_antihermitian");
  const double tol = settings().spectral_tol;
  if (antihermitian_defect(x) > tol) {
    throw DomainError("polar_antihermitian: input is not anti-Hermitian");
  }
  const SpectralDecomposition sd = decompose_antihermitian(x);
  const Eigen::Index n = sd.eigenvalues.size();
  ComplexVector phase(n), modulus(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double kappa = sd.eigenvalues(i).imag();
    modulus(i) = std::abs(kappa);
    phase(i) = std::abs(kappa) <= tol ? Complex(0.0) : Complex(0.0, kappa > 0 ? 1.0 : -1.0);
  }
  const ComplexMatrix& v = sd.eigenvectors;
  return {antihermitian_part(v * phase.asDiagonal() * v.adjoint()),
          hermitian_part(v * modulus.asDiagonal() * v.adjoint())};
}

ComplexMatrix nearest_unitary(const ComplexMatrix& a) {
  require_square(a, "nearest_unitary");
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// ---------------------------------------------------------------------------

std::string to_text(const ComplexMatrix& a) {
  std::string out;
  char buf[96];
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.16e%+.16ei", a(i, j).real(), a(i, j).imag());
      if (j > 0) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

Complex parse_entry(const std::string& token) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double re = std::strtod(begin, &end);
  if (end == begin) throw DomainError("matrix text: cannot parse entry '" + token + "'");
  double im = 0.0;
  if (*end != '\0') {
    const char* imag_begin = end;
    im = std::strtod(imag_begin, &end);
    if (end == imag_begin || *end != 'i' || *(end + 1) != '\0') {
      throw DomainError("matrix text: cannot parse entry '" + token + "'");
    }
  }
  if (!std::isfinite(re) || !std::isfinite(im)) {
    throw DomainError("matrix text: non-finite entry '" + token + "'");
  }
  return {re, im};
}

}  // namespace

ComplexMatrix from_text(std::string_view text) {
  std::vector<std::vector<Complex>> rows;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream tokens(line);
    std::vector<Complex> row;
    std::string token;
    while (tokens >> token) row.push_back(parse_entry(token));
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DomainError("matrix text: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DomainError("matrix text: empty matrix");
  ComplexMatrix a(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  }
  return a;
}

void write_matrix_file(const std::string& path, const ComplexMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << to_text(a);
}

ComplexMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace subgeo::linalg
