#pragma once

// Dense complex matrix arithmetic and spectral matrix functions.
//
// Every element of N, M and M1 is carried as a dense Eigen::MatrixXcd. Spectral
// functions act through a unitary diagonalization, so they are only defined on
// normal input (Hermitian, anti-Hermitian, or unitary for the logarithm).

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <string>
#include <string_view>

namespace subgeo::linalg {

using Complex = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using ComplexMatrix = MatrixX<double>;
using ComplexVector = Eigen::VectorXcd;

/// Global numerical tolerances of the linear-algebra layer.
struct Settings {
  /// Absolute tolerance on the spectral norm for normality, unitarity and PSD checks.
  double spectral_tol = 1e-10;
  /// Eigenvalues of a unitary within this angle of -1 are rejected by the principal log.
  double angle_guard = 1e-8;
};

/// Process-wide settings. Adjust before any computation starts; read-only afterwards.
Settings& settings();

enum class ScalarFunction { exp, cos, sin, sinc, sqrt, square };

struct SpectralDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;  // unitary, columns are eigenvectors

  ComplexMatrix reconstruct() const;
};

// ---------------------------------------------------------------------------
// Expression-friendly helpers.

template <typename Derived>
ComplexMatrix adjoint(const Eigen::MatrixBase<Derived>& a) {
  return a.adjoint();
}

template <typename DerivedA, typename DerivedB>
ComplexMatrix commutator(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  return a * b - b * a;
}

template <typename Derived>
ComplexMatrix hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  return 0.5 * (a + a.adjoint());
}

template <typename Derived>
ComplexMatrix antihermitian_part(const Eigen::MatrixBase<Derived>& a) {
  return 0.5 * (a - a.adjoint());
}

/// Largest singular value.
double op_norm(const ComplexMatrix& a);

/// Spectral-norm distance of a from a*.
double hermitian_defect(const ComplexMatrix& a);
/// Spectral-norm distance of a from -a*.
double antihermitian_defect(const ComplexMatrix& a);
/// ||a*a - 1|| in spectral norm.
double unitary_defect(const ComplexMatrix& a);
/// max(||a^2 - a||, ||a - a*||) in spectral norm.
double projection_defect(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double tol);
bool is_antihermitian(const ComplexMatrix& a, double tol);
bool is_unitary(const ComplexMatrix& a, double tol);

/// Normalized matrix trace Tr(a)/n.
Complex normalized_trace(const ComplexMatrix& a);

/// Tr(a* b) without forming the product.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

Complex frobenius_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// ---------------------------------------------------------------------------
// Spectral calculus.

/// Unitary diagonalization of a normal matrix (Hermitian and anti-Hermitian
/// input take the self-adjoint solver; anything else goes through the complex
/// Schur form). Throws DomainError on non-normal input.
SpectralDecomposition decompose_normal(const ComplexMatrix& a);

/// f(h) for Hermitian or anti-Hermitian h. sinc(0) = 1. sqrt requires h >= -spectral_tol.
ComplexMatrix spectral_function(const ComplexMatrix& h, ScalarFunction f);

/// f(h) for an arbitrary scalar function on the spectrum of a normal matrix.
ComplexMatrix apply_spectral(const ComplexMatrix& h, const std::function<Complex(Complex)>& f);

/// exp of an anti-Hermitian matrix (unitary result).
ComplexMatrix expm_antihermitian(const ComplexMatrix& x);

/// Principal anti-Hermitian logarithm of a unitary: x* = -x, ||x|| < pi, exp(x) = u.
ComplexMatrix log_unitary_principal(const ComplexMatrix& u);

struct PolarParts {
  ComplexMatrix u;     // partial isometry, u* = -u
  ComplexMatrix absx;  // sqrt(-x^2) >= 0
};

/// Polar decomposition x = u |x| of an anti-Hermitian x; u vanishes on ker x.
PolarParts polar_antihermitian(const ComplexMatrix& x);

/// Closest unitary in any unitarily invariant norm (unitary polar factor).
ComplexMatrix nearest_unitary(const ComplexMatrix& a);

/// Scalar sinc with sinc(0) = 1.
Complex sinc(Complex z);

// ---------------------------------------------------------------------------
// Text dump format: one row per line, whitespace-separated "re+imi" entries.

std::string to_text(const ComplexMatrix& a);
ComplexMatrix from_text(std::string_view text);

void write_matrix_file(const std::string& path, const ComplexMatrix& a);
ComplexMatrix read_matrix_file(const std::string& path);

}  // namespace subgeo::linalg
