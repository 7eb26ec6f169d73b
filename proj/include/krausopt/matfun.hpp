#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace krausopt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default clamp applied to eigenvalues before log / inverse square root.
inline constexpr double kDefaultEigFloor = 1e-12;

/// Spectral decomposition A = V diag(values) V^H of a Hermitian matrix.
/// Eigenvalues are ascending; the columns of `vectors` are orthonormal.
struct HermitianEig {
  RealVector values;
  ComplexMatrix vectors;

  ComplexMatrix reconstruct() const;
};

/// Returns (A + A^H) / 2. Throws ValidationError for non-square input.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// ||A - A^H||_F / max(1, ||A||_F).
double hermiticity_residual(const ComplexMatrix& a);

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized
/// before the solve; a relative Hermiticity residual above 1e-8 is
/// rejected with ValidationError, solver failure raises NumericalError.
HermitianEig eig_hermitian(const ComplexMatrix& a);

/// V diag(log_base(max(lambda, eig_floor))) V^H for Hermitian PSD A.
/// Eigenvalues down to -1e-10 (scaled by max(1, ||A||_F)) are tolerated
/// and clamped.
ComplexMatrix matrix_log(const ComplexMatrix& a, double base = std::numbers::e,
                         double eig_floor = kDefaultEigFloor);

/// Natural-log variant of matrix_log.
ComplexMatrix matrix_log_nat(const ComplexMatrix& a, double eig_floor = kDefaultEigFloor);

/// V diag(max(lambda, eig_floor)^{-1/2}) V^H.
ComplexMatrix inv_sqrt_psd(const ComplexMatrix& a, double eig_floor = kDefaultEigFloor);

/// Applies f to the spectrum of Hermitian A: V diag(f(lambda)) V^H.
template <typename F>
ComplexMatrix hermitian_function(const HermitianEig& eig, F&& f) {
  RealVector mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) mapped[i] = f(eig.values[i]);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace krausopt
