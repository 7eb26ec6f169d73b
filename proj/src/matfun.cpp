#include "krausopt/matfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "krausopt/errors.hpp"

namespace krausopt {
namespace {

constexpr double kHermitianTol = 1e-8;
constexpr double kNegativeEigTol = 1e-10;

void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ValidationError(std::string(who) + ": expected a nonempty square matrix, got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_not_negative(const HermitianEig& eig, double scale, const char* who) {
  if (eig.values.size() > 0 && eig.values[0] < -kNegativeEigTol * std::max(1.0, scale)) {
    throw ValidationError(std::string(who) + ": matrix is not positive semidefinite (lambda_min = " +
                          std::to_string(eig.values[0]) + ")");
  }
}

}  // namespace

ComplexMatrix HermitianEig::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  require_square(a, "hermitian_part");
  return (a + a.adjoint()) * 0.5;
}

double hermiticity_residual(const ComplexMatrix& a) {
  require_square(a, "hermiticity_residual");
  return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

HermitianEig eig_hermitian(const ComplexMatrix& a) {
  require_square(a, "eig_hermitian");
  if (!a.allFinite()) throw ValidationError("eig_hermitian: non-finite entries");
  const double residual = hermiticity_residual(a);
  if (residual >= kHermitianTol) {
    throw ValidationError("eig_hermitian: matrix is not Hermitian (relative residual " +
                          std::to_string(residual) + ")");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

ComplexMatrix scaled_log(const ComplexMatrix& a, double scale, double eig_floor, const char* who) {
  if (!(eig_floor > 0.0)) throw ValidationError(std::string(who) + ": eig_floor must be positive");
  const HermitianEig eig = eig_hermitian(a);
  require_not_negative(eig, a.norm(), who);
  return hermitian_function(eig, [&](double l) { return std::log(std::max(l, eig_floor)) * scale; });
}

}  // namespace

ComplexMatrix matrix_log(const ComplexMatrix& a, double base, double eig_floor) {
  if (!(base > 1.0)) throw ValidationError("matrix_log: base must exceed 1");
  return scaled_log(a, 1.0 / std::log(base), eig_floor, "matrix_log");
}

ComplexMatrix matrix_log_nat(const ComplexMatrix& a, double eig_floor) {
  return scaled_log(a, 1.0, eig_floor, "matrix_log");
}

ComplexMatrix inv_sqrt_psd(const ComplexMatrix& a, double eig_floor) {
  if (!(eig_floor > 0.0)) throw ValidationError("inv_sqrt_psd: eig_floor must be positive");
  const HermitianEig eig = eig_hermitian(a);
  require_not_negative(eig, a.norm(), "inv_sqrt_psd");
  return hermitian_function(eig, [&](double l) { return 1.0 / std::sqrt(std::max(l, eig_floor)); });
}

}  // namespace krausopt
