#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "krausopt/matfun.hpp"

namespace krausopt {

/// Tolerance applied to user-supplied states and probabilities.
inline constexpr double kInputTol = 1e-8;
/// Tolerance applied to states produced inside the library.
inline constexpr double kInternalTol = 1e-10;

/// Unit-norm state vector.
class PureState {
 public:
  /// Throws ValidationError unless | ||x|| - 1 | <= tol.
  explicit PureState(ComplexVector amplitudes, double tol = kInputTol);

  /// Rescales a nonzero vector to unit norm.
  static PureState normalized(const ComplexVector& v);

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }

 private:
  ComplexVector amplitudes_;
};

/// Outcome of checking the three density-matrix conditions.
struct DensityReport {
  bool hermitian = false;
  bool psd = false;
  bool unit_trace = false;
  double hermitian_residual = 0.0;  // ||X - X^H||_F
  double min_eigenvalue = 0.0;      // of the Hermitian part
  double trace_residual = 0.0;      // |Tr X - 1|

  bool ok() const noexcept { return hermitian && psd && unit_trace; }
};

/// Never throws for square input; non-square input yields a report with
/// every check failed.
DensityReport validate_density(const ComplexMatrix& x, double tol = kInputTol);

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  /// Validates at `tol` and stores the Hermitian part.
  explicit DensityMatrix(const ComplexMatrix& m, double tol = kInputTol);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
};

/// Probability-weighted collection of states sharing one dimension.
class Ensemble {
 public:
  Ensemble(std::vector<double> probabilities, std::vector<DensityMatrix> states,
           double tol = kInputTol);

  /// Ensemble of rank-one states x_i x_i^H.
  static Ensemble from_pure(std::vector<double> probabilities, const std::vector<PureState>& states,
                            double tol = kInputTol);

  std::span<const double> probabilities() const noexcept { return probabilities_; }
  const std::vector<DensityMatrix>& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }
  Eigen::Index dim() const noexcept { return states_.front().dim(); }

 private:
  std::vector<double> probabilities_;
  std::vector<DensityMatrix> states_;
};

DensityMatrix pure_to_density(const PureState& x);

/// Average state sum_i p_i X_i.
DensityMatrix mix(const Ensemble& e);

/// -sum lambda log_base(lambda) over the spectrum of a Hermitian PSD matrix,
/// with 0 log 0 = 0. No trace condition is imposed, so the functional can be
/// evaluated on unnormalized outputs.
double spectral_entropy(const ComplexMatrix& y, double base = 2.0);

/// Von Neumann entropy; bits for base 2.
double von_neumann_entropy(const DensityMatrix& y, double base = 2.0);

/// -sum p_i log_base(p_i) with 0 log 0 = 0.
double shannon_entropy(std::span<const double> p, double base = 2.0);

}  // namespace krausopt
