#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "krausopt/matfun.hpp"
#include "krausopt/rng.hpp"
#include "krausopt/states.hpp"

namespace krausopt {

/// Default bound on the completeness residual ||sum H_k^H H_k - I||_F.
inline constexpr double kCptpTol = 1e-10;

/// ||sum_k H_k^H H_k - I_N||_F for a list of M x N operators.
double completeness_residual(std::span<const ComplexMatrix> operators);

/// A quantum channel X -> sum_k H_k X H_k^H given by K operators of shape M x N
/// that satisfy the completeness relation.
class KrausChannel {
 public:
  /// Throws ValidationError on empty/mismatched operators or when the
  /// completeness residual is not below `cptp_tol`.
  explicit KrausChannel(std::vector<ComplexMatrix> operators, double cptp_tol = kCptpTol);

  std::span<const ComplexMatrix> operators() const noexcept { return operators_; }
  const ComplexMatrix& op(std::size_t k) const { return operators_.at(k); }
  Eigen::Index input_dim() const noexcept { return operators_.front().cols(); }
  Eigen::Index output_dim() const noexcept { return operators_.front().rows(); }
  std::size_t kraus_rank() const noexcept { return operators_.size(); }
  double residual() const { return completeness_residual(operators_); }

 private:
  std::vector<ComplexMatrix> operators_;
};

/// sum_k H_k X H_k^H without any validity checks on the operators.
ComplexMatrix apply_operators(std::span<const ComplexMatrix> operators, const ComplexMatrix& x);

/// Adjoint map A -> sum_k H_k^H A H_k.
ComplexMatrix apply_adjoint(std::span<const ComplexMatrix> operators, const ComplexMatrix& a);

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& x);

struct EnsembleOutput {
  DensityMatrix average;                // Y = sum_i p_i Y_i
  std::vector<DensityMatrix> per_state; // Y_i = channel(X_i)
};

EnsembleOutput apply_ensemble(const KrausChannel& ch, const Ensemble& e);

/// Replaces every H_k with H_k G^{-1/2}, G = sum_k H_k^H H_k. Eigenvalues of
/// G below eig_floor are clamped; clamping more than one of them, or a
/// result that still misses the completeness bound, raises NumericalError.
KrausChannel project_cptp(std::vector<ComplexMatrix> operators, double eig_floor = kDefaultEigFloor);

/// K operators with CN(0,1) entries, normalized by G^{-1/2}. Requires K*M >= N.
KrausChannel random_channel(Eigen::Index n, Eigen::Index m, std::size_t k, std::uint64_t seed);

/// Same construction drawing from an existing generator.
KrausChannel random_channel(Eigen::Index n, Eigen::Index m, std::size_t k, Rng& rng);

/// Channel sending every input to I_M / M, built from the M*N operators
/// (1/sqrt(M)) e_m e_n^H.
KrausChannel depolarizing_to_max_mixed(Eigen::Index n, Eigen::Index m);

/// Left-multiplies every operator by `u` (an M x M matrix).
KrausChannel rotate_output(const KrausChannel& ch, const ComplexMatrix& u);

}  // namespace krausopt
