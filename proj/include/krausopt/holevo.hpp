#pragma once

#include <span>
#include <vector>

#include "krausopt/channel.hpp"
#include "krausopt/states.hpp"

namespace krausopt {

/// Holevo quantity of an ensemble pushed through a channel, in bits.
struct HolevoResult {
  double bound_bits = 0.0;                     // S(Y) - sum_i p_i S(Y_i)
  double average_output_entropy_bits = 0.0;    // S(Y)
  std::vector<double> per_state_entropies_bits;  // S(Y_i)
};

/// Gradient of the Holevo quantity with respect to each Kraus operator,
/// laid out as d/dRe + i d/dIm of every entry. `log_base` records the
/// logarithm the objective was differentiated in.
struct KrausGradient {
  std::vector<ComplexMatrix> per_operator;
  double log_base = 0.0;

  double frobenius_norm() const;
  /// Real vector (re, im interleaved, row-major per operator, operators in order).
  RealVector flatten() const;
};

double cosine_similarity(const KrausGradient& a, const KrausGradient& b);

HolevoResult holevo_bound(const KrausChannel& ch, const Ensemble& e);

/// Holevo functional for an arbitrary operator list; no completeness
/// requirement, so it can be evaluated at perturbed (off-manifold) points.
HolevoResult holevo_objective(std::span<const ComplexMatrix> operators, const Ensemble& e);

/// Analytic gradient, natural log:
///   -2 (ln Y + I) H_k X + 2 sum_i p_i (ln Y_i + I) H_k X_i,   X = sum_i p_i X_i.
KrausGradient holevo_gradient(std::span<const ComplexMatrix> operators, const Ensemble& e,
                              double eig_floor = kDefaultEigFloor);
KrausGradient holevo_gradient(const KrausChannel& ch, const Ensemble& e,
                              double eig_floor = kDefaultEigFloor);

/// Central differences of the bound in bits over the real and imaginary part
/// of every operator entry. step must lie in [1e-8, 1e-3].
KrausGradient finite_diff_gradient(std::span<const ComplexMatrix> operators, const Ensemble& e,
                                   double step);
KrausGradient finite_diff_gradient(const KrausChannel& ch, const Ensemble& e, double step);

}  // namespace krausopt
