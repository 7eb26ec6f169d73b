#include "krausopt/holevo.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "krausopt/errors.hpp"

namespace krausopt {
namespace {

void require_compatible(std::span<const ComplexMatrix> ops, const Ensemble& e, const char* who) {
  if (ops.empty()) throw ValidationError(std::string(who) + ": no Kraus operators");
  for (const auto& h : ops) {
    if (h.cols() != e.dim() || h.rows() != ops.front().rows()) {
      throw ValidationError(std::string(who) + ": operator shape incompatible with ensemble dimension " +
                            std::to_string(e.dim()));
    }
  }
}

}  // namespace

double KrausGradient::frobenius_norm() const {
  double sq = 0.0;
  for (const auto& g : per_operator) sq += g.squaredNorm();
  return std::sqrt(sq);
}

RealVector KrausGradient::flatten() const {
  Eigen::Index total = 0;
  for (const auto& g : per_operator) total += 2 * g.size();
  RealVector out(total);
  Eigen::Index idx = 0;
  for (const auto& g : per_operator) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.cols(); ++c) {
        out[idx++] = g(r, c).real();
        out[idx++] = g(r, c).imag();
      }
    }
  }
  return out;
}

double cosine_similarity(const KrausGradient& a, const KrausGradient& b) {
  const RealVector fa = a.flatten();
  const RealVector fb = b.flatten();
  if (fa.size() != fb.size()) throw ValidationError("cosine_similarity: gradient layouts differ");
  const double denom = fa.norm() * fb.norm();
  if (denom == 0.0) return 0.0;
  return fa.dot(fb) / denom;
}

HolevoResult holevo_bound(const KrausChannel& ch, const Ensemble& e) {
  const EnsembleOutput out = apply_ensemble(ch, e);
  HolevoResult r;
  r.average_output_entropy_bits = von_neumann_entropy(out.average);
  r.bound_bits = r.average_output_entropy_bits;
  const auto p = e.probabilities();
  r.per_state_entropies_bits.reserve(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    r.per_state_entropies_bits.push_back(von_neumann_entropy(out.per_state[i]));
    r.bound_bits -= p[i] * r.per_state_entropies_bits.back();
  }
  return r;
}

HolevoResult holevo_objective(std::span<const ComplexMatrix> operators, const Ensemble& e) {
  require_compatible(operators, e, "holevo_objective");
  const Eigen::Index m = operators.front().rows();
  const auto p = e.probabilities();
  ComplexMatrix avg = ComplexMatrix::Zero(m, m);
  HolevoResult r;
  r.per_state_entropies_bits.reserve(e.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const ComplexMatrix yi = apply_operators(operators, e.states()[i].matrix());
    avg += p[i] * yi;
    r.per_state_entropies_bits.push_back(spectral_entropy(yi));
    weighted += p[i] * r.per_state_entropies_bits.back();
  }
  r.average_output_entropy_bits = spectral_entropy(avg);
  r.bound_bits = r.average_output_entropy_bits - weighted;
  return r;
}

KrausGradient holevo_gradient(std::span<const ComplexMatrix> operators, const Ensemble& e,
                              double eig_floor) {
  require_compatible(operators, e, "holevo_gradient");
  const Eigen::Index m = operators.front().rows();
  const Eigen::Index n = e.dim();
  const auto p = e.probabilities();
  const ComplexMatrix id = ComplexMatrix::Identity(m, m);

  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < e.size(); ++i) x += p[i] * e.states()[i].matrix();

  // (ln Y_i + I) for each state, and (ln Y + I) for the average.
  std::vector<ComplexMatrix> log_yi;
  log_yi.reserve(e.size());
  ComplexMatrix y = ComplexMatrix::Zero(m, m);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const ComplexMatrix yi = apply_operators(operators, e.states()[i].matrix());
    y += p[i] * yi;
    log_yi.push_back(matrix_log_nat(yi, eig_floor) + id);
  }
  const ComplexMatrix log_y = matrix_log_nat(y, eig_floor) + id;

  KrausGradient grad;
  grad.log_base = std::numbers::e;
  grad.per_operator.reserve(operators.size());
  for (const auto& h : operators) {
    ComplexMatrix g = -2.0 * log_y * h * x;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (p[i] == 0.0) continue;
      g.noalias() += (2.0 * p[i]) * log_yi[i] * h * e.states()[i].matrix();
    }
    grad.per_operator.push_back(std::move(g));
  }
  return grad;
}

KrausGradient holevo_gradient(const KrausChannel& ch, const Ensemble& e, double eig_floor) {
  return holevo_gradient(ch.operators(), e, eig_floor);
}

KrausGradient finite_diff_gradient(std::span<const ComplexMatrix> operators, const Ensemble& e,
                                   double step) {
  if (!(step >= 1e-8 && step <= 1e-3)) {
    throw ValidationError("finite_diff_gradient: step must lie in [1e-8, 1e-3]");
  }
  require_compatible(operators, e, "finite_diff_gradient");
  std::vector<ComplexMatrix> work(operators.begin(), operators.end());
  KrausGradient grad;
  grad.log_base = 2.0;
  grad.per_operator.reserve(work.size());

  auto central = [&](std::size_t k, Eigen::Index r, Eigen::Index c, Complex delta) {
    const Complex saved = work[k](r, c);
    work[k](r, c) = saved + delta;
    const double plus = holevo_objective(work, e).bound_bits;
    work[k](r, c) = saved - delta;
    const double minus = holevo_objective(work, e).bound_bits;
    work[k](r, c) = saved;
    return (plus - minus) / (2.0 * step);
  };

  for (std::size_t k = 0; k < work.size(); ++k) {
    ComplexMatrix g(work[k].rows(), work[k].cols());
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.cols(); ++c) {
        g(r, c) = Complex(central(k, r, c, Complex(step, 0.0)), central(k, r, c, Complex(0.0, step)));
      }
    }
    grad.per_operator.push_back(std::move(g));
  }
  return grad;
}

KrausGradient finite_diff_gradient(const KrausChannel& ch, const Ensemble& e, double step) {
  return finite_diff_gradient(ch.operators(), e, step);
}

}  // namespace krausopt
