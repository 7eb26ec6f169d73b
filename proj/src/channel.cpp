#include "krausopt/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "krausopt/errors.hpp"

namespace krausopt {
namespace {

void require_common_shape(std::span<const ComplexMatrix> ops, const char* who) {
  if (ops.empty()) throw ValidationError(std::string(who) + ": no Kraus operators");
  const auto rows = ops.front().rows();
  const auto cols = ops.front().cols();
  if (rows == 0 || cols == 0) throw ValidationError(std::string(who) + ": empty Kraus operator");
  for (const auto& h : ops) {
    if (h.rows() != rows || h.cols() != cols) {
      throw ValidationError(std::string(who) + ": Kraus operators differ in shape");
    }
    if (!h.allFinite()) throw ValidationError(std::string(who) + ": non-finite Kraus entry");
  }
}

ComplexMatrix gram(std::span<const ComplexMatrix> ops) {
  ComplexMatrix g = ComplexMatrix::Zero(ops.front().cols(), ops.front().cols());
  for (const auto& h : ops) g.noalias() += h.adjoint() * h;
  return g;
}

void require_input_dim(const KrausChannel& ch, Eigen::Index dim) {
  if (dim != ch.input_dim()) {
    throw ValidationError("channel expects input dimension " + std::to_string(ch.input_dim()) +
                          ", got " + std::to_string(dim));
  }
}

}  // namespace

double completeness_residual(std::span<const ComplexMatrix> operators) {
  require_common_shape(operators, "completeness_residual");
  const ComplexMatrix g = gram(operators);
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).norm();
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> operators, double cptp_tol)
    : operators_(std::move(operators)) {
  require_common_shape(operators_, "KrausChannel");
  const double r = completeness_residual(operators_);
  if (!(r < cptp_tol)) {
    throw ValidationError("KrausChannel: completeness residual " + std::to_string(r) +
                          " exceeds tolerance");
  }
}

ComplexMatrix apply_operators(std::span<const ComplexMatrix> operators, const ComplexMatrix& x) {
  ComplexMatrix y = ComplexMatrix::Zero(operators.front().rows(), operators.front().rows());
  for (const auto& h : operators) y.noalias() += h * x * h.adjoint();
  return y;
}

ComplexMatrix apply_adjoint(std::span<const ComplexMatrix> operators, const ComplexMatrix& a) {
  ComplexMatrix out = ComplexMatrix::Zero(operators.front().cols(), operators.front().cols());
  for (const auto& h : operators) out.noalias() += h.adjoint() * a * h;
  return out;
}

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& x) {
  require_input_dim(ch, x.dim());
  return DensityMatrix(apply_operators(ch.operators(), x.matrix()), kInputTol);
}

EnsembleOutput apply_ensemble(const KrausChannel& ch, const Ensemble& e) {
  require_input_dim(ch, e.dim());
  const Eigen::Index m = ch.output_dim();
  std::vector<DensityMatrix> outputs;
  outputs.reserve(e.size());
  ComplexMatrix avg = ComplexMatrix::Zero(m, m);
  const auto p = e.probabilities();
  for (std::size_t i = 0; i < e.size(); ++i) {
    outputs.push_back(apply(ch, e.states()[i]));
    avg += p[i] * outputs.back().matrix();
  }
  return {DensityMatrix(avg, kInputTol), std::move(outputs)};
}

KrausChannel project_cptp(std::vector<ComplexMatrix> operators, double eig_floor) {
  require_common_shape(operators, "project_cptp");
  if (!(eig_floor > 0.0)) throw ValidationError("project_cptp: eig_floor must be positive");
  const HermitianEig eig = eig_hermitian(gram(operators));
  int clamped = 0;
  for (double l : eig.values) {
    if (l < eig_floor) ++clamped;
  }
  if (clamped > 1) {
    throw NumericalError("project_cptp: " + std::to_string(clamped) +
                         " eigenvalues of sum H_k^H H_k fall below the floor (degenerate operator set)");
  }
  const ComplexMatrix g_inv_sqrt =
      hermitian_function(eig, [&](double l) { return 1.0 / std::sqrt(std::max(l, eig_floor)); });
  for (auto& h : operators) h = h * g_inv_sqrt;
  const double r = completeness_residual(operators);
  if (!(r < kCptpTol)) {
    throw NumericalError("project_cptp: normalized operators miss completeness (residual " +
                         std::to_string(r) + ")");
  }
  return KrausChannel(std::move(operators));
}

KrausChannel random_channel(Eigen::Index n, Eigen::Index m, std::size_t k, Rng& rng) {
  if (n < 1 || m < 1 || k < 1) throw ValidationError("random_channel: dimensions must be positive");
  if (static_cast<Eigen::Index>(k) * m < n) {
    throw ValidationError("random_channel: K*M < N, completeness is unattainable");
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(k);
  for (std::size_t i = 0; i < k; ++i) ops.push_back(rng.complex_gaussian_matrix(m, n));
  return project_cptp(std::move(ops));
}

KrausChannel random_channel(Eigen::Index n, Eigen::Index m, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  return random_channel(n, m, k, rng);
}

KrausChannel depolarizing_to_max_mixed(Eigen::Index n, Eigen::Index m) {
  if (n < 1 || m < 1) throw ValidationError("depolarizing_to_max_mixed: dimensions must be positive");
  const double amp = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<ComplexMatrix> ops;
  ops.reserve(static_cast<std::size_t>(m * n));
  for (Eigen::Index row = 0; row < m; ++row) {
    for (Eigen::Index col = 0; col < n; ++col) {
      ComplexMatrix h = ComplexMatrix::Zero(m, n);
      h(row, col) = amp;
      ops.push_back(std::move(h));
    }
  }
  return KrausChannel(std::move(ops));
}

KrausChannel rotate_output(const KrausChannel& ch, const ComplexMatrix& u) {
  if (u.rows() != ch.output_dim() || u.cols() != ch.output_dim()) {
    throw ValidationError("rotate_output: unitary has wrong shape");
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(ch.kraus_rank());
  for (const auto& h : ch.operators()) ops.push_back(u * h);
  return KrausChannel(std::move(ops));
}

}  // namespace krausopt
