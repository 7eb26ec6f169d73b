#include "krausopt/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "krausopt/errors.hpp"

namespace krausopt {
namespace {

double entropy_of_spectrum(const RealVector& values, double base) {
  if (!(base > 1.0)) throw ValidationError("entropy: base must exceed 1");
  double s = 0.0;
  for (double l : values) {
    if (l > 0.0) s -= l * std::log(l);
  }
  return s / std::log(base);
}

}  // namespace

PureState::PureState(ComplexVector amplitudes, double tol) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) throw ValidationError("PureState: empty amplitude vector");
  if (!amplitudes_.allFinite()) throw ValidationError("PureState: non-finite amplitude");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > tol) {
    throw ValidationError("PureState: norm " + std::to_string(norm) + " deviates from 1");
  }
}

PureState PureState::normalized(const ComplexVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("PureState::normalized: vector has zero or non-finite norm");
  }
  return PureState(v / norm, kInternalTol);
}

DensityReport validate_density(const ComplexMatrix& x, double tol) {
  DensityReport r;
  if (x.rows() != x.cols() || x.rows() == 0 || !x.allFinite()) {
    r.hermitian_residual = r.trace_residual = std::numeric_limits<double>::infinity();
    r.min_eigenvalue = -std::numeric_limits<double>::infinity();
    return r;
  }
  r.hermitian_residual = (x - x.adjoint()).norm();
  r.hermitian = r.hermitian_residual < tol;
  const ComplexMatrix h = (x + x.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = solver.eigenvalues()[0];
  r.psd = r.min_eigenvalue >= -tol;
  r.trace_residual = std::abs(x.trace() - Complex(1.0, 0.0));
  r.unit_trace = r.trace_residual < tol;
  return r;
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m, double tol) {
  const DensityReport r = validate_density(m, tol);
  if (!r.ok()) {
    throw ValidationError("DensityMatrix: invalid state (hermitian residual " +
                          std::to_string(r.hermitian_residual) + ", lambda_min " +
                          std::to_string(r.min_eigenvalue) + ", trace residual " +
                          std::to_string(r.trace_residual) + ")");
  }
  matrix_ = hermitian_part(m);
}

Ensemble::Ensemble(std::vector<double> probabilities, std::vector<DensityMatrix> states, double tol)
    : probabilities_(std::move(probabilities)), states_(std::move(states)) {
  if (states_.empty()) throw ValidationError("Ensemble: no states");
  if (probabilities_.size() != states_.size()) {
    throw ValidationError("Ensemble: " + std::to_string(probabilities_.size()) +
                          " probabilities for " + std::to_string(states_.size()) + " states");
  }
  const Eigen::Index dim = states_.front().dim();
  for (const auto& s : states_) {
    if (s.dim() != dim) throw ValidationError("Ensemble: states have differing dimensions");
  }
  double total = 0.0;
  for (double& p : probabilities_) {
    if (!std::isfinite(p) || p < -kInternalTol) {
      throw ValidationError("Ensemble: probability " + std::to_string(p) + " is negative");
    }
    p = std::max(p, 0.0);
    total += p;
  }
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("Ensemble: probabilities sum to " + std::to_string(total));
  }
}

Ensemble Ensemble::from_pure(std::vector<double> probabilities, const std::vector<PureState>& states,
                             double tol) {
  std::vector<DensityMatrix> rho;
  rho.reserve(states.size());
  for (const auto& x : states) rho.push_back(pure_to_density(x));
  return Ensemble(std::move(probabilities), std::move(rho), tol);
}

DensityMatrix pure_to_density(const PureState& x) {
  const ComplexVector& a = x.amplitudes();
  return DensityMatrix(a * a.adjoint(), kInternalTol);
}

DensityMatrix mix(const Ensemble& e) {
  const Eigen::Index dim = e.dim();
  ComplexMatrix avg = ComplexMatrix::Zero(dim, dim);
  const auto p = e.probabilities();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.states()[i].dim() != dim) throw ValidationError("mix: dimension mismatch");
    avg += p[i] * e.states()[i].matrix();
  }
  return DensityMatrix(avg, kInputTol);
}

double spectral_entropy(const ComplexMatrix& y, double base) {
  return entropy_of_spectrum(eig_hermitian(y).values, base);
}

double von_neumann_entropy(const DensityMatrix& y, double base) {
  return spectral_entropy(y.matrix(), base);
}

double shannon_entropy(std::span<const double> p, double base) {
  if (!(base > 1.0)) throw ValidationError("shannon_entropy: base must exceed 1");
  double total = 0.0;
  double h = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -kInternalTol) {
      throw ValidationError("shannon_entropy: negative probability " + std::to_string(v));
    }
    total += v;
    if (v > 0.0) h -= v * std::log(v);
  }
  if (p.empty() || std::abs(total - 1.0) > kInputTol) {
    throw ValidationError("shannon_entropy: vector is not on the probability simplex");
  }
  return h / std::log(base);
}

}  // namespace krausopt
