#pragma once

#include <span>
#include <string>
#include <vector>

#include "krausopt/channel.hpp"
#include "krausopt/holevo.hpp"
#include "krausopt/states.hpp"

namespace krausopt {

/// Where the completeness normalization happens inside one ascent sweep.
enum class Projection {
  kPerSweep,  // gradient for all k at the current point, update all, normalize once
  kPerK,      // for each k: gradient, update H_k, normalize the whole set
};

struct OptimConfig {
  double step_size = 0.3;
  int max_iters = 100;
  double improvement_threshold = 1e-6;  // bits
  double eig_floor = kDefaultEigFloor;
  bool record_trace = true;
  Projection projection = Projection::kPerSweep;

  /// Throws ValidationError if a field is out of range.
  void validate() const;
};

enum class StopStatus { kThresholdReached, kMaxIters, kError };

const char* to_string(StopStatus s);

struct IterationRecord {
  int iteration = 0;
  double holevo_bits = 0.0;
  double grad_norm = 0.0;            // gradient evaluated before the step
  double constraint_residual = 0.0;  // completeness residual (channel) or simplex/norm residual (input)
  double wall_ms = 0.0;
};

struct OptimTrace {
  double initial_bits = 0.0;
  double best_bits = 0.0;
  int best_iteration = 0;  // 0 means the starting point
  int iterations_used = 0;
  StopStatus status = StopStatus::kMaxIters;
  std::string error;
  std::vector<IterationRecord> iterations;  // empty unless record_trace
};

struct ChannelOptResult {
  KrausChannel channel;  // best iterate seen
  OptimTrace trace;
};

struct InputOptResult {
  Ensemble ensemble;  // best iterate seen
  OptimTrace trace;
};

/// One projected ascent sweep over all Kraus operators.
KrausChannel ga_step(const KrausChannel& ch, const Ensemble& e, const OptimConfig& cfg);

/// Repeats ga_step until the per-iteration gain drops below the threshold or
/// max_iters is hit. Numerical failures end the run with status kError and
/// the best channel found so far.
ChannelOptResult optimize_channel(const KrausChannel& ch0, const Ensemble& e, const OptimConfig& cfg);

/// Independent optimize_channel runs from the same start, one per step size.
std::vector<OptimTrace> sweep_step_sizes(const KrausChannel& ch0, const Ensemble& e,
                                         std::span<const double> step_sizes, const OptimConfig& cfg);

/// Gradient of the Holevo quantity (natural log) with respect to the
/// probabilities: -Tr(Y_i ln Y) - S(Y_i), dropping the common constant.
RealVector input_probability_gradient(const KrausChannel& ch, const Ensemble& e,
                                      double eig_floor = kDefaultEigFloor);

/// Gradient with respect to each state vector x_i (X_i = x_i x_i^H), as
/// d/dRe + i d/dIm: 2 p_i Adj(ln Y_i - ln Y) x_i with Adj the adjoint channel.
std::vector<ComplexVector> input_state_gradient(const KrausChannel& ch, std::span<const double> p,
                                                std::span<const ComplexVector> states,
                                                double eig_floor = kDefaultEigFloor);

/// Ascent over the ensemble with the channel fixed: a probability step
/// projected onto the simplex, then a state step followed by renormalization.
/// Requires a pure-state ensemble.
InputOptResult optimize_input(const KrausChannel& ch, const Ensemble& e0, const OptimConfig& cfg);

/// Euclidean projection onto {p >= 0, sum p = 1}.
std::vector<double> project_simplex(std::span<const double> v);

/// Recovers unit vectors x_i with X_i = x_i x_i^H; throws ValidationError if
/// some state is not rank one.
std::vector<ComplexVector> pure_state_vectors(const Ensemble& e);

}  // namespace krausopt
