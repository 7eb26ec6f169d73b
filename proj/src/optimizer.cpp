#include "krausopt/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "krausopt/errors.hpp"

namespace krausopt {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct StepOutcome {
  KrausChannel channel;
  double grad_norm;
};

StepOutcome ascent_sweep(const KrausChannel& ch, const Ensemble& e, const OptimConfig& cfg) {
  std::vector<ComplexMatrix> ops(ch.operators().begin(), ch.operators().end());
  if (cfg.projection == Projection::kPerSweep) {
    const KrausGradient g = holevo_gradient(ops, e, cfg.eig_floor);
    for (std::size_t k = 0; k < ops.size(); ++k) ops[k] += cfg.step_size * g.per_operator[k];
    return {project_cptp(std::move(ops), cfg.eig_floor), g.frobenius_norm()};
  }

  double first_norm = 0.0;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const KrausGradient g = holevo_gradient(ops, e, cfg.eig_floor);
    if (k == 0) first_norm = g.frobenius_norm();
    ops[k] += cfg.step_size * g.per_operator[k];
    KrausChannel normalized = project_cptp(std::move(ops), cfg.eig_floor);
    ops.assign(normalized.operators().begin(), normalized.operators().end());
  }
  return {KrausChannel(std::move(ops)), first_norm};
}

// Stop rule shared by both optimizers: the raw gain of the latest iteration.
bool below_threshold(double current, double previous, const OptimConfig& cfg) {
  return current - previous < cfg.improvement_threshold;
}

std::vector<ComplexMatrix> outputs_of(const KrausChannel& ch, std::span<const double> p,
                                      std::span<const ComplexVector> states, ComplexMatrix& avg) {
  const Eigen::Index m = ch.output_dim();
  avg = ComplexMatrix::Zero(m, m);
  std::vector<ComplexMatrix> ys;
  ys.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    ys.push_back(apply_operators(ch.operators(), states[i] * states[i].adjoint()));
    avg += p[i] * ys.back();
  }
  return ys;
}

Ensemble make_ensemble(std::span<const double> p, std::span<const ComplexVector> xs) {
  std::vector<PureState> states;
  states.reserve(xs.size());
  for (const auto& x : xs) states.push_back(PureState::normalized(x));
  return Ensemble::from_pure(std::vector<double>(p.begin(), p.end()), states, kInternalTol);
}

double input_constraint_residual(std::span<const double> p, std::span<const ComplexVector> xs) {
  double r = std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0);
  for (double v : p) r = std::max(r, -v);
  for (const auto& x : xs) r = std::max(r, std::abs(x.norm() - 1.0));
  return r;
}

}  // namespace

void OptimConfig::validate() const {
  if (!(step_size > 0.0 && step_size <= 10.0)) throw ValidationError("step size must lie in (0, 10]");
  if (max_iters < 1 || max_iters > 1'000'000) throw ValidationError("max_iters must lie in [1, 1e6]");
  if (!(improvement_threshold >= 0.0)) throw ValidationError("improvement threshold must be >= 0");
  if (!(eig_floor > 0.0)) throw ValidationError("eig_floor must be positive");
}

const char* to_string(StopStatus s) {
  switch (s) {
    case StopStatus::kThresholdReached: return "threshold-reached";
    case StopStatus::kMaxIters: return "max-iters";
    case StopStatus::kError: return "error";
  }
  return "unknown";
}

KrausChannel ga_step(const KrausChannel& ch, const Ensemble& e, const OptimConfig& cfg) {
  cfg.validate();
  return ascent_sweep(ch, e, cfg).channel;
}

ChannelOptResult optimize_channel(const KrausChannel& ch0, const Ensemble& e, const OptimConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  OptimTrace trace;
  trace.initial_bits = holevo_objective(ch0.operators(), e).bound_bits;
  trace.best_bits = trace.initial_bits;
  KrausChannel best = ch0;
  KrausChannel current = ch0;
  double previous = trace.initial_bits;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    try {
      StepOutcome step = ascent_sweep(current, e, cfg);
      current = std::move(step.channel);
      const double bits = holevo_objective(current.operators(), e).bound_bits;
      trace.iterations_used = it;
      if (cfg.record_trace) {
        trace.iterations.push_back({it, bits, step.grad_norm, current.residual(), elapsed_ms(start)});
      }
      if (bits > trace.best_bits) {
        trace.best_bits = bits;
        trace.best_iteration = it;
        best = current;
      }
      if (below_threshold(bits, previous, cfg)) {
        trace.status = StopStatus::kThresholdReached;
        return {std::move(best), std::move(trace)};
      }
      previous = bits;
    } catch (const NumericalError& err) {
      trace.status = StopStatus::kError;
      trace.error = err.what();
      return {std::move(best), std::move(trace)};
    }
  }
  trace.status = StopStatus::kMaxIters;
  return {std::move(best), std::move(trace)};
}

std::vector<OptimTrace> sweep_step_sizes(const KrausChannel& ch0, const Ensemble& e,
                                         std::span<const double> step_sizes, const OptimConfig& cfg) {
  if (step_sizes.empty()) throw ValidationError("sweep_step_sizes: no step sizes given");
  std::vector<OptimTrace> traces;
  traces.reserve(step_sizes.size());
  for (double alpha : step_sizes) {
    OptimConfig run = cfg;
    run.step_size = alpha;
    traces.push_back(optimize_channel(ch0, e, run).trace);
  }
  return traces;
}

RealVector input_probability_gradient(const KrausChannel& ch, const Ensemble& e, double eig_floor) {
  const EnsembleOutput out = apply_ensemble(ch, e);
  const ComplexMatrix log_y = matrix_log_nat(out.average.matrix(), eig_floor);
  RealVector g(static_cast<Eigen::Index>(e.size()));
  for (std::size_t i = 0; i < e.size(); ++i) {
    const ComplexMatrix& yi = out.per_state[i].matrix();
    g[static_cast<Eigen::Index>(i)] =
        -(yi * log_y).trace().real() - spectral_entropy(yi, std::numbers::e);
  }
  return g;
}

std::vector<ComplexVector> input_state_gradient(const KrausChannel& ch, std::span<const double> p,
                                                std::span<const ComplexVector> states,
                                                double eig_floor) {
  if (p.size() != states.size()) throw ValidationError("input_state_gradient: size mismatch");
  ComplexMatrix avg;
  const std::vector<ComplexMatrix> ys = outputs_of(ch, p, states, avg);
  const ComplexMatrix log_y = matrix_log_nat(avg, eig_floor);
  std::vector<ComplexVector> grads;
  grads.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (p[i] == 0.0) {
      grads.push_back(ComplexVector::Zero(states[i].size()));
      continue;
    }
    const ComplexMatrix d = apply_adjoint(ch.operators(), matrix_log_nat(ys[i], eig_floor) - log_y);
    grads.push_back((2.0 * p[i]) * (d * states[i]));
  }
  return grads;
}

InputOptResult optimize_input(const KrausChannel& ch, const Ensemble& e0, const OptimConfig& cfg) {
  cfg.validate();
  if (e0.dim() != ch.input_dim()) throw ValidationError("optimize_input: dimension mismatch");
  const auto start = Clock::now();
  std::vector<double> p(e0.probabilities().begin(), e0.probabilities().end());
  std::vector<ComplexVector> xs = pure_state_vectors(e0);

  OptimTrace trace;
  trace.initial_bits = holevo_bound(ch, e0).bound_bits;
  trace.best_bits = trace.initial_bits;
  Ensemble best = e0;
  double previous = trace.initial_bits;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    try {
      const RealVector gp = input_probability_gradient(ch, make_ensemble(p, xs), cfg.eig_floor);
      std::vector<double> stepped(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        stepped[i] = p[i] + cfg.step_size * gp[static_cast<Eigen::Index>(i)];
      }
      p = project_simplex(stepped);

      const std::vector<ComplexVector> gx = input_state_gradient(ch, p, xs, cfg.eig_floor);
      double grad_sq = gp.squaredNorm();
      for (std::size_t i = 0; i < xs.size(); ++i) {
        grad_sq += gx[i].squaredNorm();
        xs[i] += cfg.step_size * gx[i];
        xs[i] /= xs[i].norm();
      }

      Ensemble current = make_ensemble(p, xs);
      const double bits = holevo_bound(ch, current).bound_bits;
      trace.iterations_used = it;
      if (cfg.record_trace) {
        trace.iterations.push_back(
            {it, bits, std::sqrt(grad_sq), input_constraint_residual(p, xs), elapsed_ms(start)});
      }
      if (bits > trace.best_bits) {
        trace.best_bits = bits;
        trace.best_iteration = it;
        best = std::move(current);
      }
      if (below_threshold(bits, previous, cfg)) {
        trace.status = StopStatus::kThresholdReached;
        return {std::move(best), std::move(trace)};
      }
      previous = bits;
    } catch (const NumericalError& err) {
      trace.status = StopStatus::kError;
      trace.error = err.what();
      return {std::move(best), std::move(trace)};
    }
  }
  trace.status = StopStatus::kMaxIters;
  return {std::move(best), std::move(trace)};
}

std::vector<double> project_simplex(std::span<const double> v) {
  if (v.empty()) throw ValidationError("project_simplex: empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("project_simplex: non-finite entry");
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

std::vector<ComplexVector> pure_state_vectors(const Ensemble& e) {
  std::vector<ComplexVector> xs;
  xs.reserve(e.size());
  for (const auto& s : e.states()) {
    const HermitianEig eig = eig_hermitian(s.matrix());
    const Eigen::Index top = eig.values.size() - 1;
    if (std::abs(eig.values[top] - 1.0) > kInputTol) {
      throw ValidationError("input optimization requires pure states (largest eigenvalue " +
                            std::to_string(eig.values[top]) + ")");
    }
    xs.push_back(eig.vectors.col(top).normalized());
  }
  return xs;
}

}  // namespace krausopt
