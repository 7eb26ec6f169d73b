#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "krausopt/channel.hpp"
#include "krausopt/optimizer.hpp"
#include "krausopt/rng.hpp"
#include "krausopt/states.hpp"

namespace krausopt {

enum class Scheme { kChannelOpt, kInputOpt, kNone };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct ExperimentSpec {
  Eigen::Index n = 3;
  Eigen::Index m = 4;
  std::size_t k = 5;
  std::optional<std::size_t> p;  // defaults to N
  int trials = 20;
  std::uint64_t seed = 1;
  OptimConfig optim;
  std::vector<double> alphas{0.2, 0.3, 0.4, 0.5};
  std::vector<Eigen::Index> dims{2, 3, 4, 5, 6};
  std::vector<std::size_t> kraus_ranks{1, 2, 3, 4, 5, 6, 7, 8};
  Eigen::Index kraus_sweep_dim = 4;
  std::vector<Scheme> schemes{Scheme::kChannelOpt, Scheme::kInputOpt, Scheme::kNone};
  double fd_step = 1e-5;
  int threads = 1;

  std::size_t ensemble_size(Eigen::Index input_dim) const {
    return p.value_or(static_cast<std::size_t>(input_dim));
  }
  void validate() const;
};

/// Probabilities u_i / sum u_j with u_i ~ U(0,1); states x_i ~ CN(0, I_N)
/// normalized to unit length.
Ensemble random_ensemble(Eigen::Index n, std::size_t p, Rng& rng);
Ensemble random_ensemble(Eigen::Index n, std::size_t p, std::uint64_t seed);

struct Instance {
  KrausChannel channel;
  Ensemble ensemble;
};

/// Random (channel, ensemble) pair for one trial. `point` separates sweep
/// points so each gets fresh draws.
Instance make_instance(std::uint64_t seed, std::uint64_t point, std::uint64_t trial, Eigen::Index n,
                       Eigen::Index m, std::size_t k, std::size_t p);

struct TrialRecord {
  std::uint64_t seed = 0;
  int trial = 0;
  Scheme scheme = Scheme::kNone;
  double initial_bits = 0.0;
  double final_bits = 0.0;
  int iterations = 0;
  double max_residual = 0.0;  // worst constraint residual over the starting point and every iterate
  double runtime_ms = 0.0;
  StopStatus status = StopStatus::kMaxIters;
};

/// Runs one scheme on one instance. The non-optimized scheme reports the
/// bound at the starting point.
TrialRecord run_scheme(Scheme scheme, const Instance& inst, const OptimConfig& cfg);

struct ConvergenceResult {
  std::vector<double> alphas;
  std::vector<std::vector<OptimTrace>> traces;  // [trial][alpha]

  /// trial,alpha,iter,holevo_bits,grad_norm,cptp_residual
  std::string csv() const;
  nlohmann::json summary() const;
  std::vector<double> final_bits(std::size_t alpha_index) const;
};

ConvergenceResult run_convergence(const ExperimentSpec& spec);

struct SweepRow {
  std::int64_t point = 0;  // N = M for the dimension sweep, K for the Kraus sweep
  Scheme scheme = Scheme::kNone;
  int trials = 0;
  double mean_bits = 0.0;
  double std_bits = 0.0;
};

struct SweepResult {
  std::string axis;  // "dim" or "k"
  std::vector<SweepRow> rows;
  std::vector<std::vector<TrialRecord>> records;  // parallel to rows

  /// <axis>,scheme,trials,mean_bits,std_bits
  std::string csv() const;
  nlohmann::json to_json() const;
  const SweepRow& row(std::int64_t point, Scheme scheme) const;
};

SweepResult run_dim_sweep(const ExperimentSpec& spec);
SweepResult run_kraus_sweep(const ExperimentSpec& spec);

struct GradCheckPoint {
  double cosine = 0.0;
  std::vector<double> max_abs_deviation;  // per operator, analytic converted to bits vs FD
  double analytic_norm = 0.0;
  double fd_norm = 0.0;
  double fd_halving_delta = 0.0;  // ||FD(h) - FD(h/2)||
  double min_output_eigenvalue = 0.0;
};

struct GradCheckResult {
  std::vector<GradCheckPoint> points;
  double cosine_threshold = 1.0 - 1e-6;
  bool passed() const;
  std::string report() const;
};

/// Random interior points (every output eigenvalue above 1e-6).
GradCheckResult run_grad_check(const ExperimentSpec& spec);

/// Single point at the depolarizing fixture; passes when both gradient
/// norms are below 1e-6.
GradCheckResult run_grad_check_depolarizing(const ExperimentSpec& spec);

/// Smallest eigenvalue over Y and every Y_i.
double min_output_eigenvalue(const KrausChannel& ch, const Ensemble& e);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace krausopt
