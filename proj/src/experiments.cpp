#include "krausopt/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "krausopt/errors.hpp"
#include "krausopt/holevo.hpp"
#include "krausopt/serialize.hpp"

namespace krausopt {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  // Sample standard deviation; zero for a single trial.
  const double denom = v.size() > 1 ? static_cast<double>(v.size() - 1) : 1.0;
  return {mean, std::sqrt(var / denom)};
}

SweepResult run_sweep(const ExperimentSpec& spec, const std::string& axis,
                      const std::vector<std::int64_t>& points,
                      const std::function<Instance(std::int64_t point, int trial)>& make) {
  struct Job {
    std::size_t point_index;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    for (int t = 0; t < spec.trials; ++t) jobs.push_back({pi, t});
  }
  const std::size_t ns = spec.schemes.size();
  std::vector<TrialRecord> out(jobs.size() * ns);
  parallel_for(jobs.size(), spec.threads, [&](std::size_t j) {
    const Instance inst = make(points[jobs[j].point_index], jobs[j].trial);
    for (std::size_t s = 0; s < ns; ++s) {
      TrialRecord rec = run_scheme(spec.schemes[s], inst, spec.optim);
      rec.seed = spec.seed;
      rec.trial = jobs[j].trial;
      out[j * ns + s] = rec;
    }
  });

  SweepResult result;
  result.axis = axis;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<TrialRecord> recs;
      std::vector<double> finals;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].point_index != pi) continue;
        recs.push_back(out[j * ns + s]);
        finals.push_back(recs.back().final_bits);
      }
      const auto [mean, sd] = mean_std(finals);
      result.rows.push_back({points[pi], spec.schemes[s], static_cast<int>(finals.size()), mean, sd});
      result.records.push_back(std::move(recs));
    }
  }
  return result;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kChannelOpt: return "channel-opt";
    case Scheme::kInputOpt: return "input-opt";
    case Scheme::kNone: return "none";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "channel-opt") return Scheme::kChannelOpt;
  if (s == "input-opt") return Scheme::kInputOpt;
  if (s == "none") return Scheme::kNone;
  throw ValidationError("unknown scheme '" + s + "' (expected channel-opt, input-opt or none)");
}

void ExperimentSpec::validate() const {
  if (n < 1 || m < 1 || k < 1) throw ValidationError("N, M and K must be positive");
  if (p && *p < 1) throw ValidationError("P must be positive");
  if (trials < 1) throw ValidationError("trials must be positive");
  if (threads < 1) throw ValidationError("threads must be positive");
  if (alphas.empty() || dims.empty() || kraus_ranks.empty() || schemes.empty()) {
    throw ValidationError("sweep lists must be nonempty");
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 10.0)) throw ValidationError("step sizes must lie in (0, 10]");
  }
  for (auto d : dims) {
    if (d < 1) throw ValidationError("sweep dimensions must be positive");
  }
  for (auto kr : kraus_ranks) {
    if (kr < 1) throw ValidationError("Kraus ranks must be positive");
  }
  optim.validate();
}

Ensemble random_ensemble(Eigen::Index n, std::size_t p, Rng& rng) {
  if (n < 1 || p < 1) throw ValidationError("random_ensemble: N and P must be positive");
  std::vector<double> probs(p);
  double total = 0.0;
  for (auto& u : probs) {
    u = rng.uniform();
    total += u;
  }
  for (auto& u : probs) u /= total;
  std::vector<PureState> states;
  states.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    ComplexVector x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = rng.complex_normal();
    states.push_back(PureState::normalized(x));
  }
  return Ensemble::from_pure(std::move(probs), states, kInternalTol);
}

Ensemble random_ensemble(Eigen::Index n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  return random_ensemble(n, p, rng);
}

Instance make_instance(std::uint64_t seed, std::uint64_t point, std::uint64_t trial, Eigen::Index n,
                       Eigen::Index m, std::size_t k, std::size_t p) {
  const std::uint64_t base = point == 0 ? seed : splitmix64(seed ^ (point * 0xd1b54a32d192ed03ULL));
  Rng ens_rng = Rng::for_stream(base, trial, StreamPurpose::kEnsemble);
  Rng ch_rng = Rng::for_stream(base, trial, StreamPurpose::kChannel);
  Ensemble e = random_ensemble(n, p, ens_rng);
  KrausChannel ch = random_channel(n, m, k, ch_rng);
  return {std::move(ch), std::move(e)};
}

TrialRecord run_scheme(Scheme scheme, const Instance& inst, const OptimConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.scheme = scheme;
  OptimConfig traced = cfg;
  traced.record_trace = true;
  auto worst = [](const OptimTrace& t, double start) {
    for (const auto& it : t.iterations) start = std::max(start, it.constraint_residual);
    return start;
  };
  switch (scheme) {
    case Scheme::kNone: {
      rec.initial_bits = rec.final_bits = holevo_bound(inst.channel, inst.ensemble).bound_bits;
      rec.status = StopStatus::kThresholdReached;
      rec.max_residual = inst.channel.residual();
      break;
    }
    case Scheme::kChannelOpt: {
      const ChannelOptResult r = optimize_channel(inst.channel, inst.ensemble, traced);
      rec.max_residual = worst(r.trace, inst.channel.residual());
      rec.initial_bits = r.trace.initial_bits;
      rec.final_bits = r.trace.best_bits;
      rec.iterations = r.trace.iterations_used;
      rec.status = r.trace.status;
      break;
    }
    case Scheme::kInputOpt: {
      const InputOptResult r = optimize_input(inst.channel, inst.ensemble, traced);
      rec.max_residual = worst(r.trace, inst.channel.residual());
      rec.initial_bits = r.trace.initial_bits;
      rec.final_bits = r.trace.best_bits;
      rec.iterations = r.trace.iterations_used;
      rec.status = r.trace.status;
      break;
    }
  }
  rec.runtime_ms = elapsed_ms(start);
  return rec;
}

std::string ConvergenceResult::csv() const {
  std::ostringstream os;
  os << "trial,alpha,iter,holevo_bits,grad_norm,cptp_residual\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      for (const auto& rec : traces[t][a].iterations) {
        os << t << ',' << format_real(alphas[a]) << ',' << rec.iteration << ','
           << format_real(rec.holevo_bits) << ',' << format_real(rec.grad_norm) << ','
           << format_real(rec.constraint_residual) << '\n';
      }
    }
  }
  return os.str();
}

std::vector<double> ConvergenceResult::final_bits(std::size_t alpha_index) const {
  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& per_trial : traces) out.push_back(per_trial.at(alpha_index).best_bits);
  return out;
}

nlohmann::json ConvergenceResult::summary() const {
  nlohmann::json per_alpha = nlohmann::json::array();
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const std::vector<double> finals = final_bits(a);
    const auto [mean, sd] = mean_std(finals);
    double max_residual = 0.0;
    for (const auto& per_trial : traces) {
      for (const auto& rec : per_trial[a].iterations) max_residual = std::max(max_residual, rec.constraint_residual);
    }
    per_alpha.push_back({{"alpha", alphas[a]},
                         {"median_final_bits", median(finals)},
                         {"mean_final_bits", mean},
                         {"std_final_bits", sd},
                         {"max_cptp_residual", max_residual}});
  }
  // Fraction of trials whose final values across step sizes span at most 0.2 bits.
  int robust = 0;
  for (const auto& per_trial : traces) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& tr : per_trial) {
      lo = std::min(lo, tr.best_bits);
      hi = std::max(hi, tr.best_bits);
    }
    if (hi - lo <= 0.2) ++robust;
  }
  return {{"scenario", "convergence"},
          {"trials", traces.size()},
          {"per_alpha", std::move(per_alpha)},
          {"step_size_spread_le_0.2_fraction",
           traces.empty() ? 0.0 : static_cast<double>(robust) / static_cast<double>(traces.size())}};
}

ConvergenceResult run_convergence(const ExperimentSpec& spec) {
  spec.validate();
  ConvergenceResult result;
  result.alphas = spec.alphas;
  result.traces.resize(static_cast<std::size_t>(spec.trials));
  OptimConfig cfg = spec.optim;
  cfg.record_trace = true;
  parallel_for(result.traces.size(), spec.threads, [&](std::size_t t) {
    const Instance inst = make_instance(spec.seed, 0, t, spec.n, spec.m, spec.k, spec.ensemble_size(spec.n));
    result.traces[t] = sweep_step_sizes(inst.channel, inst.ensemble, spec.alphas, cfg);
  });
  return result;
}

std::string SweepResult::csv() const {
  std::ostringstream os;
  os << axis << ",scheme,trials,mean_bits,std_bits\n";
  for (const auto& r : rows) {
    os << r.point << ',' << to_string(r.scheme) << ',' << r.trials << ',' << format_real(r.mean_bits) << ','
       << format_real(r.std_bits) << '\n';
  }
  return os.str();
}

nlohmann::json SweepResult::to_json() const {
  nlohmann::json jrows = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& rec : records[i]) {
      trials.push_back({{"seed", rec.seed},
                        {"trial", rec.trial},
                        {"scheme", to_string(rec.scheme)},
                        {"initial_bits", rec.initial_bits},
                        {"final_bits", rec.final_bits},
                        {"iterations", rec.iterations},
                        {"max_residual", rec.max_residual},
                        {"status", to_string(rec.status)}});
    }
    jrows.push_back({{axis, rows[i].point},
                     {"scheme", to_string(rows[i].scheme)},
                     {"trials", rows[i].trials},
                     {"mean_bits", rows[i].mean_bits},
                     {"std_bits", rows[i].std_bits},
                     {"records", std::move(trials)}});
  }
  return {{"axis", axis}, {"rows", std::move(jrows)}};
}

const SweepRow& SweepResult::row(std::int64_t point, Scheme scheme) const {
  for (const auto& r : rows) {
    if (r.point == point && r.scheme == scheme) return r;
  }
  throw ValidationError("sweep has no row for " + axis + "=" + std::to_string(point) + ", scheme " +
                        to_string(scheme));
}

SweepResult run_dim_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::int64_t> points(spec.dims.begin(), spec.dims.end());
  return run_sweep(spec, "dim", points, [&](std::int64_t d, int trial) {
    return make_instance(spec.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(trial), d, d,
                         spec.k, spec.ensemble_size(d));
  });
}

SweepResult run_kraus_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<std::int64_t> points;
  for (auto kr : spec.kraus_ranks) points.push_back(static_cast<std::int64_t>(kr));
  const Eigen::Index d = spec.kraus_sweep_dim;
  // Trial t shares its ensemble across every K; only the channel is redrawn.
  return run_sweep(spec, "k", points, [&](std::int64_t kr, int trial) {
    Rng ens_rng = Rng::for_stream(spec.seed, static_cast<std::uint64_t>(trial), StreamPurpose::kEnsemble);
    Ensemble e = random_ensemble(d, spec.ensemble_size(d), ens_rng);
    Rng ch_rng = Rng::for_stream(splitmix64(spec.seed ^ (static_cast<std::uint64_t>(kr) * 0xd1b54a32d192ed03ULL)),
                                 static_cast<std::uint64_t>(trial), StreamPurpose::kChannel);
    return Instance{random_channel(d, d, static_cast<std::size_t>(kr), ch_rng), std::move(e)};
  });
}

double min_output_eigenvalue(const KrausChannel& ch, const Ensemble& e) {
  const EnsembleOutput out = apply_ensemble(ch, e);
  double lo = eig_hermitian(out.average.matrix()).values[0];
  for (const auto& y : out.per_state) lo = std::min(lo, eig_hermitian(y.matrix()).values[0]);
  return lo;
}

namespace {

GradCheckPoint check_point(const KrausChannel& ch, const Ensemble& e, double step, double eig_floor) {
  GradCheckPoint pt;
  const KrausGradient analytic = holevo_gradient(ch, e, eig_floor);
  const KrausGradient fd = finite_diff_gradient(ch, e, step);
  const KrausGradient fd_half = finite_diff_gradient(ch, e, step / 2);
  pt.cosine = cosine_similarity(analytic, fd);
  const double to_bits = 1.0 / std::numbers::ln2;
  for (std::size_t k = 0; k < fd.per_operator.size(); ++k) {
    pt.max_abs_deviation.push_back(
        (analytic.per_operator[k] * to_bits - fd.per_operator[k]).cwiseAbs().maxCoeff());
  }
  pt.analytic_norm = analytic.frobenius_norm();
  pt.fd_norm = fd.frobenius_norm();
  pt.fd_halving_delta = (fd.flatten() - fd_half.flatten()).norm();
  pt.min_output_eigenvalue = min_output_eigenvalue(ch, e);
  return pt;
}

}  // namespace

GradCheckResult run_grad_check(const ExperimentSpec& spec) {
  spec.validate();
  GradCheckResult result;
  result.points.resize(static_cast<std::size_t>(spec.trials));
  parallel_for(result.points.size(), spec.threads, [&](std::size_t t) {
    // Redraw (bounded) until the point is interior so the log clamp is inactive.
    for (std::uint64_t attempt = 0;; ++attempt) {
      const Instance inst = make_instance(spec.seed, attempt, t, spec.n, spec.m, spec.k, spec.ensemble_size(spec.n));
      if (min_output_eigenvalue(inst.channel, inst.ensemble) > 1e-6 || attempt == 99) {
        result.points[t] = check_point(inst.channel, inst.ensemble, spec.fd_step, spec.optim.eig_floor);
        return;
      }
    }
  });
  return result;
}

GradCheckResult run_grad_check_depolarizing(const ExperimentSpec& spec) {
  spec.validate();
  Rng rng = Rng::for_stream(spec.seed, 0, StreamPurpose::kEnsemble);
  const Ensemble e = random_ensemble(spec.n, spec.ensemble_size(spec.n), rng);
  GradCheckResult result;
  result.points.push_back(check_point(depolarizing_to_max_mixed(spec.n, spec.m), e, spec.fd_step, spec.optim.eig_floor));
  result.cosine_threshold = -2.0;  // direction is undefined at a zero gradient; norms decide
  return result;
}

bool GradCheckResult::passed() const {
  for (const auto& pt : points) {
    if (cosine_threshold < -1.0) {
      if (pt.analytic_norm >= 1e-6 || pt.fd_norm >= 1e-6) return false;
    } else if (!(pt.cosine > cosine_threshold)) {
      return false;
    }
  }
  return true;
}

std::string GradCheckResult::report() const {
  std::ostringstream os;
  os << "point,cosine,one_minus_cosine,analytic_norm,fd_norm,max_abs_deviation,fd_halving_delta,min_output_eig\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const double dev = pt.max_abs_deviation.empty()
                           ? 0.0
                           : *std::max_element(pt.max_abs_deviation.begin(), pt.max_abs_deviation.end());
    os << i << ',' << format_real(pt.cosine) << ',' << format_real(1.0 - pt.cosine) << ','
       << format_real(pt.analytic_norm) << ',' << format_real(pt.fd_norm) << ',' << format_real(dev) << ','
       << format_real(pt.fd_halving_delta) << ',' << format_real(pt.min_output_eigenvalue) << '\n';
  }
  return os.str();
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace krausopt
