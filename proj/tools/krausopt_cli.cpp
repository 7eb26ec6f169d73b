// krausopt: Holevo-bound evaluation and Kraus-channel optimization from the
// command line. Exit codes: 0 success, 1 validation failure, 2 numerical
// failure, 3 I/O failure.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "krausopt/errors.hpp"
#include "krausopt/experiments.hpp"
#include "krausopt/holevo.hpp"
#include "krausopt/optimizer.hpp"
#include "krausopt/serialize.hpp"

namespace {

using namespace krausopt;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct Options {
  std::int64_t n = 3;
  std::int64_t m = 4;
  std::size_t k = 5;
  std::optional<std::size_t> p;
  std::optional<double> alpha;
  std::vector<double> alphas{0.2, 0.3, 0.4, 0.5};
  int iters = 100;
  double threshold = 1e-6;
  std::uint64_t seed = 1;
  int trials = 20;
  std::string out;
  std::string format = "csv";
  std::string projection = "per-sweep";
  double eig_floor = kDefaultEigFloor;
  std::vector<std::int64_t> dims{2, 3, 4, 5, 6};
  std::vector<std::size_t> kraus_ranks{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::string> schemes{"channel-opt", "input-opt", "none"};
  std::string channel_path;
  std::string ensemble_path;
  int threads = 1;
  double fd_step = 1e-5;
  bool depolarizing = false;
  bool verbose = false;
  bool n_given = false;
};

OptimConfig optim_config(const Options& o) {
  OptimConfig cfg;
  cfg.step_size = o.alpha.value_or(0.3);
  cfg.max_iters = o.iters;
  cfg.improvement_threshold = o.threshold;
  cfg.eig_floor = o.eig_floor;
  if (o.projection == "per-sweep") {
    cfg.projection = Projection::kPerSweep;
  } else if (o.projection == "per-k") {
    cfg.projection = Projection::kPerK;
  } else {
    throw ValidationError("--projection must be per-sweep or per-k");
  }
  cfg.validate();
  return cfg;
}

ExperimentSpec experiment_spec(const Options& o) {
  ExperimentSpec spec;
  spec.n = o.n;
  spec.m = o.m;
  spec.k = o.k;
  spec.p = o.p;
  spec.trials = o.trials;
  spec.seed = o.seed;
  spec.optim = optim_config(o);
  spec.alphas = o.alpha ? std::vector<double>{*o.alpha} : o.alphas;
  spec.dims.assign(o.dims.begin(), o.dims.end());
  spec.kraus_ranks = o.kraus_ranks;
  if (o.n_given) spec.kraus_sweep_dim = o.n;
  spec.schemes.clear();
  for (const auto& s : o.schemes) spec.schemes.push_back(scheme_from_string(s));
  spec.fd_step = o.fd_step;
  spec.threads = o.threads;
  spec.validate();
  return spec;
}

void emit(const Options& o, const std::string& content) {
  if (o.out.empty()) {
    std::cout << content;
  } else {
    write_text_file(o.out, content);
  }
}

Instance load_instance(const Options& o) {
  const std::size_t p = o.p.value_or(static_cast<std::size_t>(o.n));
  Instance inst = make_instance(o.seed, 0, 0, o.n, o.m, o.k, p);
  if (!o.channel_path.empty()) inst.channel = channel_from_json(read_json_file(o.channel_path));
  if (!o.ensemble_path.empty()) inst.ensemble = ensemble_from_json(read_json_file(o.ensemble_path));
  return inst;
}

json trace_json(const OptimTrace& t) {
  json iters = json::array();
  for (const auto& r : t.iterations) {
    iters.push_back({{"iter", r.iteration},
                     {"holevo_bits", r.holevo_bits},
                     {"grad_norm", r.grad_norm},
                     {"constraint_residual", r.constraint_residual}});
  }
  json j = {{"initial_bits", t.initial_bits},
            {"best_bits", t.best_bits},
            {"best_iteration", t.best_iteration},
            {"iterations_used", t.iterations_used},
            {"status", to_string(t.status)},
            {"iterations", std::move(iters)}};
  if (!t.error.empty()) j["error"] = t.error;
  return j;
}

std::string trace_csv(const OptimTrace& t, const char* residual_column) {
  std::string s = std::string("iter,holevo_bits,grad_norm,") + residual_column + "\n";
  for (const auto& r : t.iterations) {
    s += std::to_string(r.iteration) + ',' + format_real(r.holevo_bits) + ',' + format_real(r.grad_norm) + ',' +
         format_real(r.constraint_residual) + '\n';
  }
  return s;
}

void log_run(const Options& o, const char* what, double ms) {
  if (!o.verbose) return;
  std::cerr << what << ": " << ms << " ms\n";
}

// Multiplication counts per ascent sweep, for the informational log.
void log_complexity(const Options& o, std::int64_t n, std::int64_t m, std::size_t k, std::size_t p) {
  if (!o.verbose) return;
  const auto pp = static_cast<std::int64_t>(p);
  const auto kk = static_cast<std::int64_t>(k);
  std::cerr << "per-iteration cost ~ gradient " << (pp + 1) * m * m * m + pp * m * n * n + pp * m * m * n
            << " + normalization " << n * n * n + kk * m * n * n << " multiplications\n";
}

int cmd_eval(const Options& o) {
  const Instance inst = load_instance(o);
  const HolevoResult r = holevo_bound(inst.channel, inst.ensemble);
  double weighted = 0.0;
  for (std::size_t i = 0; i < inst.ensemble.size(); ++i) {
    weighted += inst.ensemble.probabilities()[i] * r.per_state_entropies_bits[i];
  }
  if (o.format == "json") {
    const json j = {{"holevo_bits", r.bound_bits},
                    {"average_output_entropy_bits", r.average_output_entropy_bits},
                    {"per_state_entropies_bits", r.per_state_entropies_bits},
                    {"channel", channel_to_json(inst.channel)},
                    {"ensemble", ensemble_to_json(inst.ensemble)}};
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, "holevo_bits,average_output_entropy_bits,weighted_state_entropy_bits\n" + format_real(r.bound_bits) +
                "," + format_real(r.average_output_entropy_bits) + "," + format_real(weighted) + "\n");
  }
  return kExitOk;
}

int cmd_optimize_channel(const Options& o) {
  const Instance inst = load_instance(o);
  const auto start = std::chrono::steady_clock::now();
  const ChannelOptResult r = optimize_channel(inst.channel, inst.ensemble, optim_config(o));
  log_complexity(o, inst.channel.input_dim(), inst.channel.output_dim(), inst.channel.kraus_rank(),
                 inst.ensemble.size());
  log_run(o, "optimize-channel",
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  if (o.format == "json") {
    json j = trace_json(r.trace);
    j["channel"] = channel_to_json(r.channel);
    j["ensemble"] = ensemble_to_json(inst.ensemble);
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, trace_csv(r.trace, "cptp_residual"));
  }
  std::cerr << "initial " << format_real(r.trace.initial_bits) << " bits, best " << format_real(r.trace.best_bits)
            << " bits after " << r.trace.iterations_used << " iterations (" << to_string(r.trace.status) << ")\n";
  if (r.trace.status == StopStatus::kError) {
    std::cerr << "error: " << r.trace.error << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_optimize_input(const Options& o) {
  const Instance inst = load_instance(o);
  const auto start = std::chrono::steady_clock::now();
  const InputOptResult r = optimize_input(inst.channel, inst.ensemble, optim_config(o));
  log_run(o, "optimize-input",
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  if (o.format == "json") {
    json j = trace_json(r.trace);
    j["channel"] = channel_to_json(inst.channel);
    j["ensemble"] = ensemble_to_json(r.ensemble);
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, trace_csv(r.trace, "constraint_residual"));
  }
  std::cerr << "initial " << format_real(r.trace.initial_bits) << " bits, best " << format_real(r.trace.best_bits)
            << " bits after " << r.trace.iterations_used << " iterations (" << to_string(r.trace.status) << ")\n";
  if (r.trace.status == StopStatus::kError) {
    std::cerr << "error: " << r.trace.error << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_convergence(const Options& o) {
  const ExperimentSpec spec = experiment_spec(o);
  const auto start = std::chrono::steady_clock::now();
  const ConvergenceResult r = run_convergence(spec);
  log_complexity(o, spec.n, spec.m, spec.k, spec.ensemble_size(spec.n));
  log_run(o, "convergence", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  const std::string summary = r.summary().dump(2) + "\n";
  if (o.format == "json") {
    emit(o, summary);
    return kExitOk;
  }
  emit(o, r.csv());
  if (o.out.empty()) {
    std::cerr << summary;
  } else {
    write_text_file(o.out + ".summary.json", summary);
  }
  return kExitOk;
}

int cmd_sweep(const Options& o, bool dims) {
  const ExperimentSpec spec = experiment_spec(o);
  const auto start = std::chrono::steady_clock::now();
  const SweepResult r = dims ? run_dim_sweep(spec) : run_kraus_sweep(spec);
  log_run(o, dims ? "dim-sweep" : "kraus-sweep",
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  emit(o, o.format == "json" ? r.to_json().dump(2) + "\n" : r.csv());
  return kExitOk;
}

int cmd_grad_check(const Options& o) {
  const ExperimentSpec spec = experiment_spec(o);
  const GradCheckResult r = o.depolarizing ? run_grad_check_depolarizing(spec) : run_grad_check(spec);
  emit(o, r.report());
  std::cerr << (r.passed() ? "grad-check passed" : "grad-check FAILED") << " (" << r.points.size() << " points)\n";
  return r.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holevo bound evaluation and CPTP-constrained Kraus channel optimization"};
  app.require_subcommand(1);
  Options o;

  app.add_option("--n", o.n, "Input dimension N")->check(CLI::PositiveNumber);
  app.add_option("--m", o.m, "Output dimension M")->check(CLI::PositiveNumber);
  app.add_option("--k", o.k, "Number of Kraus operators K")->check(CLI::PositiveNumber);
  app.add_option("--p", o.p, "Ensemble size P (default N)")->check(CLI::PositiveNumber);
  app.add_option("--alpha", o.alpha, "Step size (overrides --alphas)");
  app.add_option("--alphas", o.alphas, "Step sizes for the convergence scenario")->delimiter(',');
  app.add_option("--iters", o.iters, "Maximum iterations");
  app.add_option("--threshold", o.threshold, "Stop when the per-iteration gain (bits) falls below this");
  app.add_option("--seed", o.seed, "Base RNG seed");
  app.add_option("--trials", o.trials, "Trials per sweep point");
  app.add_option("--out", o.out, "Output path (stdout when omitted)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--projection", o.projection, "CPTP normalization granularity")
      ->check(CLI::IsMember({"per-sweep", "per-k"}));
  app.add_option("--eig-floor", o.eig_floor, "Eigenvalue clamp for log and inverse square root");
  app.add_option("--dims", o.dims, "N = M values for dim-sweep")->delimiter(',');
  app.add_option("--kraus-ranks", o.kraus_ranks, "K values for kraus-sweep")->delimiter(',');
  app.add_option("--schemes", o.schemes, "Schemes for sweeps: channel-opt,input-opt,none")->delimiter(',');
  app.add_option("--channel", o.channel_path, "Channel JSON fixture");
  app.add_option("--ensemble", o.ensemble_path, "Ensemble JSON fixture");
  app.add_option("--threads", o.threads, "Worker threads for independent trials");
  app.add_option("--fd-step", o.fd_step, "Finite-difference step for grad-check");
  app.add_flag("--depolarizing", o.depolarizing, "grad-check at the constant-output channel");
  app.add_flag("-v,--verbose", o.verbose, "Log timings and cost estimates to stderr");

  auto* eval = app.add_subcommand("eval", "Holevo bound of one channel/ensemble pair");
  auto* opt_ch = app.add_subcommand("optimize-channel", "Projected gradient ascent over the Kraus operators");
  auto* opt_in = app.add_subcommand("optimize-input", "Ascent over the input ensemble with the channel fixed");
  auto* conv = app.add_subcommand("convergence", "Per-iteration traces for several step sizes");
  auto* dim = app.add_subcommand("dim-sweep", "Scheme comparison over N = M");
  auto* kraus = app.add_subcommand("kraus-sweep", "Scheme comparison over K");
  auto* grad = app.add_subcommand("grad-check", "Analytic vs finite-difference gradient");
  for (auto* sub : {eval, opt_ch, opt_in, conv, dim, kraus, grad}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  o.n_given = app.count("--n") > 0;

  try {
    if (*eval) return cmd_eval(o);
    if (*opt_ch) return cmd_optimize_channel(o);
    if (*opt_in) return cmd_optimize_input(o);
    if (*conv) return cmd_convergence(o);
    if (*dim) return cmd_sweep(o, true);
    if (*kraus) return cmd_sweep(o, false);
    if (*grad) return cmd_grad_check(o);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
