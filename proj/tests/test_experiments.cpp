#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

#include "krausopt/errors.hpp"
#include "krausopt/experiments.hpp"

using namespace krausopt;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("random_ensemble") {
  SUBCASE("single member has probability one") {
    const Ensemble e = random_ensemble(3, 1, std::uint64_t{5});
    CHECK(e.probabilities()[0] == 1.0);
  }
  SUBCASE("deterministic per seed") {
    const Ensemble a = random_ensemble(3, 3, std::uint64_t{6});
    const Ensemble b = random_ensemble(3, 3, std::uint64_t{6});
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.probabilities()[i] == b.probabilities()[i]);
      CHECK((a.states()[i].matrix() - b.states()[i].matrix()).norm() == 0.0);
    }
  }
  SUBCASE("probability means near 1/3") {
    Rng rng(7);
    std::vector<double> sums(3, 0.0);
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
      const Ensemble e = random_ensemble(3, 3, rng);
      for (std::size_t i = 0; i < 3; ++i) sums[i] += e.probabilities()[i];
    }
    for (double s : sums) {
      CHECK(s / draws >= 0.30);
      CHECK(s / draws <= 0.37);
    }
  }
}

TEST_CASE("Rng conversions") {
  Rng rng(8);
  double lo = 1.0, hi = 0.0, mean = 0.0, sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const Complex z = rng.complex_normal();
    mean += z.real();
    sq += std::norm(z);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(mean / draws) < 0.01);
  CHECK(sq / draws == doctest::Approx(1.0).epsilon(0.01));  // E|z|^2 = 1 for CN(0, 1)

  Rng a = Rng::for_stream(1, 0, StreamPurpose::kChannel);
  Rng b = Rng::for_stream(1, 0, StreamPurpose::kEnsemble);
  Rng c = Rng::for_stream(1, 1, StreamPurpose::kChannel);
  const auto x = a.next_u64();
  CHECK(x != b.next_u64());
  CHECK(x != c.next_u64());
}

TEST_CASE("run_convergence") {
  ExperimentSpec spec;
  spec.trials = 1;
  spec.optim.max_iters = 1;
  SUBCASE("one data row per step size") {
    const ConvergenceResult r = run_convergence(spec);
    const std::string csv = r.csv();
    CHECK(csv.rfind("trial,alpha,iter,holevo_bits,grad_norm,cptp_residual\n", 0) == 0);
    CHECK(count_lines(csv) == 1 + spec.alphas.size());
  }
  SUBCASE("byte-identical reruns, independent of thread count") {
    spec.trials = 4;
    spec.optim.max_iters = 20;
    const std::string first = run_convergence(spec).csv();
    CHECK(first == run_convergence(spec).csv());
    spec.threads = 3;
    CHECK(first == run_convergence(spec).csv());
  }
}

TEST_CASE("sweeps") {
  ExperimentSpec spec;
  spec.trials = 1;
  SUBCASE("single dimension, no optimization") {
    spec.dims = {3};
    spec.schemes = {Scheme::kNone};
    const SweepResult r = run_dim_sweep(spec);
    CHECK(r.rows.size() == 1);
    CHECK(count_lines(r.csv()) == 2);
    CHECK(r.csv().rfind("dim,scheme,trials,mean_bits,std_bits\n", 0) == 0);
    CHECK_THROWS_AS(r.row(4, Scheme::kNone), ValidationError);
  }
  SUBCASE("unitary channels cannot be improved") {
    spec.trials = 3;
    spec.kraus_ranks = {1};
    spec.schemes = {Scheme::kChannelOpt, Scheme::kNone};
    const SweepResult r = run_kraus_sweep(spec);
    CHECK(std::abs(r.row(1, Scheme::kChannelOpt).mean_bits - r.row(1, Scheme::kNone).mean_bits) < 1e-6);
  }
  SUBCASE("rerun determinism") {
    spec.trials = 2;
    spec.kraus_ranks = {2, 3};
    CHECK(run_kraus_sweep(spec).csv() == run_kraus_sweep(spec).csv());
    spec.dims = {2, 3};
    CHECK(run_dim_sweep(spec).to_json().dump() == run_dim_sweep(spec).to_json().dump());
  }
  SUBCASE("scheme names") {
    for (Scheme s : {Scheme::kChannelOpt, Scheme::kInputOpt, Scheme::kNone}) {
      CHECK(scheme_from_string(to_string(s)) == s);
    }
    CHECK_THROWS_AS(scheme_from_string("bogus"), ValidationError);
  }
}

TEST_CASE("run_grad_check") {
  ExperimentSpec spec;
  spec.trials = 3;
  SUBCASE("random interior points pass") {
    const GradCheckResult r = run_grad_check(spec);
    CHECK(r.passed());
    for (const auto& pt : r.points) {
      CHECK(pt.min_output_eigenvalue > 1e-6);
      CHECK(pt.cosine > 1.0 - 1e-6);
    }
    CHECK(count_lines(r.report()) == 4);
  }
  SUBCASE("constant channel has a vanishing gradient") {
    const GradCheckResult r = run_grad_check_depolarizing(spec);
    CHECK(r.passed());
    CHECK(r.points[0].analytic_norm < 1e-6);
    CHECK(r.points[0].fd_norm < 1e-6);
  }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(parallel_for(8, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw NumericalError("boom");
                               }),
                  NumericalError);
}
