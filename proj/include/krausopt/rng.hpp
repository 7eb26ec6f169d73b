#pragma once

#include <cstdint>
#include <random>

#include "krausopt/matfun.hpp"

namespace krausopt {

/// Purposes that get their own independent stream within a trial.
enum class StreamPurpose : std::uint64_t {
  kEnsemble = 1,
  kChannel = 2,
  kPerturbation = 3,
};

/// Deterministic generator built on std::mt19937_64, whose output sequence
/// is fixed by the C++ standard. The floating-point conversions below are
/// written out explicitly because the std distributions are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Generator for (seed, trial, purpose); streams are decorrelated by
  /// running the triple through splitmix64.
  static Rng for_stream(std::uint64_t seed, std::uint64_t trial, StreamPurpose purpose);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal via Box-Muller.
  double normal();

  /// CN(0, 1): real and imaginary parts independent N(0, 1/2).
  Complex complex_normal();

  ComplexMatrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace krausopt
