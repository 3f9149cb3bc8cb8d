#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace typent {

/// Name of the Gaussian variate method, recorded in experiment metadata.
inline constexpr std::string_view kGaussianMethod = "marsaglia-polar";
/// Name and version of the master-seed to sub-stream derivation.
inline constexpr std::string_view kSeedDerivation = "splitmix64-counter-v1";
inline constexpr std::string_view kEngineName = "mt19937_64";

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random stream. All samplers in the library draw from one of these;
/// there is no global randomness.
///
/// Uniform and Gaussian variates are produced by code in this class rather
/// than by <random> distributions, whose output is implementation-defined, so
/// a given seed yields the same numbers on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream number `index` derived from `master`
  /// (splitmix64-counter-v1): engine seed = splitmix64(splitmix64(master) + index).
  static Rng substream(std::uint64_t master, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Unbiased (rejection sampling).
  std::uint64_t index(std::uint64_t n);

  /// Standard normal N(0, 1).
  double normal();

  /// Standard complex normal: real and imaginary parts i.i.d. N(0, 1/2).
  std::complex<double> complex_normal();

  double exponential(double mean);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace typent
