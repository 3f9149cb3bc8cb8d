#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace typent {

/// Streaming mean/variance (Welford), mergeable with Chan's pairwise update.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

MonteCarloEstimate to_estimate(const RunningStats& s, std::uint64_t seed);

/// |a - b| <= k * sqrt(se_a^2 + se_b^2), with a floor for exact matches.
bool within_std_errors(double value, double reference, double std_error, double k = 3.0);

struct Histogram {
  std::vector<double> edges;           ///< bins + 1 edges
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  std::string binning;                 ///< "freedman-diaconis" or "fixed"

  /// Normalized density in bin i (integrates to 1 over all bins).
  double density(std::size_t i) const;
};

/// Freedman-Diaconis bin width 2 IQR n^{-1/3} unless `bins` is given.
Histogram make_histogram(std::vector<double> values, std::optional<std::size_t> bins = {});

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `sorted` (ascending).
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Same, for a CDF evaluated at all sample points at once (ascending order).
double ks_distance_from_values(std::span<const double> cdf_at_sorted_samples);

}  // namespace typent
