#include "typent/stats.hpp"

#include "typent/errors.hpp"

#include <algorithm>
#include <cmath>

namespace typent {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningStats::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::std_error() const {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

MonteCarloEstimate to_estimate(const RunningStats& s, std::uint64_t seed) {
  return {s.mean(), s.std_error(), s.count(), seed};
}

bool within_std_errors(double value, double reference, double std_error, double k) {
  return std::abs(value - reference) <= k * std_error + 1e-12 * std::max(1.0, std::abs(reference));
}

double Histogram::density(std::size_t i) const {
  const double width = edges[i + 1] - edges[i];
  if (total == 0 || width <= 0.0) return 0.0;
  return static_cast<double>(counts[i]) / (static_cast<double>(total) * width);
}

Histogram make_histogram(std::vector<double> values, std::optional<std::size_t> bins) {
  if (values.empty()) throw InvalidInput("make_histogram: no values");
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  Histogram h;
  std::size_t nbins = 1;
  if (bins) {
    if (*bins == 0) throw InvalidInput("make_histogram: bin count must be positive");
    nbins = *bins;
    h.binning = "fixed";
  } else {
    h.binning = "freedman-diaconis";
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(values.size() - 1);
      const auto i = static_cast<std::size_t>(pos);
      const double f = pos - static_cast<double>(i);
      return i + 1 < values.size() ? values[i] * (1 - f) + values[i + 1] * f : values[i];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
    if (width > 0.0 && hi > lo) {
      nbins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 1, 10000);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  h.edges.resize(nbins + 1);
  for (std::size_t i = 0; i <= nbins; ++i) {
    h.edges[i] = lo + span * static_cast<double>(i) / static_cast<double>(nbins);
  }
  h.counts.assign(nbins, 0);
  for (double v : values) {
    auto i = static_cast<std::size_t>((v - lo) / span * static_cast<double>(nbins));
    h.counts[std::min(i, nbins - 1)] += 1;
  }
  h.total = values.size();
  return h;
}

double ks_distance_from_values(std::span<const double> cdf) {
  const double n = static_cast<double>(cdf.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const double f = std::clamp(cdf[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  std::vector<double> f(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) f[i] = cdf(sorted[i]);
  return ks_distance_from_values(f);
}

}  // namespace typent
