#include "typent/spectral.hpp"

#include "typent/errors.hpp"
#include "typent/haar.hpp"
#include "typent/parallel.hpp"
#include "typent/rng.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace typent {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double integrate_mp(double lo, double hi, BipartiteDims dims) {
  const MpEdges e = mp_edges(dims);
  lo = std::max(lo, e.lower);
  hi = std::min(hi, e.upper);
  if (!(hi > lo)) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double p) { return marchenko_pastur_density(p, dims); };
  return integrator.integrate(f, lo, hi, 1e-10);
}

}  // namespace

BipartiteDims BipartiteDims::make(std::size_t dim_a, std::size_t dim_b) {
  if (dim_a == 0 || dim_b < dim_a) {
    throw InvalidInput(fmt::format("BipartiteDims: need 1 <= N_A <= N_B, got {}x{}", dim_a, dim_b));
  }
  return {dim_a, dim_b};
}

double log_normalization(BipartiteDims dims) {
  const double na = static_cast<double>(dims.dim_a);
  const double nb = static_cast<double>(dims.dim_b);
  double s = 0.0;
  for (std::size_t j = 0; j < dims.dim_a; ++j) {
    const double jj = static_cast<double>(j);
    s += std::lgamma(nb - jj) + std::lgamma(na - jj + 1.0);
  }
  return s - std::lgamma(na * nb);
}

double log_joint_density(std::span<const double> p, BipartiteDims dims) {
  if (p.size() != dims.dim_a) {
    throw InvalidInput(fmt::format("log_joint_density: {} values for N_A = {}", p.size(), dims.dim_a));
  }
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidInput("log_joint_density: negative coefficient");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-8) {
    throw InvalidInput(fmt::format("log_joint_density: coefficients sum to {}", sum));
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const double external = static_cast<double>(dims.dim_b - dims.dim_a);
  double log_density = -log_normalization(dims);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (external > 0.0) {
      if (p[i] == 0.0) return kNegInf;
      log_density += external * std::log(p[i]);
    }
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double d = std::abs(p[i] - p[j]);
      if (d == 0.0) return kNegInf;
      log_density += 2.0 * std::log(d);
    }
  }
  return log_density;
}

double page_average_entropy(BipartiteDims dims) {
  const std::size_t na = dims.dim_a;
  const std::size_t nb = dims.dim_b;
  double harmonic = 0.0;
  // Smallest terms first.
  for (std::size_t k = na * nb; k > nb; --k) harmonic += 1.0 / static_cast<double>(k);
  return (harmonic - static_cast<double>(na - 1) / (2.0 * static_cast<double>(nb))) / kLn2;
}

double page_lower_bound(BipartiteDims dims) {
  const double na = static_cast<double>(dims.dim_a);
  const double nb = static_cast<double>(dims.dim_b);
  return std::log2(na) - na / (nb * kLn2);
}

double average_purity(BipartiteDims dims) {
  const double na = static_cast<double>(dims.dim_a);
  const double nb = static_cast<double>(dims.dim_b);
  return (na + nb) / (na * nb + 1.0);
}

double concentration_bound(BipartiteDims dims, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("concentration_bound: alpha must be positive");
  if (dims.dim_a < 2) throw InvalidInput("concentration_bound: requires N_A >= 2");
  const double na = static_cast<double>(dims.dim_a);
  const double nb = static_cast<double>(dims.dim_b);
  const double log_na = std::log2(na);
  const double exponent =
      -(na * nb - 1.0) * alpha * alpha / (8.0 * std::numbers::pi * std::numbers::pi * kLn2 * log_na * log_na);
  return std::clamp(std::exp(exponent), 0.0, 1.0);
}

MpEdges mp_edges(BipartiteDims dims) {
  const double ia = 1.0 / std::sqrt(static_cast<double>(dims.dim_a));
  const double ib = 1.0 / std::sqrt(static_cast<double>(dims.dim_b));
  return {(ia - ib) * (ia - ib), (ia + ib) * (ia + ib)};
}

double marchenko_pastur_density(double p, BipartiteDims dims) {
  const MpEdges e = mp_edges(dims);
  if (!(p > 0.0) || p < e.lower || p > e.upper) return 0.0;
  const double na = static_cast<double>(dims.dim_a);
  const double nb = static_cast<double>(dims.dim_b);
  return na * nb / (2.0 * std::numbers::pi) * std::sqrt((p - e.lower) * (e.upper - p)) / p;
}

double marchenko_pastur_cdf(double x, BipartiteDims dims) {
  const MpEdges e = mp_edges(dims);
  if (x <= e.lower) return 0.0;
  if (x >= e.upper) return 1.0;
  return std::clamp(integrate_mp(e.lower, x, dims) / static_cast<double>(dims.dim_a), 0.0, 1.0);
}

std::vector<double> marchenko_pastur_cdf_sorted(std::span<const double> sorted, BipartiteDims dims) {
  const MpEdges e = mp_edges(dims);
  const double na = static_cast<double>(dims.dim_a);
  std::vector<double> out(sorted.size());
  double acc = 0.0;
  double prev = e.lower;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = std::clamp(sorted[i], e.lower, e.upper);
    if (x > prev) {
      acc += integrate_mp(prev, x, dims);
      prev = x;
    }
    out[i] = sorted[i] >= e.upper ? 1.0 : std::clamp(acc / na, 0.0, 1.0);
  }
  return out;
}

std::vector<double> marchenko_pastur_quantiles(BipartiteDims dims, std::size_t count) {
  const MpEdges e = mp_edges(dims);
  std::vector<double> q(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double target = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    double lo = e.lower;
    double hi = e.upper;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * e.upper; ++it) {
      const double mid = 0.5 * (lo + hi);
      (marchenko_pastur_cdf(mid, dims) < target ? lo : hi) = mid;
    }
    q[i] = 0.5 * (lo + hi);
  }
  return q;
}

EstimateResult estimate(const SpectrumObservable& observable, BipartiteDims dims,
                        std::size_t n_samples, std::uint64_t seed, EstimateOptions options) {
  if (n_samples < 2) throw InvalidInput("estimate: n_samples must be at least 2");
  const std::size_t chunks = chunk_count(n_samples);
  std::vector<RunningStats> partial(chunks);
  std::vector<double> values(options.histogram ? n_samples : 0);
  for_each_chunk(n_samples, options.threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      const PureState psi = sample_random_pure_state(dims.dim_a, dims.dim_b, rng);
      const double v = observable(schmidt_spectrum(psi));
      partial[c.index].add(v);
      if (options.histogram) values[i] = v;
    }
  });
  RunningStats total;
  for (const RunningStats& s : partial) total.merge(s);
  EstimateResult result{to_estimate(total, seed), std::nullopt};
  if (options.histogram) result.histogram = make_histogram(std::move(values), options.bins);
  return result;
}

std::vector<double> pooled_spectrum(BipartiteDims dims, std::size_t n_states, std::uint64_t seed,
                                    std::size_t threads) {
  std::vector<double> pooled(n_states * dims.dim_a);
  for_each_chunk(n_states, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      const EntanglementSpectrum s =
          schmidt_spectrum(sample_random_pure_state(dims.dim_a, dims.dim_b, rng));
      std::copy(s.probs().begin(), s.probs().end(), pooled.begin() + static_cast<std::ptrdiff_t>(i * dims.dim_a));
    }
  });
  std::sort(pooled.begin(), pooled.end());
  return pooled;
}

double spectrum_vs_mp_distance(BipartiteDims dims, std::size_t n_states, std::uint64_t seed,
                               std::size_t threads) {
  const std::vector<double> pooled = pooled_spectrum(dims, n_states, seed, threads);
  return ks_distance_from_values(marchenko_pastur_cdf_sorted(pooled, dims));
}

}  // namespace typent
