#pragma once

#include "typent/quantum_core.hpp"
#include "typent/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace typent {

/// Bipartition with dim_a <= dim_b.
struct BipartiteDims {
  std::size_t dim_a = 1;
  std::size_t dim_b = 1;

  /// Throws InvalidInput unless 1 <= dim_a <= dim_b.
  static BipartiteDims make(std::size_t dim_a, std::size_t dim_b);
};

/// ln Z for the joint density of squared Schmidt coefficients, from log-Gamma.
double log_normalization(BipartiteDims dims);

/// ln of Z^{-1} prod_{i<j} (p_i - p_j)^2 prod_i p_i^{N_B - N_A} on the simplex.
/// Returns -infinity at coincident values, or at p_i = 0 when N_B > N_A.
/// Throws InvalidInput if p has the wrong length, a negative entry, or a sum
/// off 1 by more than 1e-8.
double log_joint_density(std::span<const double> p, BipartiteDims dims);

/// Exact Haar average of the subsystem entropy, in bits.
double page_average_entropy(BipartiteDims dims);

/// log2 N_A - N_A / (N_B ln 2), a strict lower bound on the Page average.
double page_lower_bound(BipartiteDims dims);

/// (N_A + N_B) / (N_A N_B + 1).
double average_purity(BipartiteDims dims);

/// Upper bound on Pr{S < page_lower_bound - alpha}. The entropy and the
/// log N_A in the exponent are both in bits. Requires alpha > 0, N_A >= 2.
double concentration_bound(BipartiteDims dims, double alpha);

struct MpEdges {
  double lower;
  double upper;
};

/// a = (1/sqrt(N_A) - 1/sqrt(N_B))^2, b = (1/sqrt(N_A) + 1/sqrt(N_B))^2.
MpEdges mp_edges(BipartiteDims dims);

/// Marchenko-Pastur density of squared Schmidt coefficients, normalized to N_A.
double marchenko_pastur_density(double p, BipartiteDims dims);

/// Probability-normalized MP CDF (integral of density / N_A from a to x), by
/// tanh-sinh quadrature.
double marchenko_pastur_cdf(double x, BipartiteDims dims);

/// MP CDF at each point of an ascending sequence, integrating piecewise
/// between consecutive points.
std::vector<double> marchenko_pastur_cdf_sorted(std::span<const double> sorted, BipartiteDims dims);

/// The `count` mid-quantiles (i + 1/2) / count of the MP law.
std::vector<double> marchenko_pastur_quantiles(BipartiteDims dims, std::size_t count);

using SpectrumObservable = std::function<double(const EntanglementSpectrum&)>;

struct EstimateOptions {
  std::size_t threads = 1;
  bool histogram = false;
  std::optional<std::size_t> bins;  ///< Freedman-Diaconis when empty
};

struct EstimateResult {
  MonteCarloEstimate estimate;
  std::optional<Histogram> histogram;
};

/// Mean and standard error of `observable` over Haar-random pure states.
/// Sample i is drawn from sub-stream (seed, i / kChunkSize); the result does
/// not depend on options.threads. Requires n_samples >= 2.
EstimateResult estimate(const SpectrumObservable& observable, BipartiteDims dims,
                        std::size_t n_samples, std::uint64_t seed, EstimateOptions options = {});

/// Squared Schmidt coefficients of n_states Haar states, pooled and sorted.
std::vector<double> pooled_spectrum(BipartiteDims dims, std::size_t n_states, std::uint64_t seed,
                                    std::size_t threads = 1);

/// KS distance between the pooled empirical spectrum and the MP CDF.
double spectrum_vs_mp_distance(BipartiteDims dims, std::size_t n_states, std::uint64_t seed,
                               std::size_t threads = 1);

}  // namespace typent
