#pragma once

#include "typent/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace typent {

/// Particle positions of the log-gas on the simplex, descending. When
/// N_A == N_B the smallest particle may sit exactly at 0 (the hard wall);
/// otherwise all p_i > 0.
struct GasConfiguration {
  std::vector<double> p;
  double mu = 0.0;      ///< multiplier of sum p_i = 1
  double lambda = 0.0;  ///< multiplier of the entanglement constraint (0 when none)
};

enum class ConstraintKind { None, EntropyQ1, RenyiQ, Purity };

/// Fixes an entanglement quantifier of the spectrum. Entropies are in bits.
struct ConstraintSpec {
  ConstraintKind kind = ConstraintKind::None;
  double value = 0.0;
  double q = 2.0;  ///< Renyi order, used when kind == RenyiQ
};

std::string_view to_string(ConstraintKind kind);
/// "none", "entropy", "renyi", "purity"
ConstraintKind parse_constraint_kind(std::string_view name);

/// Achievable [min, max] of the constrained quantity for N_A coefficients.
std::pair<double, double> constraint_range(const ConstraintSpec& c, std::size_t dim_a);

/// Value of the constrained quantity at p (0 for kind None).
double constraint_value(const ConstraintSpec& c, std::span<const double> p);

/// -(N_B - N_A) sum ln p_i - 2 sum_{i<j} ln|p_i - p_j|. Returns +infinity when
/// two coordinates are within 1e-14 of each other or when some p_i <= 0 while
/// N_B > N_A.
double gas_energy(std::span<const double> p, BipartiteDims dims);
double gas_energy(const GasConfiguration& config, BipartiteDims dims);

struct StationarityReport {
  double residual = 0.0;  ///< max_i |r_i| (KKT sign condition for a wall particle)
  double mu = 0.0;        ///< least-squares multiplier of sum p = 1
  double lambda = 0.0;    ///< least-squares multiplier of the constraint
};

/// r_i = sum_{j != i} 1/(p_j - p_i) - (N_B - N_A)/(2 p_i) + mu/2 + (lambda/2) dC/dp_i
/// with the multipliers fitted by least squares over the interior equations.
/// A particle at the wall (p = 0, N_A == N_B only) contributes max(0, -r_i).
StationarityReport stationarity(std::span<const double> p, BipartiteDims dims,
                                const ConstraintSpec& constraint = {});
double stationarity_residual(const GasConfiguration& config, BipartiteDims dims,
                             const ConstraintSpec& constraint = {});

struct MinimizeOptions {
  std::size_t starts = 8;
  std::size_t max_iterations = 400;  ///< per Newton stage
  double tolerance = 1e-6;           ///< required stationarity residual
  double jitter = 0.05;              ///< relative perturbation of the starting points
  std::size_t threads = 1;
};

struct StartLog {
  std::size_t start = 0;
  double energy = 0.0;
  double residual = 0.0;
  double constraint_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct GasResult {
  GasConfiguration config;
  double energy = 0.0;
  double residual = 0.0;
  std::vector<StartLog> starts;
  bool forced = false;  ///< constraint admits a single configuration
};

/// Thrown when no start reaches the residual tolerance; carries the best iterate.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, GasResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const GasResult& best() const { return best_; }

 private:
  GasResult best_;
};

/// Local minimizer of the gas energy on the simplex intersected with the
/// constraint manifold. Unconstrained runs start from Marchenko-Pastur
/// quantiles, constrained runs from the uniform spectrum; every start after
/// the first is jittered from sub-stream (seed, start). `init`, if given,
/// replaces the first start. The lowest-energy converged start wins.
///
/// Throws InvalidInput for an infeasible constraint value and
/// ConvergenceFailure when no start converges.
GasResult minimize_gas(BipartiteDims dims, const ConstraintSpec& constraint,
                       const std::optional<GasConfiguration>& init, std::uint64_t seed,
                       const MinimizeOptions& options = {});

enum class Phase { MaximallyEntangled, Typical, SeparableLike };

std::string_view to_string(Phase phase);

/// Diagnostic thresholds, not derived quantities.
inline constexpr double kDetachmentFactor = 2.0;
inline constexpr double kNarrowWidthFraction = 0.5;

/// maximally_entangled: spectrum width below kNarrowWidthFraction of the
/// unconstrained MP width b - a, or entropy_value at log2 N_A.
/// separable_like: the largest coefficient exceeds kDetachmentFactor times the
/// upper edge of an MP bulk fitted to the remaining N_A - 1 coefficients
/// (scaled to their total mass). typical otherwise.
Phase classify_phase(const GasConfiguration& config, BipartiteDims dims, double entropy_value);

}  // namespace typent
