#pragma once

#include "typent/rng.hpp"
#include "typent/stats.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace typent {

inline constexpr std::size_t kMaxTripartiteDim = std::size_t{1} << 14;

struct TripartiteDims {
  std::size_t a = 1;
  std::size_t b = 1;
  std::size_t c = 1;
  std::size_t total() const { return a * b * c; }
};

/// Pure state on A (x) B (x) C; amplitude index (i_a * N_B + i_b) * N_C + i_c.
class TripartiteState {
 public:
  /// Throws InvalidInput on zero dims, size mismatch, or norm off 1 by more
  /// than 1e-10; CapabilityError if N_A N_B N_C > kMaxTripartiteDim.
  TripartiteState(Eigen::VectorXcd amplitudes, TripartiteDims dims);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  TripartiteDims dims() const { return dims_; }

 private:
  Eigen::VectorXcd amplitudes_;
  TripartiteDims dims_;
};

/// |0>_A |0>_B |0>_C.
TripartiteState product_zero_state(TripartiteDims dims);

/// sum_k |k>_AB |k>_C / sqrt(m), m = min(N_A N_B, N_C), with k the combined AB index.
TripartiteState embedded_entangled_state(TripartiteDims dims);

/// Initial-state families for decoupling sweeps.
enum class DecouplingInitial { Product, Entangled };
std::string_view to_string(DecouplingInitial kind);
DecouplingInitial parse_decoupling_initial(std::string_view name);
TripartiteState make_initial_state(DecouplingInitial kind, TripartiteDims dims);

/// Distance measure used by decoupling_deviation, recorded in metadata.
inline constexpr std::string_view kDecouplingDistance = "trace-distance";

/// rho_AC (A leading), Hermitian by construction.
Eigen::MatrixXcd reduced_ac(const TripartiteState& state);

/// (1/2) sum |eigenvalues of (a - b)|.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Applies a Haar unitary to the AB factor and returns
/// (1/2) || rho_AC - I/N_A (x) rho_C ||_1.
double decoupling_deviation(const TripartiteState& state, Rng& rng);

/// Monte Carlo mean of decoupling_deviation, one Haar unitary per sample.
MonteCarloEstimate mean_decoupling_deviation(const TripartiteState& state, std::size_t n_samples,
                                             std::uint64_t seed, std::size_t threads = 1);

/// 2 log2 N_B - (log2 N_A + log2 N_C - log2 purity_ac). Throws InvalidInput
/// for zero dims or purity outside (0, 1].
double decoupling_margin(std::size_t na, std::size_t nb, std::size_t nc, double purity_ac);

struct PageCurvePoint {
  std::size_t n_a = 0;
  double mean_entropy_bits = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
};

/// Mean entropy of the first n_A qubits of Haar states on n qubits, for
/// n_A = 0..n. All subsystem sizes share each sampled state.
std::vector<PageCurvePoint> page_curve(std::size_t n, std::size_t n_samples, std::uint64_t seed,
                                       std::size_t threads = 1);

/// First n_A whose mean lies within 1e-9 of the maximum.
std::size_t page_curve_peak(const std::vector<PageCurvePoint>& curve);

}  // namespace typent
