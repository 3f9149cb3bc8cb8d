#pragma once

#include "typent/haar.hpp"
#include "typent/quantum_core.hpp"
#include "typent/rng.hpp"
#include "typent/stats.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace typent {

inline constexpr std::size_t kMaxStatevectorQubits = 14;
inline constexpr std::size_t kMaxPauliChainQubits = 10;

/// CNOT[control, target] U[control] V[target]. Qubits are 0-based here;
/// qubit 0 is the most significant bit of a basis index.
struct RandomGate {
  std::size_t control = 0;
  std::size_t target = 1;
  UnitaryMatrix u_control;
  UnitaryMatrix u_target;
};

/// (control, target) uniform over the n(n-1) ordered pairs, both single-qubit
/// unitaries Haar on U(2). Throws InvalidInput for n < 2.
RandomGate sample_gate(std::size_t n, Rng& rng);

/// Applies the gate in place to an n-qubit statevector.
void apply_gate(Eigen::VectorXcd& psi, std::size_t n, const RandomGate& gate);

/// Dense 2^n x 2^n matrix of the gate.
Eigen::MatrixXcd gate_matrix(std::size_t n, const RandomGate& gate);

struct TrajectoryPoint {
  std::size_t step = 0;
  double entropy_bits = 0.0;
  double purity = 1.0;
};

/// Applies `gates` sampled gates to `initial` (n = log2 of its size) and
/// records the entanglement of the first n_a qubits at step 0, every
/// `record_every` steps, and at the last step. Throws CapabilityError for
/// n > kMaxStatevectorQubits, InvalidInput for bad n_a or record_every = 0.
std::vector<TrajectoryPoint> evolve_trajectory(const Eigen::VectorXcd& initial, std::size_t n_a,
                                               std::size_t gates, Rng& rng,
                                               std::size_t record_every = 1);

/// Smallest integer l >= 9 n (n-1) (3 ln2 n + ln(1/eps)) / 4.
std::uint64_t gate_count_bound(std::size_t n, double eps);

/// Image of the Pauli pair (control letter, target letter) under CNOT
/// conjugation, up to sign. Letters: 0 = I, 1 = X, 2 = Y, 3 = Z.
std::pair<unsigned, unsigned> cnot_conjugate(unsigned control_letter, unsigned target_letter);

/// Squared orthonormal Pauli coefficients (a probability distribution for
/// pure states). Strings use the base-4 encoding of PauliCoefficients.
/// Stored sparsely, sorted by string index, zeros dropped.
class PauliWeightDistribution {
 public:
  PauliWeightDistribution(std::size_t n, std::vector<std::pair<std::uint32_t, double>> weights);

  std::size_t n() const { return n_; }
  const std::vector<std::pair<std::uint32_t, double>>& weights() const { return weights_; }
  double weight(std::uint32_t string_index) const;
  double total() const;

 private:
  std::size_t n_;
  std::vector<std::pair<std::uint32_t, double>> weights_;
};

/// Uniform weight 2^{-n} on {I, Z}^n strings for |basis_index>. Throws
/// UnsupportedInput if `state` is not a computational basis state.
PauliWeightDistribution pauli_initial_distribution(const Eigen::VectorXcd& state);
PauliWeightDistribution pauli_initial_distribution(std::size_t n, std::size_t basis_index);

/// Exact expected effect of one random gate on the squared coefficients.
/// Throws CapabilityError for n > kMaxPauliChainQubits.
PauliWeightDistribution pauli_markov_step(const PauliWeightDistribution& dist);

/// 2^{n_B} times the weight on strings acting trivially outside the first n_a qubits.
double expected_purity(const PauliWeightDistribution& dist, std::size_t n_a);

/// Fixed point: 2^{-n} on the identity string, (1 - 2^{-n}) / (4^n - 1) elsewhere.
PauliWeightDistribution pauli_stationary_distribution(std::size_t n);

/// Expected purity of the first n_a qubits after 0..steps gates from |0...0>.
std::vector<double> pauli_chain_purity(std::size_t n, std::size_t n_a, std::size_t steps);

/// Monte Carlo purity of the first n_a qubits after each of 0..steps gates
/// from |0...0>, one independent circuit per sample.
std::vector<MonteCarloEstimate> statevector_purity(std::size_t n, std::size_t n_a, std::size_t steps,
                                                   std::size_t n_samples, std::uint64_t seed,
                                                   std::size_t threads = 1);

}  // namespace typent
