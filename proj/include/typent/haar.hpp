#pragma once

#include "typent/quantum_core.hpp"
#include "typent/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace typent {

/// Square matrix with U^dagger U = I within 1e-9.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(Eigen::MatrixXcd entries);

  const Eigen::MatrixXcd& matrix() const { return entries_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

 private:
  Eigen::MatrixXcd entries_;
};

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
UnitaryMatrix sample_haar_unitary(std::size_t n, Rng& rng);

/// Coordinates of U(N) in the Hurwitz (generalized Euler angle)
/// parametrization. Pair-indexed vectors are ordered by the column `l`
/// then row `k`: (1,2), (1,3), (2,3), (1,4), ... with 1 <= k < l <= N.
struct HurwitzAngles {
  std::size_t n = 1;
  double alpha = 0.0;           ///< global phase, [0, 2pi)
  std::vector<double> theta;    ///< rotation angles, [0, pi/2]
  std::vector<double> phi;      ///< diagonal phases, [0, 2pi)
  std::vector<double> chi;      ///< off-diagonal phase of the (1, l) rotation, l = 2..N; [0, 2pi)

  /// Position of pair (k, l) in theta/phi, with 1-based k < l.
  static std::size_t pair_index(std::size_t k, std::size_t l);
};

/// Throws InvalidInput if any angle is out of range or the index set is incomplete.
void validate(const HurwitzAngles& angles);

/// Composes e^{i alpha} F_N ... F_3 F_2, where F_l is the product
/// R(1,2) R(2,3) ... R(l-1,l) of two-level rotations carrying the (k, l)
/// angles; the (k, l) angle acts in the plane (k, k+1).
UnitaryMatrix hurwitz_unitary(const HurwitzAngles& angles);

/// theta_{kl} has density proportional to cos(theta) sin(theta)^{2k-1}; the
/// phases are uniform. The composed unitary is then Haar distributed.
HurwitzAngles sample_hurwitz_angles(std::size_t n, Rng& rng);

/// Uniformly distributed pure state (normalized complex Gaussian vector).
PureState sample_random_pure_state(std::size_t dim_a, std::size_t dim_b, Rng& rng);

/// rho = Tr_E |psi><psi| for psi uniform on C^{dim_s * dim_e}.
DensityMatrix sample_induced_mixed_state(std::size_t dim_s, std::size_t dim_e, Rng& rng);

/// U diag(spectrum) U^dagger with U Haar. The spectrum is any probability
/// vector (nonnegative, sums to 1 within 1e-10); its size sets the dimension.
DensityMatrix sample_fixed_purity_state(std::span<const double> spectrum, Rng& rng);

/// A probability vector of length `dim` with sum of squares `purity`: one
/// eigenvalue x and dim-1 equal eigenvalues (1-x)/(dim-1).
std::vector<double> spectrum_with_purity(double purity, std::size_t dim);

enum class PauliNormalization {
  /// xi_s = 2^{-n/2} Tr(g_s rho), rho = 2^{-n/2} sum xi_s g_s; sum xi^2 = Tr rho^2.
  Orthonormal,
  /// rho = sum xi_s g_s with Tr(g_j g_k) = 2^n delta_jk; xi_0 = 2^{-n}.
  Appendix,
};

/// Expansion of an n-qubit operator in tensor products of {I, X, Y, Z}.
/// String s is encoded in base 4 with digit 0..3 = I, X, Y, Z and qubit 1
/// as the most significant digit.
struct PauliCoefficients {
  std::size_t n = 0;
  PauliNormalization normalization = PauliNormalization::Orthonormal;
  std::vector<double> xi;
};

/// Requires dim(rho) = 2^n; otherwise InvalidInput.
PauliCoefficients pauli_coefficients(const DensityMatrix& rho);

PauliCoefficients convert(const PauliCoefficients& c, PauliNormalization to);

/// Inverse of pauli_coefficients.
Eigen::MatrixXcd reconstruct(const PauliCoefficients& c);

/// The Pauli string matrix g_s, dense 2^n x 2^n.
Eigen::MatrixXcd pauli_string_matrix(std::size_t n, std::size_t string_index);

/// Exact Haar average of Tr rho_A^2 over U rho U^dagger with Tr rho^2 = P,
/// for n_a + n_b qubits. Throws InvalidInput unless 2^{-n} <= P <= 1.
double average_local_purity_fixed_global(double purity, std::size_t n_a, std::size_t n_b);

/// Tr_B of a density matrix on dim_a * dim_b (A is the leading factor).
Eigen::MatrixXcd partial_trace_b(const Eigen::MatrixXcd& rho, std::size_t dim_a, std::size_t dim_b);

}  // namespace typent
