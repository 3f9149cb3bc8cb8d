#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace typent {

using cplx = std::complex<double>;

/// Pure state on H_A (x) H_B. Amplitude index is i * dim_b + j for basis
/// vector |i>_A |j>_B, so the first tensor factor is the most significant.
class PureState {
 public:
  /// Throws InvalidInput unless amplitudes.size() == dim_a * dim_b and the
  /// vector has unit norm within 1e-10.
  PureState(Eigen::VectorXcd amplitudes, std::size_t dim_a, std::size_t dim_b);

  /// Computational basis state |index> with the given bipartition.
  static PureState basis(std::size_t index, std::size_t dim_a, std::size_t dim_b);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }

  /// The dim_a x dim_b matrix of coefficients Psi_ij.
  Eigen::MatrixXcd coefficients() const;

 private:
  Eigen::VectorXcd amplitudes_;
  std::size_t dim_a_;
  std::size_t dim_b_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  /// Throws InvalidInput if `entries` is not square, not Hermitian within
  /// 1e-10, has an eigenvalue below -1e-10, or has trace off 1 by more than 1e-10.
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  const Eigen::MatrixXcd& matrix() const { return entries_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

  /// Ascending eigenvalues.
  Eigen::VectorXd eigenvalues() const;
  double purity() const;

 private:
  Eigen::MatrixXcd entries_;
};

/// Squared Schmidt coefficients, descending, summing to 1.
class EntanglementSpectrum {
 public:
  /// Validates: each value in [0,1], descending, sum 1 within 1e-10.
  explicit EntanglementSpectrum(std::vector<double> probs);

  /// Clamps values below 1e-12 to zero, sorts descending and renormalizes.
  /// Throws InvalidInput if nothing positive remains.
  static EntanglementSpectrum from_weights(std::vector<double> weights);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

enum class Subsystem { A, B };

/// Parses "A"/"a"/"B"/"b"; anything else is InvalidInput.
Subsystem parse_subsystem(std::string_view label);

/// Values below this are treated as zero before taking logarithms.
inline constexpr double kSpectrumFloor = 1e-12;

/// Squared singular values of the coefficient matrix, via SVD.
EntanglementSpectrum schmidt_spectrum(const PureState& state);

/// Same, from a raw amplitude vector; throws InvalidInput if the length is
/// not dim_a * dim_b. The vector need not be normalized.
EntanglementSpectrum schmidt_spectrum(const Eigen::VectorXcd& amplitudes, std::size_t dim_a,
                                      std::size_t dim_b);

DensityMatrix partial_trace(const PureState& state, Subsystem keep);

/// Renyi entropy of order q in bits; q == 1 is the von Neumann entropy.
double entropy(const EntanglementSpectrum& spectrum, double q = 1.0);

/// Sum of squared probabilities.
double purity(const EntanglementSpectrum& spectrum);

/// Shannon entropy in bits of a nonnegative weight vector, with 0 log 0 = 0
/// and values under kSpectrumFloor dropped. No normalization is applied.
double shannon_bits(std::span<const double> p);

}  // namespace typent
