#pragma once

#include "typent/haar.hpp"
#include "typent/rng.hpp"
#include "typent/stats.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace typent {

/// Block-diagonal sum of [[0, 1], [-1, 0]], quadratures ordered Q1, P1, ..., Qn, Pn.
Eigen::MatrixXd symplectic_form(std::size_t n);

/// Zero-mean Gaussian state covariance matrix (vacuum = identity).
class CovarianceMatrix {
 public:
  /// Throws InvalidInput unless sigma is 2n x 2n, symmetric within 1e-10 and
  /// sigma + iJ >= 0 (min eigenvalue >= -1e-9). With `pure`, also requires
  /// (sigma J)^2 = -I within 1e-8.
  explicit CovarianceMatrix(Eigen::MatrixXd sigma, bool pure = false);

  const Eigen::MatrixXd& sigma() const { return sigma_; }
  std::size_t modes() const { return static_cast<std::size_t>(sigma_.rows() / 2); }
  bool pure() const { return pure_; }

 private:
  Eigen::MatrixXd sigma_;
  bool pure_;
};

/// Descending symplectic eigenvalues, each >= 1 within 1e-9.
struct SymplecticSpectrum {
  std::vector<double> nus;
};

/// Symplectic eigenvalues of the leading n_a modes. Values in [1 - 1e-9, 1]
/// are set to exactly 1.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& sigma, std::size_t n_a);

/// h(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2), h(1) = 0.
double gaussian_entropy_term(double nu);
double gaussian_entropy(const SymplecticSpectrum& spectrum);
/// prod 1/nu_i.
double gaussian_purity(const SymplecticSpectrum& spectrum);

/// Passive factor, active squeezing, passive factor.
struct EulerFactors {
  UnitaryMatrix u;
  UnitaryMatrix u_prime;
  std::vector<double> s;  ///< nonnegative squeezing parameters
};

/// Real 2n x 2n orthogonal symplectic image of an n x n unitary.
Eigen::MatrixXd passive_symplectic(const UnitaryMatrix& u);
/// diag(e^{s_k/2}, e^{-s_k/2}) per mode.
Eigen::MatrixXd squeezing_symplectic(std::span<const double> s);

/// sigma = S S^T with S = S(U) Z(s) S(U'); a pure state.
CovarianceMatrix build_covariance(const EulerFactors& factors);

/// Trace of each diagonal 2x2 block (vacuum = 2).
std::vector<double> mode_energies(const CovarianceMatrix& sigma);

/// Mode energies, each >= 2.
struct EnergyVector {
  std::vector<double> e;
  double total() const;
};

/// E_j = 2 + Exponential(mean T), independent. Throws InvalidInput unless T > 0.
EnergyVector sample_canonical_energies(std::size_t n, double temperature, Rng& rng);

/// (E_j - 2) uniform on the simplex sum (E_j - 2) <= E_total - 2n, via
/// sorted-uniform spacings. Throws InvalidInput unless E_total >= 2n.
EnergyVector sample_microcanonical_energies(std::size_t n, double total_energy, Rng& rng);

/// s_k = arccosh(E_k / 2) with Haar U and U'.
EulerFactors factors_from_energies(const EnergyVector& energies, Rng& rng);

/// Marginal density and CDF of a single E_j - 2 under the micro-canonical
/// measure: n/Et (1 - x/Et)^{n-1} on [0, Et], Et = E_total - 2n.
double microcanonical_marginal_density(double x, std::size_t n, double e_tilde);
double microcanonical_marginal_cdf(double x, std::size_t n, double e_tilde);

/// Averages of P^{-2} and P^{-4} for a single-mode subsystem.
struct PurityMoments {
  double inv_sq_mean = 1.0;
  double inv_quartic_mean = 1.0;
  /// sqrt(E[P^-4] - E[P^-2]^2).
  double std_dev() const;
};

PurityMoments canonical_purity_moments(std::size_t n, double temperature);
PurityMoments microcanonical_purity_moments(std::size_t n, double total_energy);

/// Largest purity reachable with total energy E_total: P_M^{-2} = (Et + 4)^2 / 16.
double maximal_purity(double total_energy, std::size_t n);

/// (P_M^{-2} - E[P_mc^{-2}]) / std(P_mc^{-2}) at fixed total energy.
double maximal_purity_distance(std::size_t n, double total_energy);

/// Unnormalized density prod_{h>k} (nu_h^2 - nu_k^2)^2 prod_j nu_j^2 (nu_j^2 - 1)^{n_B - n_A}.
double symplectic_spectrum_weight(std::span<const double> nus, std::size_t n_a, std::size_t n_b);

enum class EnergyEnsemble { Canonical, Microcanonical };
std::string_view to_string(EnergyEnsemble e);
EnergyEnsemble parse_energy_ensemble(std::string_view name);

/// Monte Carlo mean of det(sigma_1) = P^{-2} of mode 1 over sampled pure
/// Gaussian states. `parameter` is T (canonical) or E_total (micro-canonical).
MonteCarloEstimate mc_inverse_purity_squared(EnergyEnsemble ensemble, std::size_t n, double parameter,
                                             std::size_t n_samples, std::uint64_t seed,
                                             std::size_t threads = 1);

/// Sampled E_1 - 2 values under the micro-canonical measure, ascending.
std::vector<double> microcanonical_marginal_samples(std::size_t n, double total_energy, std::size_t n_samples,
                                                    std::uint64_t seed, std::size_t threads = 1);

}  // namespace typent
