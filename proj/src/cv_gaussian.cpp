#include "typent/cv_gaussian.hpp"

#include "typent/errors.hpp"
#include "typent/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace typent {

namespace {

void require_modes(std::size_t n, const char* who) {
  if (n == 0) throw InvalidInput(fmt::format("{}: need at least one mode", who));
}

double e_tilde_of(std::size_t n, double total_energy, const char* who) {
  const double et = total_energy - 2.0 * static_cast<double>(n);
  if (!(et >= -1e-12)) {
    throw InvalidInput(fmt::format("{}: total energy {} below the vacuum value {}", who, total_energy, 2 * n));
  }
  return std::max(et, 0.0);
}

}  // namespace

Eigen::MatrixXd symplectic_form(std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(2 * n);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    j(k, k + 1) = 1.0;
    j(k + 1, k) = -1.0;
  }
  return j;
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd sigma, bool pure) : sigma_(std::move(sigma)), pure_(pure) {
  if (sigma_.rows() != sigma_.cols() || sigma_.rows() == 0 || sigma_.rows() % 2 != 0) {
    throw InvalidInput("CovarianceMatrix: need a nonempty 2n x 2n matrix");
  }
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidInput("CovarianceMatrix: not symmetric");
  }
  sigma_ = 0.5 * (sigma_ + sigma_.transpose()).eval();
  const std::size_t n = modes();
  const Eigen::MatrixXd j = symplectic_form(n);
  const Eigen::MatrixXcd h = sigma_.cast<cplx>() + cplx(0.0, 1.0) * j.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw InvalidInput(fmt::format("CovarianceMatrix: sigma + iJ has eigenvalue {}", eig.eigenvalues().minCoeff()));
  }
  if (pure_) {
    const Eigen::MatrixXd sj = sigma_ * j;
    const Eigen::MatrixXd err = sj * sj + Eigen::MatrixXd::Identity(sigma_.rows(), sigma_.cols());
    if (err.cwiseAbs().maxCoeff() > 1e-8) throw InvalidInput("CovarianceMatrix: (sigma J)^2 != -I for a pure state");
  }
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& sigma, std::size_t n_a) {
  if (n_a < 1 || n_a > sigma.modes()) {
    throw InvalidInput(fmt::format("symplectic_eigenvalues: n_A = {} outside 1..{}", n_a, sigma.modes()));
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_a);
  const Eigen::MatrixXd block = sigma.sigma().topLeftCorner(dim, dim);
  // Eigenvalues of sqrt(s) iJ sqrt(s) are +-nu; this form is Hermitian.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(block);
  const Eigen::MatrixXd root = se.operatorSqrt();
  const Eigen::MatrixXcd m = cplx(0.0, 1.0) * (root * symplectic_form(n_a) * root).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
  SymplecticSpectrum out;
  for (Eigen::Index k = dim - 1; k >= static_cast<Eigen::Index>(n_a); --k) {
    double nu = eig.eigenvalues()[k];
    if (nu < 1.0 - 1e-9) {
      throw InvalidInput(fmt::format("symplectic_eigenvalues: nu = {} below 1", nu));
    }
    if (nu <= 1.0) nu = 1.0;
    out.nus.push_back(nu);
  }
  return out;
}

double gaussian_entropy_term(double nu) {
  if (nu < 1.0) throw InvalidInput("gaussian_entropy_term: nu below 1");
  if (nu == 1.0) return 0.0;
  const double a = (nu + 1.0) / 2.0;
  const double b = (nu - 1.0) / 2.0;
  return a * std::log2(a) - b * std::log2(b);
}

double gaussian_entropy(const SymplecticSpectrum& spectrum) {
  double s = 0.0;
  for (double nu : spectrum.nus) s += gaussian_entropy_term(nu);
  return s;
}

double gaussian_purity(const SymplecticSpectrum& spectrum) {
  double p = 1.0;
  for (double nu : spectrum.nus) {
    if (nu < 1.0) throw InvalidInput("gaussian_purity: nu below 1");
    p /= nu;
  }
  return p;
}

Eigen::MatrixXd passive_symplectic(const UnitaryMatrix& u) {
  const Eigen::Index n = u.matrix().rows();
  const Eigen::MatrixXd x = u.matrix().real();
  const Eigen::MatrixXd y = u.matrix().imag();
  Eigen::MatrixXd s(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      s(2 * i, 2 * j) = x(i, j);
      s(2 * i, 2 * j + 1) = -y(i, j);
      s(2 * i + 1, 2 * j) = y(i, j);
      s(2 * i + 1, 2 * j + 1) = x(i, j);
    }
  }
  return s;
}

Eigen::MatrixXd squeezing_symplectic(std::span<const double> s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    z(2 * k, 2 * k) = std::exp(s[static_cast<std::size_t>(k)] / 2.0);
    z(2 * k + 1, 2 * k + 1) = std::exp(-s[static_cast<std::size_t>(k)] / 2.0);
  }
  return z;
}

CovarianceMatrix build_covariance(const EulerFactors& f) {
  const std::size_t n = f.s.size();
  require_modes(n, "build_covariance");
  if (f.u.dim() != n || f.u_prime.dim() != n) throw InvalidInput("build_covariance: factor sizes differ");
  for (double s : f.s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("build_covariance: squeezing must be nonnegative");
  }
  const Eigen::MatrixXd sm = passive_symplectic(f.u) * squeezing_symplectic(f.s) * passive_symplectic(f.u_prime);
  return CovarianceMatrix(sm * sm.transpose(), true);
}

std::vector<double> mode_energies(const CovarianceMatrix& sigma) {
  std::vector<double> e;
  for (std::size_t k = 0; k < sigma.modes(); ++k) {
    const auto i = static_cast<Eigen::Index>(2 * k);
    e.push_back(sigma.sigma()(i, i) + sigma.sigma()(i + 1, i + 1));
  }
  return e;
}

double EnergyVector::total() const {
  double t = 0.0;
  for (double x : e) t += x;
  return t;
}

EnergyVector sample_canonical_energies(std::size_t n, double temperature, Rng& rng) {
  require_modes(n, "sample_canonical_energies");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidInput("sample_canonical_energies: temperature must be positive");
  }
  EnergyVector v;
  for (std::size_t k = 0; k < n; ++k) v.e.push_back(2.0 + rng.exponential(temperature));
  return v;
}

EnergyVector sample_microcanonical_energies(std::size_t n, double total_energy, Rng& rng) {
  require_modes(n, "sample_microcanonical_energies");
  const double et = e_tilde_of(n, total_energy, "sample_microcanonical_energies");
  std::vector<double> u(n);
  for (double& x : u) x = rng.uniform();
  std::sort(u.begin(), u.end());
  EnergyVector v;
  double prev = 0.0;
  for (double x : u) {
    v.e.push_back(2.0 + et * (x - prev));
    prev = x;
  }
  return v;
}

EulerFactors factors_from_energies(const EnergyVector& energies, Rng& rng) {
  const std::size_t n = energies.e.size();
  require_modes(n, "factors_from_energies");
  std::vector<double> s;
  for (double e : energies.e) {
    if (!(e >= 2.0)) throw InvalidInput("factors_from_energies: mode energy below 2");
    s.push_back(std::acosh(e / 2.0));
  }
  UnitaryMatrix u = sample_haar_unitary(n, rng);
  UnitaryMatrix up = sample_haar_unitary(n, rng);
  return {std::move(u), std::move(up), std::move(s)};
}

double microcanonical_marginal_density(double x, std::size_t n, double e_tilde) {
  require_modes(n, "microcanonical_marginal_density");
  if (!(e_tilde > 0.0)) throw InvalidInput("microcanonical_marginal_density: need E_tilde > 0");
  if (x < 0.0 || x > e_tilde) return 0.0;
  const double nn = static_cast<double>(n);
  return nn / e_tilde * std::pow(1.0 - x / e_tilde, nn - 1.0);
}

double microcanonical_marginal_cdf(double x, std::size_t n, double e_tilde) {
  require_modes(n, "microcanonical_marginal_cdf");
  if (!(e_tilde > 0.0)) throw InvalidInput("microcanonical_marginal_cdf: need E_tilde > 0");
  if (x <= 0.0) return 0.0;
  if (x >= e_tilde) return 1.0;
  return 1.0 - std::pow(1.0 - x / e_tilde, static_cast<double>(n));
}

double PurityMoments::std_dev() const {
  return std::sqrt(std::max(0.0, inv_quartic_mean - inv_sq_mean * inv_sq_mean));
}

PurityMoments canonical_purity_moments(std::size_t n, double t) {
  require_modes(n, "canonical_purity_moments");
  if (!(t > 0.0)) throw InvalidInput("canonical_purity_moments: temperature must be positive");
  const double nn = static_cast<double>(n);
  PurityMoments m;
  m.inv_sq_mean = 0.25 * (nn - 1.0) / (nn + 1.0) * (t * t + 4.0 * t) + 1.0;
  const double pre = (nn - 1.0) / (16.0 * (nn + 1.0) * (nn + 2.0) * (nn + 3.0));
  const double poly = (nn * nn + 11.0 * nn + 22.0) * std::pow(t, 4) + 8.0 * (nn * nn + 8.0 * nn + 6.0) * std::pow(t, 3) +
                      8.0 * (3.0 * nn * nn + 15.0 * nn + 10.0) * t * t + 32.0 * (nn + 3.0) * (nn + 2.0) * t;
  m.inv_quartic_mean = pre * poly + 1.0;
  return m;
}

PurityMoments microcanonical_purity_moments(std::size_t n, double total_energy) {
  require_modes(n, "microcanonical_purity_moments");
  const double e = e_tilde_of(n, total_energy, "microcanonical_purity_moments");
  const double nn = static_cast<double>(n);
  PurityMoments m;
  m.inv_sq_mean = (nn - 1.0) / (4.0 * (nn + 2.0) * (nn + 1.0) * (nn + 1.0)) * (e * e + 4.0 * (nn + 2.0) * e) + 1.0;
  // (n!)^2 / ((n+4)! (n+3)!) without factorials.
  const double rising3 = (nn + 1.0) * (nn + 2.0) * (nn + 3.0);
  const double pre = (nn - 1.0) / (16.0 * rising3 * (nn + 4.0) * rising3);
  const double poly = (nn * nn + 11.0 * nn + 22.0) * std::pow(e, 4) +
                      8.0 * (nn + 6.0) * (nn + 4.0) * (nn + 1.0) * std::pow(e, 3) +
                      8.0 * (nn + 4.0) * (nn + 3.0) * (3.0 * nn * nn + 15.0 * nn + 10.0) * e * e +
                      32.0 * (nn + 4.0) * (nn + 3.0) * (nn + 3.0) * (nn + 2.0) * (nn + 2.0) * e;
  m.inv_quartic_mean = pre * poly + 1.0;
  return m;
}

double maximal_purity(double total_energy, std::size_t n) {
  require_modes(n, "maximal_purity");
  const double e = e_tilde_of(n, total_energy, "maximal_purity");
  return 4.0 / (e + 4.0);
}

double maximal_purity_distance(std::size_t n, double total_energy) {
  const PurityMoments m = microcanonical_purity_moments(n, total_energy);
  const double pm = maximal_purity(total_energy, n);
  const double sd = m.std_dev();
  if (!(sd > 0.0)) throw InvalidInput("maximal_purity_distance: zero spread (n = 1 or E_tilde = 0)");
  return (1.0 / (pm * pm) - m.inv_sq_mean) / sd;
}

double symplectic_spectrum_weight(std::span<const double> nus, std::size_t n_a, std::size_t n_b) {
  if (nus.size() != n_a) throw InvalidInput("symplectic_spectrum_weight: need n_A values");
  if (n_a > n_b) throw InvalidInput("symplectic_spectrum_weight: need n_A <= n_B");
  double w = 1.0;
  for (std::size_t h = 0; h < nus.size(); ++h) {
    if (nus[h] < 1.0) throw InvalidInput("symplectic_spectrum_weight: nu below 1");
    for (std::size_t k = 0; k < h; ++k) {
      const double d = nus[h] * nus[h] - nus[k] * nus[k];
      w *= d * d;
    }
    const double v2 = nus[h] * nus[h];
    w *= v2 * std::pow(v2 - 1.0, static_cast<double>(n_b - n_a));
  }
  return w;
}

std::string_view to_string(EnergyEnsemble e) {
  return e == EnergyEnsemble::Canonical ? "canonical" : "microcanonical";
}

EnergyEnsemble parse_energy_ensemble(std::string_view name) {
  if (name == "canonical") return EnergyEnsemble::Canonical;
  if (name == "microcanonical" || name == "micro-canonical") return EnergyEnsemble::Microcanonical;
  throw InvalidInput(fmt::format("unknown ensemble '{}' (canonical, microcanonical)", name));
}

MonteCarloEstimate mc_inverse_purity_squared(EnergyEnsemble ensemble, std::size_t n, double parameter,
                                             std::size_t n_samples, std::uint64_t seed, std::size_t threads) {
  require_modes(n, "mc_inverse_purity_squared");
  if (n_samples < 2) throw InvalidInput("mc_inverse_purity_squared: need at least 2 samples");
  std::vector<RunningStats> partial(chunk_count(n_samples));
  for_each_chunk(n_samples, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      const EnergyVector e = ensemble == EnergyEnsemble::Canonical
                                 ? sample_canonical_energies(n, parameter, rng)
                                 : sample_microcanonical_energies(n, parameter, rng);
      const CovarianceMatrix sigma = build_covariance(factors_from_energies(e, rng));
      partial[c.index].add(sigma.sigma().topLeftCorner(2, 2).determinant());
    }
  });
  RunningStats total;
  for (const auto& s : partial) total.merge(s);
  return to_estimate(total, seed);
}

std::vector<double> microcanonical_marginal_samples(std::size_t n, double total_energy, std::size_t n_samples,
                                                    std::uint64_t seed, std::size_t threads) {
  std::vector<double> out(n_samples);
  for_each_chunk(n_samples, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      out[i] = sample_microcanonical_energies(n, total_energy, rng).e[0] - 2.0;
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace typent
