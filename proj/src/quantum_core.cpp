#include "typent/quantum_core.hpp"

#include "typent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace typent {

PureState::PureState(Eigen::VectorXcd amplitudes, std::size_t dim_a, std::size_t dim_b)
    : amplitudes_(std::move(amplitudes)), dim_a_(dim_a), dim_b_(dim_b) {
  if (dim_a == 0 || dim_b == 0) {
    throw InvalidInput("PureState: subsystem dimensions must be positive");
  }
  if (static_cast<std::size_t>(amplitudes_.size()) != dim_a * dim_b) {
    throw InvalidInput(fmt::format("PureState: {} amplitudes for dims {}x{}", amplitudes_.size(),
                                   dim_a, dim_b));
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-10) {
    throw InvalidInput(fmt::format("PureState: squared norm {} is not 1", norm2));
  }
}

PureState PureState::basis(std::size_t index, std::size_t dim_a, std::size_t dim_b) {
  if (index >= dim_a * dim_b) {
    throw InvalidInput("PureState::basis: index out of range");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim_a * dim_b));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v), dim_a, dim_b);
}

Eigen::MatrixXcd PureState::coefficients() const {
  // Row-major reshape: element (i, j) is amplitude i * dim_b + j.
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(amplitudes_.data(), static_cast<Eigen::Index>(dim_a_),
                                    static_cast<Eigen::Index>(dim_b_));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw InvalidInput("DensityMatrix: matrix must be square and non-empty");
  }
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) {
    throw InvalidInput(fmt::format("DensityMatrix: not Hermitian (deviation {})", herm));
  }
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    throw InvalidInput(fmt::format("DensityMatrix: trace {} is not 1", tr));
  }
  const double min_eig = eigenvalues().minCoeff();
  if (min_eig < -1e-10) {
    throw InvalidInput(fmt::format("DensityMatrix: negative eigenvalue {}", min_eig));
  }
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return entries_.squaredNorm();
}

EntanglementSpectrum::EntanglementSpectrum(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw InvalidInput("EntanglementSpectrum: empty");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput(fmt::format("EntanglementSpectrum: value {} outside [0,1]", p));
    }
    if (i > 0 && p > probs_[i - 1]) {
      throw InvalidInput("EntanglementSpectrum: values must be descending");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw InvalidInput(fmt::format("EntanglementSpectrum: sum {} is not 1", sum));
  }
}

EntanglementSpectrum EntanglementSpectrum::from_weights(std::vector<double> weights) {
  for (double& w : weights) {
    if (!(w >= kSpectrumFloor)) w = 0.0;
  }
  std::sort(weights.begin(), weights.end(), std::greater<>());
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    throw InvalidInput("EntanglementSpectrum: no positive weight");
  }
  for (double& w : weights) w = std::min(1.0, w / total);
  return EntanglementSpectrum(std::move(weights));
}

Subsystem parse_subsystem(std::string_view label) {
  if (label == "A" || label == "a") return Subsystem::A;
  if (label == "B" || label == "b") return Subsystem::B;
  throw InvalidInput(fmt::format("unknown subsystem label '{}'", label));
}

EntanglementSpectrum schmidt_spectrum(const Eigen::VectorXcd& amplitudes, std::size_t dim_a,
                                      std::size_t dim_b) {
  if (dim_a == 0 || dim_b == 0 || static_cast<std::size_t>(amplitudes.size()) != dim_a * dim_b) {
    throw InvalidInput(fmt::format("schmidt_spectrum: {} amplitudes do not match dims {}x{}",
                                   amplitudes.size(), dim_a, dim_b));
  }
  using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> psi(amplitudes.data(), static_cast<Eigen::Index>(dim_a),
                                       static_cast<Eigen::Index>(dim_b));
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(psi);
  const Eigen::VectorXd& sv = svd.singularValues();
  std::vector<double> p(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) p[static_cast<std::size_t>(i)] = sv(i) * sv(i);
  return EntanglementSpectrum::from_weights(std::move(p));
}

EntanglementSpectrum schmidt_spectrum(const PureState& state) {
  return schmidt_spectrum(state.amplitudes(), state.dim_a(), state.dim_b());
}

DensityMatrix partial_trace(const PureState& state, Subsystem keep) {
  const Eigen::MatrixXcd psi = state.coefficients();
  // rho_A = Psi Psi^dagger, rho_B = Psi^T Psi^*.
  Eigen::MatrixXcd rho = keep == Subsystem::A ? Eigen::MatrixXcd(psi * psi.adjoint())
                                              : Eigen::MatrixXcd(psi.transpose() * psi.conjugate());
  // Remove rounding asymmetry before validation.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

double shannon_bits(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x >= kSpectrumFloor) h -= x * std::log2(x);
  }
  return h;
}

double entropy(const EntanglementSpectrum& spectrum, double q) {
  if (!(q >= 0.0)) {
    throw InvalidInput(fmt::format("entropy: order q = {} must be nonnegative", q));
  }
  if (q == 1.0) return shannon_bits(spectrum.probs());
  if (q == 2.0) return -std::log2(purity(spectrum));
  double s = 0.0;
  for (double p : spectrum.probs()) {
    if (p >= kSpectrumFloor) s += std::pow(p, q);
  }
  return std::log2(s) / (1.0 - q);
}

double purity(const EntanglementSpectrum& spectrum) {
  double s = 0.0;
  for (double p : spectrum.probs()) {
    if (p >= kSpectrumFloor) s += p * p;
  }
  return s;
}

}  // namespace typent
