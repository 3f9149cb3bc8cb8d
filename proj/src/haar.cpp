#include "typent/haar.hpp"

#include "typent/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace typent {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::size_t log2_exact(std::size_t x) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < x) ++n;
  return n;
}

// Left-multiplies `m` by the two-level rotation acting on rows i, j.
void apply_rotation(Eigen::MatrixXcd& m, std::size_t i, std::size_t j, double theta, double phi,
                    double chi) {
  const cplx a = std::cos(theta) * std::polar(1.0, phi);
  const cplx b = std::sin(theta) * std::polar(1.0, chi);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  const Eigen::RowVectorXcd ri = m.row(ii);
  const Eigen::RowVectorXcd rj = m.row(jj);
  m.row(ii) = a * ri + b * rj;
  m.row(jj) = -std::conj(b) * ri + std::conj(a) * rj;
}

}  // namespace

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw InvalidInput("UnitaryMatrix: matrix must be square and non-empty");
  }
  const auto n = entries_.rows();
  const double dev =
      (entries_.adjoint() * entries_ - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (dev > 1e-9) {
    throw InvalidInput(fmt::format("UnitaryMatrix: U^dagger U deviates from I by {}", dev));
  }
}

UnitaryMatrix sample_haar_unitary(std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidInput("sample_haar_unitary: dimension must be positive");
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd z(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : cplx{1.0, 0.0};
  }
  return UnitaryMatrix(std::move(q));
}

std::size_t HurwitzAngles::pair_index(std::size_t k, std::size_t l) {
  return (l - 1) * (l - 2) / 2 + (k - 1);
}

void validate(const HurwitzAngles& a) {
  if (a.n == 0) throw InvalidInput("HurwitzAngles: n must be positive");
  const std::size_t pairs = a.n * (a.n - 1) / 2;
  if (a.theta.size() != pairs || a.phi.size() != pairs || a.chi.size() != a.n - 1) {
    throw InvalidInput(fmt::format("HurwitzAngles: incomplete index set for n = {}", a.n));
  }
  auto in_phase_range = [](double x) { return x >= 0.0 && x < kTwoPi; };
  if (!in_phase_range(a.alpha)) throw InvalidInput("HurwitzAngles: alpha outside [0, 2pi)");
  for (std::size_t i = 0; i < pairs; ++i) {
    if (!(a.theta[i] >= 0.0 && a.theta[i] <= std::numbers::pi / 2)) {
      throw InvalidInput(fmt::format("HurwitzAngles: theta {} outside [0, pi/2]", a.theta[i]));
    }
    if (!in_phase_range(a.phi[i])) throw InvalidInput("HurwitzAngles: phi outside [0, 2pi)");
  }
  for (double c : a.chi) {
    if (!in_phase_range(c)) throw InvalidInput("HurwitzAngles: chi outside [0, 2pi)");
  }
}

UnitaryMatrix hurwitz_unitary(const HurwitzAngles& a) {
  validate(a);
  const auto dim = static_cast<Eigen::Index>(a.n);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  // U = e^{i alpha} F_N F_{N-1} ... F_2 with F_l = R(1,2) R(2,3) ... R(l-1,l) built from the
  // (k, l) angles. F_l maps e_l to a uniformly distributed unit vector of the first l
  // coordinates, so the product is Haar distributed. Left-multiplying F_2 first, and within
  // F_l the rightmost rotation first, assembles the product.
  for (std::size_t l = 2; l <= a.n; ++l) {
    for (std::size_t k = l - 1; k >= 1; --k) {
      const std::size_t idx = HurwitzAngles::pair_index(k, l);
      const double chi = k == 1 ? a.chi[l - 2] : 0.0;
      apply_rotation(u, k - 1, k, a.theta[idx], a.phi[idx], chi);
    }
  }
  u *= std::polar(1.0, a.alpha);
  return UnitaryMatrix(std::move(u));
}

HurwitzAngles sample_hurwitz_angles(std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidInput("sample_hurwitz_angles: n must be positive");
  HurwitzAngles a;
  a.n = n;
  const std::size_t pairs = n * (n - 1) / 2;
  a.theta.resize(pairs);
  a.phi.resize(pairs);
  a.alpha = kTwoPi * rng.uniform();
  for (std::size_t l = 2; l <= n; ++l) {
    for (std::size_t k = 1; k < l; ++k) {
      const std::size_t idx = HurwitzAngles::pair_index(k, l);
      // sin^{2k}(theta) is uniform on [0, 1].
      a.theta[idx] = std::asin(std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(k))));
      a.phi[idx] = kTwoPi * rng.uniform();
    }
  }
  a.chi.resize(n - 1);
  for (double& c : a.chi) c = kTwoPi * rng.uniform();
  return a;
}

PureState sample_random_pure_state(std::size_t dim_a, std::size_t dim_b, Rng& rng) {
  if (dim_a == 0 || dim_b == 0) {
    throw InvalidInput("sample_random_pure_state: dimensions must be positive");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim_a * dim_b));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  v /= v.norm();
  return PureState(std::move(v), dim_a, dim_b);
}

DensityMatrix sample_induced_mixed_state(std::size_t dim_s, std::size_t dim_e, Rng& rng) {
  return partial_trace(sample_random_pure_state(dim_s, dim_e, rng), Subsystem::A);
}

DensityMatrix sample_fixed_purity_state(std::span<const double> spectrum, Rng& rng) {
  if (spectrum.empty()) throw InvalidInput("sample_fixed_purity_state: empty spectrum");
  double sum = 0.0;
  for (double p : spectrum) {
    if (!(p >= 0.0)) throw InvalidInput("sample_fixed_purity_state: negative eigenvalue");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw InvalidInput(fmt::format("sample_fixed_purity_state: spectrum sums to {}", sum));
  }
  const UnitaryMatrix u = sample_haar_unitary(spectrum.size(), rng);
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(spectrum.size()));
  for (std::size_t i = 0; i < spectrum.size(); ++i) lambda(static_cast<Eigen::Index>(i)) = spectrum[i];
  Eigen::MatrixXcd rho = u.matrix() * lambda.asDiagonal() * u.matrix().adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

std::vector<double> spectrum_with_purity(double purity, std::size_t dim) {
  if (dim == 0) throw InvalidInput("spectrum_with_purity: dim must be positive");
  const double d = static_cast<double>(dim);
  if (!(purity >= 1.0 / d - 1e-12 && purity <= 1.0 + 1e-12)) {
    throw InvalidInput(fmt::format("spectrum_with_purity: purity {} outside [1/{}, 1]", purity, dim));
  }
  if (dim == 1) return {1.0};
  const double x = (1.0 + std::sqrt(std::max(0.0, (d - 1.0) * (d * purity - 1.0)))) / d;
  std::vector<double> p(dim, (1.0 - x) / (d - 1.0));
  p[0] = x;
  for (double& v : p) v = std::max(0.0, v);
  return p;
}

namespace {

// Matrix element <row| sigma^letter |col> for a single qubit.
cplx pauli_element(int letter, int row, int col) {
  switch (letter) {
    case 0: return row == col ? 1.0 : 0.0;
    case 1: return row != col ? 1.0 : 0.0;
    case 2:
      if (row == col) return 0.0;
      return row == 0 ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
    default:
      if (row != col) return 0.0;
      return row == 0 ? 1.0 : -1.0;
  }
}

int letter_of(std::size_t string_index, std::size_t n, std::size_t qubit) {
  return static_cast<int>((string_index >> (2 * (n - 1 - qubit))) & 3U);
}

// Tr(g_s M) for a 2^n x 2^n matrix, using that g_s maps |k> to a multiple of
// |k xor flip(s)>.
cplx pauli_trace(const Eigen::MatrixXcd& m, std::size_t n, std::size_t s) {
  std::size_t flip = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const int l = letter_of(s, n, q);
    if (l == 1 || l == 2) flip |= std::size_t{1} << (n - 1 - q);
  }
  const std::size_t dim = std::size_t{1} << n;
  cplx total = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const std::size_t k = j ^ flip;
    cplx g = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t bit = n - 1 - q;
      g *= pauli_element(letter_of(s, n, q), static_cast<int>((j >> bit) & 1U),
                         static_cast<int>((k >> bit) & 1U));
    }
    // (g M)_{jj} = g_{jk} M_{kj}
    total += g * m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
  }
  return total;
}

}  // namespace

Eigen::MatrixXcd pauli_string_matrix(std::size_t n, std::size_t s) {
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < dim; ++k) {
      cplx v = 1.0;
      for (std::size_t q = 0; q < n && v != 0.0; ++q) {
        const std::size_t bit = n - 1 - q;
        v *= pauli_element(letter_of(s, n, q), static_cast<int>((j >> bit) & 1U),
                           static_cast<int>((k >> bit) & 1U));
      }
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return g;
}

PauliCoefficients pauli_coefficients(const DensityMatrix& rho) {
  if (!is_power_of_two(rho.dim())) {
    throw InvalidInput(fmt::format("pauli_coefficients: dimension {} is not a power of two", rho.dim()));
  }
  const std::size_t n = log2_exact(rho.dim());
  PauliCoefficients c;
  c.n = n;
  c.normalization = PauliNormalization::Orthonormal;
  const std::size_t count = std::size_t{1} << (2 * n);
  c.xi.resize(count);
  const double scale = std::ldexp(1.0, -static_cast<int>(n)) * std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
  for (std::size_t s = 0; s < count; ++s) {
    // Tr(g rho) is real for Hermitian g and rho.
    c.xi[s] = scale * pauli_trace(rho.matrix(), n, s).real();
  }
  return c;
}

PauliCoefficients convert(const PauliCoefficients& c, PauliNormalization to) {
  if (c.normalization == to) return c;
  PauliCoefficients out = c;
  out.normalization = to;
  // orthonormal xi = 2^{n/2} * appendix xi
  const double f = std::sqrt(std::ldexp(1.0, static_cast<int>(c.n)));
  for (double& x : out.xi) x = to == PauliNormalization::Orthonormal ? x * f : x / f;
  return out;
}

Eigen::MatrixXcd reconstruct(const PauliCoefficients& c) {
  const PauliCoefficients orth = convert(c, PauliNormalization::Orthonormal);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << c.n);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t s = 0; s < orth.xi.size(); ++s) {
    if (orth.xi[s] != 0.0) rho += orth.xi[s] * pauli_string_matrix(c.n, s);
  }
  return rho / std::sqrt(std::ldexp(1.0, static_cast<int>(c.n)));
}

double average_local_purity_fixed_global(double purity, std::size_t n_a, std::size_t n_b) {
  const std::size_t n = n_a + n_b;
  const double min_purity = std::ldexp(1.0, -static_cast<int>(n));
  if (!(purity >= min_purity * (1.0 - 1e-12) && purity <= 1.0 + 1e-12)) {
    throw InvalidInput(fmt::format("average_local_purity_fixed_global: purity {} outside [2^-{}, 1]",
                                   purity, n));
  }
  const double four_na = std::ldexp(1.0, 2 * static_cast<int>(n_a));
  const double four_n = std::ldexp(1.0, 2 * static_cast<int>(n));
  return std::ldexp(1.0, -static_cast<int>(n_a)) +
         std::ldexp(1.0, static_cast<int>(n_b)) * (purity - min_purity) * (four_na - 1.0) /
             (four_n - 1.0);
}

Eigen::MatrixXcd partial_trace_b(const Eigen::MatrixXcd& rho, std::size_t dim_a, std::size_t dim_b) {
  if (static_cast<std::size_t>(rho.rows()) != dim_a * dim_b || rho.rows() != rho.cols()) {
    throw InvalidInput("partial_trace_b: dimension mismatch");
  }
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index a2 = 0; a2 < da; ++a2) {
      cplx s = 0.0;
      for (Eigen::Index b = 0; b < db; ++b) s += rho(a * db + b, a2 * db + b);
      out(a, a2) = s;
    }
  }
  return out;
}

}  // namespace typent
