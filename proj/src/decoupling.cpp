#include "typent/decoupling.hpp"

#include "typent/circuits.hpp"
#include "typent/errors.hpp"
#include "typent/haar.hpp"
#include "typent/parallel.hpp"
#include "typent/quantum_core.hpp"
#include "typent/spectral.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace typent {

namespace {

void check_dims(TripartiteDims d) {
  if (d.a == 0 || d.b == 0 || d.c == 0) throw InvalidInput("tripartite dims must be positive");
  if (d.a > kMaxTripartiteDim || d.b > kMaxTripartiteDim || d.c > kMaxTripartiteDim ||
      d.total() > kMaxTripartiteDim) {
    throw CapabilityError(fmt::format("tripartite dimension {}x{}x{} exceeds {}", d.a, d.b, d.c,
                                      kMaxTripartiteDim));
  }
}

}  // namespace

TripartiteState::TripartiteState(Eigen::VectorXcd amplitudes, TripartiteDims dims)
    : amplitudes_(std::move(amplitudes)), dims_(dims) {
  check_dims(dims);
  if (static_cast<std::size_t>(amplitudes_.size()) != dims.total()) {
    throw InvalidInput(fmt::format("TripartiteState: {} amplitudes for dims {}x{}x{}", amplitudes_.size(),
                                   dims.a, dims.b, dims.c));
  }
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) throw InvalidInput("TripartiteState: not normalized");
}

TripartiteState product_zero_state(TripartiteDims dims) {
  check_dims(dims);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dims.total()));
  v[0] = 1.0;
  return TripartiteState(std::move(v), dims);
}

TripartiteState embedded_entangled_state(TripartiteDims dims) {
  check_dims(dims);
  const std::size_t m = std::min(dims.a * dims.b, dims.c);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dims.total()));
  const double amp = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t k = 0; k < m; ++k) v[static_cast<Eigen::Index>(k * dims.c + k)] = amp;
  return TripartiteState(std::move(v), dims);
}

std::string_view to_string(DecouplingInitial kind) {
  return kind == DecouplingInitial::Product ? "product" : "entangled";
}

DecouplingInitial parse_decoupling_initial(std::string_view name) {
  if (name == "product") return DecouplingInitial::Product;
  if (name == "entangled") return DecouplingInitial::Entangled;
  throw InvalidInput(fmt::format("unknown initial state '{}' (product, entangled)", name));
}

TripartiteState make_initial_state(DecouplingInitial kind, TripartiteDims dims) {
  return kind == DecouplingInitial::Product ? product_zero_state(dims) : embedded_entangled_state(dims);
}

Eigen::MatrixXcd reduced_ac(const TripartiteState& state) {
  const auto [na, nb, nc] = state.dims();
  const auto dim = static_cast<Eigen::Index>(na * nc);
  // M[(a, c), b] = psi[(a, b, c)]; rho_AC = M M^dagger.
  Eigen::MatrixXcd m(dim, static_cast<Eigen::Index>(nb));
  const Eigen::VectorXcd& psi = state.amplitudes();
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t c = 0; c < nc; ++c) {
        m(static_cast<Eigen::Index>(a * nc + c), static_cast<Eigen::Index>(b)) =
            psi[static_cast<Eigen::Index>((a * nb + b) * nc + c)];
      }
    }
  }
  Eigen::MatrixXcd rho = m * m.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidInput("trace_distance: shape mismatch");
  }
  const Eigen::MatrixXcd d = a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

double decoupling_deviation(const TripartiteState& state, Rng& rng) {
  const auto [na, nb, nc] = state.dims();
  const auto dab = static_cast<Eigen::Index>(na * nb);
  const UnitaryMatrix u = sample_haar_unitary(na * nb, rng);
  // Column-major view: column c holds the AB amplitudes for fixed c.
  const Eigen::Map<const Eigen::MatrixXcd> psi(state.amplitudes().data(), static_cast<Eigen::Index>(nc), dab);
  const Eigen::MatrixXcd rotated = psi * u.matrix().transpose();
  Eigen::VectorXcd out(static_cast<Eigen::Index>(state.dims().total()));
  Eigen::Map<Eigen::MatrixXcd>(out.data(), static_cast<Eigen::Index>(nc), dab) = rotated;
  out.normalize();
  const TripartiteState evolved(std::move(out), state.dims());

  const Eigen::MatrixXcd rho_ac = reduced_ac(evolved);
  const auto inc = static_cast<Eigen::Index>(nc);
  Eigen::MatrixXcd rho_c = Eigen::MatrixXcd::Zero(inc, inc);
  for (std::size_t a = 0; a < na; ++a) {
    rho_c += rho_ac.block(static_cast<Eigen::Index>(a * nc), static_cast<Eigen::Index>(a * nc), inc, inc);
  }
  Eigen::MatrixXcd target = Eigen::MatrixXcd::Zero(rho_ac.rows(), rho_ac.cols());
  for (std::size_t a = 0; a < na; ++a) {
    target.block(static_cast<Eigen::Index>(a * nc), static_cast<Eigen::Index>(a * nc), inc, inc) =
        rho_c / static_cast<double>(na);
  }
  return std::clamp(trace_distance(rho_ac, target), 0.0, 1.0);
}

MonteCarloEstimate mean_decoupling_deviation(const TripartiteState& state, std::size_t n_samples,
                                             std::uint64_t seed, std::size_t threads) {
  if (n_samples < 2) throw InvalidInput("mean_decoupling_deviation: need at least 2 samples");
  std::vector<RunningStats> partial(chunk_count(n_samples));
  for_each_chunk(n_samples, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) partial[c.index].add(decoupling_deviation(state, rng));
  });
  RunningStats total;
  for (const auto& s : partial) total.merge(s);
  return to_estimate(total, seed);
}

double decoupling_margin(std::size_t na, std::size_t nb, std::size_t nc, double purity_ac) {
  if (na == 0 || nb == 0 || nc == 0) throw InvalidInput("decoupling_margin: dims must be positive");
  if (!(purity_ac > 0.0 && purity_ac <= 1.0)) throw InvalidInput("decoupling_margin: purity must lie in (0, 1]");
  return 2.0 * std::log2(static_cast<double>(nb)) -
         (std::log2(static_cast<double>(na)) + std::log2(static_cast<double>(nc)) - std::log2(purity_ac));
}

std::vector<PageCurvePoint> page_curve(std::size_t n, std::size_t n_samples, std::uint64_t seed,
                                       std::size_t threads) {
  if (n == 0 || n > kMaxStatevectorQubits) {
    throw CapabilityError(fmt::format("page_curve: n = {} outside 1..{}", n, kMaxStatevectorQubits));
  }
  if (n_samples < 2) throw InvalidInput("page_curve: need at least 2 samples");
  std::vector<std::vector<RunningStats>> partial(chunk_count(n_samples), std::vector<RunningStats>(n + 1));
  for_each_chunk(n_samples, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      const PureState psi = sample_random_pure_state(std::size_t{1} << n, 1, rng);
      partial[c.index][0].add(0.0);
      partial[c.index][n].add(0.0);
      for (std::size_t k = 1; k < n; ++k) {
        const EntanglementSpectrum s =
            schmidt_spectrum(psi.amplitudes(), std::size_t{1} << k, std::size_t{1} << (n - k));
        partial[c.index][k].add(entropy(s, 1.0));
      }
    }
  });
  std::vector<PageCurvePoint> out;
  for (std::size_t k = 0; k <= n; ++k) {
    RunningStats total;
    for (const auto& p : partial) total.merge(p[k]);
    const std::size_t small = std::min(k, n - k);
    const double page =
        small == 0 ? 0.0
                   : page_average_entropy(BipartiteDims::make(std::size_t{1} << small, std::size_t{1} << (n - small)));
    out.push_back({k, total.mean(), total.std_error(), page});
  }
  return out;
}

std::size_t page_curve_peak(const std::vector<PageCurvePoint>& curve) {
  if (curve.empty()) throw InvalidInput("page_curve_peak: empty curve");
  double best = curve.front().mean_entropy_bits;
  for (const auto& p : curve) best = std::max(best, p.mean_entropy_bits);
  for (const auto& p : curve) {
    if (p.mean_entropy_bits >= best - 1e-9) return p.n_a;
  }
  return curve.front().n_a;
}

}  // namespace typent
