#include "typent/circuits.hpp"

#include "typent/errors.hpp"
#include "typent/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace typent {

namespace {

std::size_t qubit_count(std::size_t dim) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim || n == 0) {
    throw InvalidInput(fmt::format("statevector length {} is not 2^n with n >= 1", dim));
  }
  return n;
}

void apply_single(Eigen::VectorXcd& psi, std::size_t n, std::size_t q, const Eigen::MatrixXcd& u) {
  const std::size_t bit = std::size_t{1} << (n - 1 - q);
  const auto dim = static_cast<std::size_t>(psi.size());
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const cplx a0 = psi[static_cast<Eigen::Index>(i)];
    const cplx a1 = psi[static_cast<Eigen::Index>(i | bit)];
    psi[static_cast<Eigen::Index>(i)] = u(0, 0) * a0 + u(0, 1) * a1;
    psi[static_cast<Eigen::Index>(i | bit)] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

double reduced_purity(const Eigen::VectorXcd& psi, std::size_t n, std::size_t n_a) {
  const auto da = static_cast<Eigen::Index>(std::size_t{1} << n_a);
  const auto db = static_cast<Eigen::Index>(std::size_t{1} << (n - n_a));
  // Column-major map of the row-major coefficient matrix is Psi^T.
  const Eigen::Map<const Eigen::MatrixXcd> psi_t(psi.data(), db, da);
  return (psi_t.adjoint() * psi_t).squaredNorm();
}

unsigned letter(std::uint32_t s, std::size_t n, std::size_t q) {
  return (s >> (2 * (n - 1 - q))) & 3u;
}

std::uint32_t with_letter(std::uint32_t s, std::size_t n, std::size_t q, unsigned l) {
  const unsigned shift = static_cast<unsigned>(2 * (n - 1 - q));
  return (s & ~(3u << shift)) | (l << shift);
}

struct Transition {
  unsigned control;
  unsigned target;
  double prob;
};

// Twirl both letters, then conjugate by CNOT.
std::array<std::vector<Transition>, 16> build_transitions() {
  std::array<std::vector<Transition>, 16> table;
  for (unsigned a = 0; a < 4; ++a) {
    for (unsigned b = 0; b < 4; ++b) {
      std::vector<Transition>& out = table[a * 4 + b];
      const std::vector<unsigned> as = a == 0 ? std::vector<unsigned>{0} : std::vector<unsigned>{1, 2, 3};
      const std::vector<unsigned> bs = b == 0 ? std::vector<unsigned>{0} : std::vector<unsigned>{1, 2, 3};
      const double p = 1.0 / static_cast<double>(as.size() * bs.size());
      for (unsigned x : as) {
        for (unsigned y : bs) {
          const auto [c, t] = cnot_conjugate(x, y);
          out.push_back({c, t, p});
        }
      }
    }
  }
  return table;
}

}  // namespace

RandomGate sample_gate(std::size_t n, Rng& rng) {
  if (n < 2) throw InvalidInput("sample_gate: need at least 2 qubits");
  const std::uint64_t k = rng.index(n * (n - 1));
  const auto c = static_cast<std::size_t>(k / (n - 1));
  auto t = static_cast<std::size_t>(k % (n - 1));
  if (t >= c) ++t;
  UnitaryMatrix u = sample_haar_unitary(2, rng);
  UnitaryMatrix v = sample_haar_unitary(2, rng);
  return {c, t, std::move(u), std::move(v)};
}

void apply_gate(Eigen::VectorXcd& psi, std::size_t n, const RandomGate& gate) {
  if (static_cast<std::size_t>(psi.size()) != (std::size_t{1} << n)) {
    throw InvalidInput("apply_gate: statevector size does not match n");
  }
  if (gate.control >= n || gate.target >= n || gate.control == gate.target) {
    throw InvalidInput("apply_gate: bad control/target");
  }
  apply_single(psi, n, gate.control, gate.u_control.matrix());
  apply_single(psi, n, gate.target, gate.u_target.matrix());
  const std::size_t cbit = std::size_t{1} << (n - 1 - gate.control);
  const std::size_t tbit = std::size_t{1} << (n - 1 - gate.target);
  for (std::size_t i = 0; i < static_cast<std::size_t>(psi.size()); ++i) {
    if ((i & cbit) && !(i & tbit)) {
      std::swap(psi[static_cast<Eigen::Index>(i)], psi[static_cast<Eigen::Index>(i | tbit)]);
    }
  }
}

Eigen::MatrixXcd gate_matrix(std::size_t n, const RandomGate& gate) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
    e[j] = 1.0;
    apply_gate(e, n, gate);
    m.col(j) = e;
  }
  return m;
}

std::vector<TrajectoryPoint> evolve_trajectory(const Eigen::VectorXcd& initial, std::size_t n_a,
                                               std::size_t gates, Rng& rng,
                                               std::size_t record_every) {
  const auto dim = static_cast<std::size_t>(initial.size());
  if (dim > (std::size_t{1} << kMaxStatevectorQubits)) {
    throw CapabilityError(fmt::format("evolve_trajectory: statevector of length {} exceeds 2^{}", dim,
                                      kMaxStatevectorQubits));
  }
  const std::size_t n = qubit_count(dim);
  if (n_a < 1 || n_a >= n) throw InvalidInput(fmt::format("evolve_trajectory: need 1 <= n_A < {}", n));
  if (record_every == 0) throw InvalidInput("evolve_trajectory: record_every must be positive");
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw InvalidInput("evolve_trajectory: state not normalized");

  Eigen::VectorXcd psi = initial;
  std::vector<TrajectoryPoint> out;
  auto record = [&](std::size_t step) {
    psi.normalize();
    const EntanglementSpectrum s = schmidt_spectrum(psi, std::size_t{1} << n_a, std::size_t{1} << (n - n_a));
    out.push_back({step, entropy(s, 1.0), purity(s)});
  };
  record(0);
  for (std::size_t step = 1; step <= gates; ++step) {
    apply_gate(psi, n, sample_gate(n, rng));
    if (step % record_every == 0 || step == gates) record(step);
  }
  return out;
}

std::uint64_t gate_count_bound(std::size_t n, double eps) {
  if (n < 2) throw InvalidInput("gate_count_bound: need n >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("gate_count_bound: eps must lie in (0, 1)");
  const double nn = static_cast<double>(n);
  const double value = 9.0 * nn * (nn - 1.0) * (3.0 * std::numbers::ln2 * nn + std::log(1.0 / eps)) / 4.0;
  return static_cast<std::uint64_t>(std::ceil(value));
}

std::pair<unsigned, unsigned> cnot_conjugate(unsigned control_letter, unsigned target_letter) {
  // Row: control letter, column: target letter; entries (control', target').
  static constexpr std::array<std::array<std::pair<unsigned, unsigned>, 4>, 4> kTable{{
      {{{0, 0}, {0, 1}, {3, 2}, {3, 3}}},
      {{{1, 1}, {1, 0}, {2, 3}, {2, 2}}},
      {{{2, 1}, {2, 0}, {1, 3}, {1, 2}}},
      {{{3, 0}, {3, 1}, {0, 2}, {0, 3}}},
  }};
  if (control_letter > 3 || target_letter > 3) throw InvalidInput("cnot_conjugate: letters are 0..3");
  return kTable[control_letter][target_letter];
}

PauliWeightDistribution::PauliWeightDistribution(std::size_t n,
                                                 std::vector<std::pair<std::uint32_t, double>> weights)
    : n_(n), weights_(std::move(weights)) {
  if (n == 0 || n > 15) throw InvalidInput(fmt::format("PauliWeightDistribution: unsupported n = {}", n));
  const std::uint64_t limit = std::uint64_t{1} << (2 * n);
  std::sort(weights_.begin(), weights_.end());
  std::vector<std::pair<std::uint32_t, double>> merged;
  for (const auto& [s, w] : weights_) {
    if (s >= limit) throw InvalidInput(fmt::format("PauliWeightDistribution: string {} out of range", s));
    if (!(w >= 0.0)) throw InvalidInput("PauliWeightDistribution: negative weight");
    if (w == 0.0) continue;
    if (!merged.empty() && merged.back().first == s) {
      merged.back().second += w;
    } else {
      merged.emplace_back(s, w);
    }
  }
  weights_ = std::move(merged);
  if (std::abs(total() - 1.0) > 1e-10) {
    throw InvalidInput(fmt::format("PauliWeightDistribution: weights sum to {}", total()));
  }
}

double PauliWeightDistribution::weight(std::uint32_t string_index) const {
  const auto it = std::lower_bound(weights_.begin(), weights_.end(), std::make_pair(string_index, 0.0));
  return it != weights_.end() && it->first == string_index ? it->second : 0.0;
}

double PauliWeightDistribution::total() const {
  double t = 0.0;
  for (const auto& [s, w] : weights_) t += w;
  return t;
}

PauliWeightDistribution pauli_initial_distribution(std::size_t n, std::size_t basis_index) {
  if (n == 0 || n > kMaxPauliChainQubits) {
    throw CapabilityError(fmt::format("pauli_initial_distribution: n = {} outside 1..{}", n, kMaxPauliChainQubits));
  }
  if (basis_index >= (std::size_t{1} << n)) throw InvalidInput("pauli_initial_distribution: basis index out of range");
  // Strings in {I, Z}^n: each subset of qubits carrying Z.
  std::vector<std::pair<std::uint32_t, double>> w;
  const double each = std::ldexp(1.0, -static_cast<int>(n));
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::uint32_t s = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (mask & (1u << (n - 1 - q))) s = with_letter(s, n, q, 3);
    }
    w.emplace_back(s, each);
  }
  return PauliWeightDistribution(n, std::move(w));
}

PauliWeightDistribution pauli_initial_distribution(const Eigen::VectorXcd& state) {
  const std::size_t n = qubit_count(static_cast<std::size_t>(state.size()));
  Eigen::Index where = 0;
  const double peak = state.cwiseAbs().maxCoeff(&where);
  if (std::abs(peak - 1.0) > 1e-12 || std::abs(state.squaredNorm() - 1.0) > 1e-12) {
    throw UnsupportedInput("pauli_initial_distribution: only computational basis states are supported");
  }
  return pauli_initial_distribution(n, static_cast<std::size_t>(where));
}

PauliWeightDistribution pauli_markov_step(const PauliWeightDistribution& dist) {
  const std::size_t n = dist.n();
  if (n > kMaxPauliChainQubits) {
    throw CapabilityError(fmt::format("pauli_markov_step: n = {} exceeds {}", n, kMaxPauliChainQubits));
  }
  if (n < 2) throw InvalidInput("pauli_markov_step: need at least 2 qubits");
  static const std::array<std::vector<Transition>, 16> kTransitions = build_transitions();
  std::vector<double> acc(std::size_t{1} << (2 * n), 0.0);
  const double pair_weight = 1.0 / static_cast<double>(n * (n - 1));
  for (const auto& [s, w] : dist.weights()) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t t = 0; t < n; ++t) {
        if (t == c) continue;
        const unsigned a = letter(s, n, c);
        const unsigned b = letter(s, n, t);
        for (const Transition& tr : kTransitions[a * 4 + b]) {
          const std::uint32_t s2 = with_letter(with_letter(s, n, c, tr.control), n, t, tr.target);
          acc[s2] += w * pair_weight * tr.prob;
        }
      }
    }
  }
  std::vector<std::pair<std::uint32_t, double>> out;
  for (std::uint32_t s = 0; s < acc.size(); ++s) {
    if (acc[s] > 0.0) out.emplace_back(s, acc[s]);
  }
  return PauliWeightDistribution(n, std::move(out));
}

double expected_purity(const PauliWeightDistribution& dist, std::size_t n_a) {
  const std::size_t n = dist.n();
  if (n_a < 1 || n_a >= n) throw InvalidInput(fmt::format("expected_purity: need 1 <= n_A < {}", n));
  const std::size_t n_b = n - n_a;
  const std::uint32_t outside = (1u << (2 * n_b)) - 1u;
  double inside = 0.0;
  for (const auto& [s, w] : dist.weights()) {
    if ((s & outside) == 0) inside += w;
  }
  return std::ldexp(inside, static_cast<int>(n_b));
}

PauliWeightDistribution pauli_stationary_distribution(std::size_t n) {
  if (n == 0 || n > kMaxPauliChainQubits) {
    throw CapabilityError(fmt::format("pauli_stationary_distribution: n = {} outside 1..{}", n, kMaxPauliChainQubits));
  }
  const std::uint32_t count = 1u << (2 * n);
  const double id = std::ldexp(1.0, -static_cast<int>(n));
  const double rest = (1.0 - id) / static_cast<double>(count - 1);
  std::vector<std::pair<std::uint32_t, double>> w;
  w.reserve(count);
  w.emplace_back(0, id);
  for (std::uint32_t s = 1; s < count; ++s) w.emplace_back(s, rest);
  return PauliWeightDistribution(n, std::move(w));
}

std::vector<double> pauli_chain_purity(std::size_t n, std::size_t n_a, std::size_t steps) {
  PauliWeightDistribution d = pauli_initial_distribution(n, 0);
  std::vector<double> out{expected_purity(d, n_a)};
  for (std::size_t k = 0; k < steps; ++k) {
    d = pauli_markov_step(d);
    out.push_back(expected_purity(d, n_a));
  }
  return out;
}

std::vector<MonteCarloEstimate> statevector_purity(std::size_t n, std::size_t n_a, std::size_t steps,
                                                   std::size_t n_samples, std::uint64_t seed,
                                                   std::size_t threads) {
  if (n < 2 || n > kMaxStatevectorQubits) {
    throw CapabilityError(fmt::format("statevector_purity: n = {} outside 2..{}", n, kMaxStatevectorQubits));
  }
  if (n_a < 1 || n_a >= n) throw InvalidInput("statevector_purity: need 1 <= n_A < n");
  if (n_samples < 2) throw InvalidInput("statevector_purity: need at least 2 samples");
  const std::size_t chunks = chunk_count(n_samples);
  std::vector<std::vector<RunningStats>> partial(chunks, std::vector<RunningStats>(steps + 1));
  for_each_chunk(n_samples, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
      psi[0] = 1.0;
      partial[c.index][0].add(reduced_purity(psi, n, n_a));
      for (std::size_t k = 1; k <= steps; ++k) {
        apply_gate(psi, n, sample_gate(n, rng));
        partial[c.index][k].add(reduced_purity(psi, n, n_a));
      }
    }
  });
  std::vector<MonteCarloEstimate> out;
  for (std::size_t k = 0; k <= steps; ++k) {
    RunningStats total;
    for (const auto& p : partial) total.merge(p[k]);
    out.push_back(to_estimate(total, seed));
  }
  return out;
}

}  // namespace typent
