#include "typent/circuits.hpp"
#include "typent/errors.hpp"
#include "typent/haar.hpp"
#include "typent/spectral.hpp"
#include "typent/stats.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <map>

using namespace typent;

namespace {

// Dense operators with qubit 0 as the most significant bit.
Eigen::MatrixXcd on_qubit(std::size_t n, std::size_t q, const Eigen::Matrix2cd& u) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = oracle::kron(out, k == q ? Eigen::MatrixXcd(u) : Eigen::MatrixXcd::Identity(2, 2));
  return out;
}

Eigen::MatrixXcd cnot(std::size_t n, std::size_t c, std::size_t t) {
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    const bool cbit = (x >> (n - 1 - c)) & 1U;
    const std::size_t y = cbit ? x ^ (std::size_t{1} << (n - 1 - t)) : x;
    m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = 1.0;
  }
  return m;
}

// Squared orthonormal Pauli coefficients of |psi><psi|.
std::vector<double> pauli_weights(const Eigen::VectorXcd& psi, std::size_t n) {
  const Eigen::MatrixXcd rho = psi * psi.adjoint();
  const std::size_t strings = std::size_t{1} << (2 * n);
  std::vector<double> w(strings);
  const double scale = std::ldexp(1.0, -static_cast<int>(n));
  for (std::size_t s = 0; s < strings; ++s) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) g = oracle::kron(g, oracle::pauli((s >> (2 * (n - 1 - k))) & 3U));
    const double xi = (g * rho).trace().real();
    w[s] = xi * xi * scale;
  }
  return w;
}

}  // namespace

TEST_CASE("gate count bound") {
  CHECK(gate_count_bound(4, 0.1) == 287);
  CHECK(gate_count_bound(2, 0.5) == 22);
  CHECK(gate_count_bound(4, 1e-6) > gate_count_bound(4, 1e-3));
  CHECK(gate_count_bound(4, 1e-12) > gate_count_bound(4, 1e-6));
  CHECK_THROWS_AS(gate_count_bound(4, 0.0), InvalidInput);
}

TEST_CASE("CNOT conjugation table matches matrix conjugation") {
  const Eigen::MatrixXcd cx = cnot(2, 0, 1);
  for (unsigned a = 0; a < 4; ++a) {
    for (unsigned b = 0; b < 4; ++b) {
      const Eigen::MatrixXcd image = cx * oracle::kron(oracle::pauli(a), oracle::pauli(b)) * cx;
      const auto [ca, cb] = cnot_conjugate(a, b);
      const Eigen::MatrixXcd expected = oracle::kron(oracle::pauli(ca), oracle::pauli(cb));
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::abs(std::abs((expected.adjoint() * image).trace()) - 4.0) < 1e-12);
    }
  }
}

TEST_CASE("sampled gates: ordered pairs, unitarity and in-place application") {
  Rng rng(1);
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  const int draws = 12000;
  for (int i = 0; i < draws; ++i) {
    const RandomGate g = sample_gate(4, rng);
    REQUIRE(g.control != g.target);
    counts[{g.control, g.target}] += 1;
  }
  CHECK(counts.size() == 12);
  double chi2 = 0.0;
  for (const auto& [pair, c] : counts) chi2 += std::pow(c - draws / 12.0, 2) / (draws / 12.0);
  CHECK(chi2 < 31.3);  // 99.9% point of chi^2 with 11 degrees of freedom

  int first = 0;
  for (int i = 0; i < 10000; ++i) first += sample_gate(2, rng).control == 0;
  CHECK(std::abs(first - 5000) < 3.0 * std::sqrt(2500.0));

  for (std::size_t n : {2, 3, 5}) {
    const RandomGate g = sample_gate(n, rng);
    const Eigen::MatrixXcd m = gate_matrix(n, g);
    const auto dim = m.rows();
    CHECK((m.adjoint() * m - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::MatrixXcd ref = cnot(n, g.control, g.target) * on_qubit(n, g.control, g.u_control.matrix()) *
                                 on_qubit(n, g.target, g.u_target.matrix());
    CHECK((m - ref).norm() < 1e-12);
    Eigen::VectorXcd psi = sample_random_pure_state(1, static_cast<std::size_t>(dim), rng).amplitudes();
    const Eigen::VectorXcd expected = ref * psi;
    apply_gate(psi, n, g);
    CHECK((psi - expected).norm() < 1e-12);
  }
  CHECK_THROWS_AS(sample_gate(1, rng), InvalidInput);
}

TEST_CASE("trajectories") {
  Rng rng(2);
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(64);
  zero(0) = 1.0;
  const auto none = evolve_trajectory(zero, 3, 0, rng);
  REQUIRE(none.size() == 1);
  CHECK(none[0].entropy_bits == doctest::Approx(0.0));
  CHECK(none[0].purity == doctest::Approx(1.0));
  const auto some = evolve_trajectory(zero, 3, 25, rng, 10);
  REQUIRE(some.size() == 4);
  CHECK(some[1].step == 10);
  CHECK(some[3].step == 25);

  RunningStats late;
  for (int t = 0; t < 100; ++t) {
    const auto run = evolve_trajectory(zero, 3, 300, rng, 10);
    RunningStats avg;
    for (const auto& pt : run) {
      CHECK(pt.entropy_bits <= 3.0 + 1e-12);
      if (pt.step >= 150) avg.add(pt.purity);
    }
    late.add(avg.mean());
  }
  CHECK(within_std_errors(late.mean(), 16.0 / 65.0, late.std_error()));

  Eigen::VectorXcd big = Eigen::VectorXcd::Zero(std::size_t{1} << 15);
  big(0) = 1.0;
  CHECK_THROWS_AS(evolve_trajectory(big, 3, 1, rng), CapabilityError);
  CHECK_THROWS_AS(evolve_trajectory(zero, 6, 1, rng), InvalidInput);
  CHECK_THROWS_AS(evolve_trajectory(zero, 3, 1, rng, 0), InvalidInput);
}

TEST_CASE("Pauli weight distributions") {
  const auto one = pauli_initial_distribution(1, 0);
  CHECK(one.weight(0) == doctest::Approx(0.5));
  CHECK(one.weight(3) == doctest::Approx(0.5));
  CHECK(one.weights().size() == 2);
  const auto two = pauli_initial_distribution(2, 0);
  for (std::uint32_t s : {0U, 3U, 12U, 15U}) CHECK(two.weight(s) == doctest::Approx(0.25));
  CHECK(two.total() == doctest::Approx(1.0));
  Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(8);
  basis(5) = 1.0;
  const auto from_state = pauli_initial_distribution(basis);
  CHECK(from_state.n() == 3);
  CHECK(from_state.total() == doctest::Approx(1.0));
  Eigen::VectorXcd plus = Eigen::VectorXcd::Constant(2, 1.0 / std::sqrt(2.0));
  CHECK_THROWS_AS(pauli_initial_distribution(plus), UnsupportedInput);
  CHECK_THROWS_AS(PauliWeightDistribution(1, {{0, 0.5}}), InvalidInput);
  CHECK(expected_purity(two, 1) == doctest::Approx(1.0));
}

TEST_CASE("one chain step equals the exact Clifford-twirled average") {
  const auto cliffords = oracle::single_qubit_cliffords();
  REQUIRE(cliffords.size() == 24);
  for (std::size_t n : {2, 3}) {
    const std::size_t dim = std::size_t{1} << n;
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    zero(0) = 1.0;
    std::vector<double> avg(dim * dim, 0.0);
    double count = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t t = 0; t < n; ++t) {
        if (c == t) continue;
        const Eigen::MatrixXcd cx = cnot(n, c, t);
        for (const auto& a : cliffords) {
          const Eigen::MatrixXcd ua = on_qubit(n, c, a);
          for (const auto& b : cliffords) {
            const Eigen::VectorXcd psi = cx * ua * on_qubit(n, t, b) * zero;
            const auto w = pauli_weights(psi, n);
            for (std::size_t s = 0; s < w.size(); ++s) avg[s] += w[s];
            count += 1.0;
          }
        }
      }
    }
    const auto step = pauli_markov_step(pauli_initial_distribution(n, 0));
    for (std::size_t s = 0; s < avg.size(); ++s) {
      CAPTURE(s);
      CHECK(std::abs(step.weight(static_cast<std::uint32_t>(s)) - avg[s] / count) < 1e-12);
    }
  }
}

TEST_CASE("stationary distribution and purity") {
  for (std::size_t n : {2, 4, 6}) {
    const auto st = pauli_stationary_distribution(n);
    const auto next = pauli_markov_step(st);
    for (const auto& [s, w] : st.weights()) CHECK(std::abs(next.weight(s) - w) < 1e-10);
    CHECK(next.weight(0) == doctest::Approx(std::ldexp(1.0, -static_cast<int>(n))));
  }
  CHECK(std::abs(expected_purity(pauli_stationary_distribution(6), 3) - 16.0 / 65.0) < 1e-10);
  CHECK(std::abs(expected_purity(pauli_stationary_distribution(4), 2) - average_purity(BipartiteDims::make(4, 4))) <
        1e-10);
  const auto traj = pauli_chain_purity(6, 3, 40);
  REQUIRE(traj.size() == 41);
  CHECK(traj[0] == doctest::Approx(1.0));
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj[k] <= traj[k - 1] + 1e-12);
  CHECK(traj.back() > 16.0 / 65.0);
  CHECK_THROWS_AS(pauli_markov_step(pauli_initial_distribution(11, 0)), CapabilityError);
}

TEST_CASE("chain purity agrees with statevector Monte Carlo") {
  const auto exact = pauli_chain_purity(3, 1, 5);
  const auto mc = statevector_purity(3, 1, 5, 20000, 7);
  REQUIRE(mc.size() == exact.size());
  for (std::size_t k = 0; k < exact.size(); ++k) {
    CAPTURE(k);
    CHECK(within_std_errors(mc[k].mean, exact[k], mc[k].std_error));
  }
  const auto par = statevector_purity(3, 1, 5, 20000, 7, 3);
  for (std::size_t k = 0; k < exact.size(); ++k) CHECK(par[k].mean == mc[k].mean);
}
