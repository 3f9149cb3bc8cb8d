#include "typent/coulomb_gas.hpp"
#include "typent/errors.hpp"
#include "typent/stats.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

using namespace typent;

namespace {

// Unconstrained stationary points are the zeros of L_{N_A}^{(N_B - N_A - 1)}
// rescaled to unit sum; at N_A == N_B one particle sits at 0 and the rest are
// the zeros of L_{N_A - 1}^{(1)}.
std::vector<double> laguerre_configuration(std::size_t na, std::size_t nb) {
  std::vector<double> x;
  if (na == nb) {
    x = oracle::laguerre_zeros(na - 1, 1.0);
    x.push_back(0.0);
  } else {
    x = oracle::laguerre_zeros(na, static_cast<double>(nb - na) - 1.0);
  }
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v /= total;
  std::sort(x.begin(), x.end(), std::greater<>());
  return x;
}

}  // namespace

TEST_CASE("gas energy examples") {
  const std::vector<double> p{0.75, 0.25};
  CHECK(gas_energy(p, BipartiteDims::make(2, 2)) == doctest::Approx(-2.0 * std::log(0.5)));
  CHECK(gas_energy(p, BipartiteDims::make(2, 3)) == doctest::Approx(-std::log(0.75 * 0.25) - 2.0 * std::log(0.5)));
  CHECK(gas_energy(p, BipartiteDims::make(2, 3)) == doctest::Approx(3.0603).epsilon(1e-4));
  const std::vector<double> tie{0.5, 0.5};
  CHECK(gas_energy(tie, BipartiteDims::make(2, 2)) == std::numeric_limits<double>::infinity());
  const std::vector<double> wall{1.0, 0.0};
  CHECK(std::isfinite(gas_energy(wall, BipartiteDims::make(2, 2))));
  CHECK(gas_energy(wall, BipartiteDims::make(2, 3)) == std::numeric_limits<double>::infinity());
}

TEST_CASE("constraint bookkeeping") {
  CHECK(parse_constraint_kind("none") == ConstraintKind::None);
  CHECK(parse_constraint_kind("entropy") == ConstraintKind::EntropyQ1);
  CHECK(parse_constraint_kind("renyi") == ConstraintKind::RenyiQ);
  CHECK(parse_constraint_kind("purity") == ConstraintKind::Purity);
  CHECK_THROWS_AS(parse_constraint_kind("energy"), InvalidInput);
  const std::vector<double> p{0.5, 0.25, 0.25};
  CHECK(constraint_value({ConstraintKind::EntropyQ1, 0.0}, p) == doctest::Approx(1.5));
  CHECK(constraint_value({ConstraintKind::Purity, 0.0}, p) == doctest::Approx(0.375));
  CHECK(constraint_value({ConstraintKind::RenyiQ, 0.0, 2.0}, p) == doctest::Approx(-std::log2(0.375)));
  const auto [lo, hi] = constraint_range({ConstraintKind::Purity, 0.5}, 4);
  CHECK(lo == doctest::Approx(0.25));
  CHECK(hi == doctest::Approx(1.0));
  const auto [elo, ehi] = constraint_range({ConstraintKind::EntropyQ1, 0.5}, 8);
  CHECK(elo == doctest::Approx(0.0));
  CHECK(ehi == doctest::Approx(3.0));
}

TEST_CASE("unconstrained minimizer equals the Laguerre-zero configuration") {
  for (auto [na, nb] : {std::pair<std::size_t, std::size_t>{5, 8}, {10, 13}, {20, 40}, {5, 5}, {30, 30}, {3, 4}}) {
    const BipartiteDims d = BipartiteDims::make(na, nb);
    const GasResult r = minimize_gas(d, {}, std::nullopt, 1);
    const auto ref = laguerre_configuration(na, nb);
    CAPTURE(na);
    CAPTURE(nb);
    REQUIRE(r.config.p.size() == na);
    double dev = 0.0;
    for (std::size_t i = 0; i < na; ++i) dev = std::max(dev, std::abs(r.config.p[i] - ref[i]));
    CHECK(dev < 1e-8);
    CHECK(r.residual < 1e-6);
    CHECK(r.config.mu == doctest::Approx(static_cast<double>(na * (nb - 1))).epsilon(1e-8));
    CHECK(std::is_sorted(r.config.p.begin(), r.config.p.end(), std::greater<>()));
    CHECK(std::accumulate(r.config.p.begin(), r.config.p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("two equal subsystems push one particle to the wall") {
  const BipartiteDims d = BipartiteDims::make(2, 2);
  const GasResult r = minimize_gas(d, {}, std::nullopt, 1);
  CHECK(r.config.p[0] == doctest::Approx(1.0));
  CHECK(r.config.p[1] == 0.0);
  CHECK(r.residual < 1e-6);
  // Brute force: the energy -2 ln|1 - 2x| keeps falling toward the boundary.
  double prev = std::numeric_limits<double>::infinity();
  for (double x = 0.55; x < 1.0; x += 0.05) {
    const std::vector<double> p{x, 1.0 - x};
    const double e = gas_energy(p, d);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("stationarity residual detects perturbations") {
  const BipartiteDims d = BipartiteDims::make(6, 9);
  const GasResult r = minimize_gas(d, {}, std::nullopt, 2);
  const double at_min = stationarity_residual(r.config, d);
  CHECK(at_min < 1e-6);
  GasConfiguration moved = r.config;
  moved.p[2] += 1e-3;
  moved.p[3] -= 1e-3;
  CHECK(stationarity_residual(moved, d) > at_min);
  CHECK(stationarity(r.config.p, d).mu == doctest::Approx(r.config.mu).epsilon(1e-6));
}

TEST_CASE("large unconstrained gas follows Marchenko-Pastur") {
  const BipartiteDims d = BipartiteDims::make(200, 200);
  const GasResult r = minimize_gas(d, {}, std::nullopt, 3);
  CHECK(r.residual < 1e-6);
  std::vector<double> sorted = r.config.p;
  std::sort(sorted.begin(), sorted.end());
  const auto cdf = marchenko_pastur_cdf_sorted(sorted, d);
  CHECK(ks_distance_from_values(cdf) < 0.05);
}

TEST_CASE("forced constraint values") {
  const BipartiteDims d = BipartiteDims::make(4, 6);
  const GasResult uniform = minimize_gas(d, {ConstraintKind::Purity, 0.25}, std::nullopt, 1);
  CHECK(uniform.forced);
  for (double x : uniform.config.p) CHECK(x == doctest::Approx(0.25));
  const GasResult max_entropy = minimize_gas(d, {ConstraintKind::EntropyQ1, 2.0}, std::nullopt, 1);
  for (double x : max_entropy.config.p) CHECK(x == doctest::Approx(0.25));
  const GasResult pure = minimize_gas(d, {ConstraintKind::EntropyQ1, 0.0}, std::nullopt, 1);
  CHECK(pure.config.p[0] == doctest::Approx(1.0));
  CHECK(minimize_gas(BipartiteDims::make(1, 5), {}, std::nullopt, 1).config.p[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(minimize_gas(d, {ConstraintKind::Purity, 0.2}, std::nullopt, 1), InvalidInput);
  CHECK_THROWS_AS(minimize_gas(d, {ConstraintKind::EntropyQ1, 2.5}, std::nullopt, 1), InvalidInput);
}

TEST_CASE("constrained minimizers satisfy the constraint and stationarity") {
  const std::vector<std::pair<BipartiteDims, ConstraintSpec>> cases{
      {BipartiteDims::make(16, 16), {ConstraintKind::EntropyQ1, 2.0}},
      {BipartiteDims::make(16, 16), {ConstraintKind::Purity, 0.2}},
      {BipartiteDims::make(16, 20), {ConstraintKind::RenyiQ, 2.5, 3.0}},
      {BipartiteDims::make(8, 12), {ConstraintKind::EntropyQ1, 2.9}},
  };
  for (const auto& [d, c] : cases) {
    const GasResult r = minimize_gas(d, c, std::nullopt, 4);
    CAPTURE(to_string(c.kind));
    CHECK(r.residual < 1e-6);
    CHECK(constraint_value(c, r.config.p) == doctest::Approx(c.value).epsilon(1e-8));
    CHECK(stationarity_residual(r.config, d, c) < 1e-6);
  }
}

TEST_CASE("purity-constrained three-particle gas matches a grid search on the constraint circle") {
  const BipartiteDims d = BipartiteDims::make(3, 5);
  const double purity = 0.5;
  const GasResult r = minimize_gas(d, {ConstraintKind::Purity, purity}, std::nullopt, 5);
  // Points with sum 1 and sum of squares P lie on a circle about the centroid.
  const double radius = std::sqrt(purity - 1.0 / 3.0);
  const Eigen::Vector3d c(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const Eigen::Vector3d u = Eigen::Vector3d(1, -1, 0).normalized();
  const Eigen::Vector3d v = Eigen::Vector3d(1, 1, -2).normalized();
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_p;
  const int steps = 200000;
  for (int k = 0; k < steps; ++k) {
    const double t = 2.0 * std::numbers::pi * k / steps;
    const Eigen::Vector3d p = c + radius * (std::cos(t) * u + std::sin(t) * v);
    if (p.minCoeff() <= 0.0) continue;
    std::vector<double> q{p(0), p(1), p(2)};
    std::sort(q.begin(), q.end(), std::greater<>());
    const double e = gas_energy(q, d);
    if (e < best) {
      best = e;
      best_p = Eigen::Vector3d(q[0], q[1], q[2]);
    }
  }
  CHECK(r.energy == doctest::Approx(best).epsilon(1e-8));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(r.config.p[static_cast<std::size_t>(i)] - best_p(i)) < 1e-4);
}

TEST_CASE("multi-start results do not depend on the thread count") {
  const BipartiteDims d = BipartiteDims::make(12, 12);
  const ConstraintSpec c{ConstraintKind::EntropyQ1, 2.5};
  MinimizeOptions one, four;
  four.threads = 4;
  const GasResult a = minimize_gas(d, c, std::nullopt, 9, one);
  const GasResult b = minimize_gas(d, c, std::nullopt, 9, four);
  CHECK(a.config.p == b.config.p);
  CHECK(a.starts.size() == one.starts);
}

TEST_CASE("initial configuration handling and non-convergence") {
  const BipartiteDims d = BipartiteDims::make(6, 6);
  GasConfiguration bad;
  bad.p = {0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(minimize_gas(d, {}, bad, 1), InvalidInput);
  GasConfiguration init;
  init.p = {0.4, 0.25, 0.15, 0.1, 0.07, 0.03};
  CHECK(minimize_gas(d, {}, init, 1).residual < 1e-6);

  MinimizeOptions tight;
  tight.starts = 1;
  tight.max_iterations = 1;
  try {
    minimize_gas(BipartiteDims::make(40, 60), {ConstraintKind::EntropyQ1, 3.0}, std::nullopt, 1, tight);
    FAIL("expected ConvergenceFailure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.best().config.p.size() == 40);
    CHECK(e.best().residual > 1e-6);
  }
}

TEST_CASE("phase classification") {
  const BipartiteDims d = BipartiteDims::make(64, 64);
  GasConfiguration flat;
  flat.p.assign(64, 1.0 / 64);
  CHECK(classify_phase(flat, d, 6.0) == Phase::MaximallyEntangled);
  const GasResult free_gas = minimize_gas(d, {}, std::nullopt, 1);
  CHECK(classify_phase(free_gas.config, d, constraint_value({ConstraintKind::EntropyQ1}, free_gas.config.p)) ==
        Phase::Typical);
  const double low = 0.2 * std::log2(64.0);
  const GasResult sep = minimize_gas(d, {ConstraintKind::EntropyQ1, low}, std::nullopt, 1);
  CHECK(sep.residual < 1e-6);
  CHECK(classify_phase(sep.config, d, low) == Phase::SeparableLike);
  // One detached coefficient: the largest dwarfs the second.
  CHECK(sep.config.p[0] > 10.0 * sep.config.p[1]);
  CHECK(to_string(Phase::SeparableLike) == "separable_like");
}
