#include "typent/decoupling.hpp"
#include "typent/errors.hpp"
#include "typent/haar.hpp"
#include "typent/spectral.hpp"
#include "typent/stats.hpp"

#include "doctest.h"

#include <cmath>

using namespace typent;

namespace {

Eigen::MatrixXcd reduced_ac_loops(const TripartiteState& s) {
  const auto [na, nb, nc] = s.dims();
  const Eigen::VectorXcd& psi = s.amplitudes();
  const auto dim = static_cast<Eigen::Index>(na * nc);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t c = 0; c < nc; ++c)
      for (std::size_t a2 = 0; a2 < na; ++a2)
        for (std::size_t c2 = 0; c2 < nc; ++c2)
          for (std::size_t b = 0; b < nb; ++b)
            rho(static_cast<Eigen::Index>(a * nc + c), static_cast<Eigen::Index>(a2 * nc + c2)) +=
                psi(static_cast<Eigen::Index>((a * nb + b) * nc + c)) *
                std::conj(psi(static_cast<Eigen::Index>((a2 * nb + b) * nc + c2)));
  return rho;
}

TripartiteState random_tripartite(TripartiteDims d, Rng& rng) {
  return TripartiteState(sample_random_pure_state(1, d.total(), rng).amplitudes(), d);
}

}  // namespace

TEST_CASE("tripartite state validation") {
  CHECK_THROWS_AS(TripartiteState(Eigen::VectorXcd::Zero(8), {2, 2, 2}), InvalidInput);
  CHECK_THROWS_AS(TripartiteState(Eigen::VectorXcd::Zero(4), {0, 2, 2}), InvalidInput);
  Eigen::VectorXcd big = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * kMaxTripartiteDim));
  big(0) = 1.0;
  CHECK_THROWS_AS(TripartiteState(big, {2, kMaxTripartiteDim, 1}), CapabilityError);
  CHECK(product_zero_state({2, 3, 2}).amplitudes()(0) == cplx(1.0));
  const TripartiteState ent = embedded_entangled_state({2, 2, 2});
  CHECK(ent.amplitudes().norm() == doctest::Approx(1.0));
  CHECK(parse_decoupling_initial("product") == DecouplingInitial::Product);
  CHECK(parse_decoupling_initial("entangled") == DecouplingInitial::Entangled);
  CHECK_THROWS_AS(parse_decoupling_initial("ghz"), InvalidInput);
}

TEST_CASE("reduced AC state agrees with explicit loops") {
  Rng rng(1);
  for (TripartiteDims d : {TripartiteDims{2, 3, 2}, TripartiteDims{3, 2, 4}, TripartiteDims{2, 1, 3}}) {
    const TripartiteState s = random_tripartite(d, rng);
    CHECK((reduced_ac(s) - reduced_ac_loops(s)).norm() < 1e-12);
  }
  const Eigen::MatrixXcd ent = reduced_ac(embedded_entangled_state({2, 2, 4}));
  CHECK(ent.trace().real() == doctest::Approx(1.0));
  // rho_AC has the spectrum of rho_B, which is maximally mixed on two levels.
  CHECK(ent.squaredNorm() == doctest::Approx(0.5));
}

TEST_CASE("trace distance") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2), b = Eigen::MatrixXcd::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  CHECK(trace_distance(a, Eigen::MatrixXcd::Identity(2, 2) / 2.0) == doctest::Approx(0.5));
}

TEST_CASE("decoupling margin") {
  CHECK(decoupling_margin(2, 2, 2, 1.0) == doctest::Approx(0.0));
  CHECK(decoupling_margin(2, 4, 2, 1.0) - decoupling_margin(2, 2, 2, 1.0) == doctest::Approx(2.0));
  CHECK(decoupling_margin(2, 2, 2, 0.5) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(decoupling_margin(2, 2, 2, 0.0), InvalidInput);
  CHECK_THROWS_AS(decoupling_margin(0, 2, 2, 1.0), InvalidInput);
}

TEST_CASE("decoupling deviation") {
  Rng rng(2);
  // Trivial C: the deviation is the distance of rho_A from I/N_A.
  const TripartiteState s = product_zero_state({2, 8, 1});
  Rng copy = rng;
  const double dev = decoupling_deviation(s, rng);
  const UnitaryMatrix u = sample_haar_unitary(16, copy);
  const Eigen::VectorXcd psi = u.matrix().col(0);
  Eigen::MatrixXcd rho_a = Eigen::MatrixXcd::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int b = 0; b < 8; ++b) rho_a(a, a2) += psi(a * 8 + b) * std::conj(psi(a2 * 8 + b));
  CHECK(dev == doctest::Approx(trace_distance(rho_a, Eigen::MatrixXcd::Identity(2, 2) / 2.0)).epsilon(1e-10));

  const TripartiteState wide = product_zero_state({2, 64, 2});
  CHECK(mean_decoupling_deviation(wide, 200, 3).mean < 0.1);

  double prev = 1.0;
  for (std::size_t nb : {1, 2, 4, 8, 16, 32}) {
    const MonteCarloEstimate e = mean_decoupling_deviation(product_zero_state({2, nb, 2}), 1000, 4);
    CHECK(e.mean < prev);
    prev = e.mean;
  }
  const auto one = mean_decoupling_deviation(product_zero_state({2, 4, 2}), 600, 5, 1);
  const auto three = mean_decoupling_deviation(product_zero_state({2, 4, 2}), 600, 5, 3);
  CHECK(one.mean == three.mean);
}

TEST_CASE("Page curve") {
  const auto curve = page_curve(6, 2000, 1);
  REQUIRE(curve.size() == 7);
  CHECK(curve.front().mean_entropy_bits == doctest::Approx(0.0));
  CHECK(curve.back().mean_entropy_bits == doctest::Approx(0.0).epsilon(1e-9));
  for (std::size_t k = 0; k <= 6; ++k) {
    const PageCurvePoint& p = curve[k];
    const PageCurvePoint& q = curve[6 - k];
    CHECK(std::abs(p.mean_entropy_bits - q.mean_entropy_bits) <= 3.0 * std::hypot(p.std_error, q.std_error) + 1e-12);
    CHECK(within_std_errors(p.mean_entropy_bits, p.closed_form, p.std_error));
    const std::size_t small = std::min(k, 6 - k);
    CHECK(p.closed_form ==
          doctest::Approx(page_average_entropy(BipartiteDims::make(std::size_t{1} << small, std::size_t{1} << (6 - small)))));
  }
  CHECK(page_curve_peak(curve) == 3);
  CHECK(page_curve(6, 500, 1, 2)[2].mean_entropy_bits == page_curve(6, 500, 1, 1)[2].mean_entropy_bits);
}
