// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
#include "typent/circuits.hpp"
#include "typent/coulomb_gas.hpp"
#include "typent/cv_gaussian.hpp"
#include "typent/decoupling.hpp"
#include "typent/haar.hpp"
#include "typent/parallel.hpp"
#include "typent/spectral.hpp"
#include "typent/stats.hpp"

#include "oracles.hpp"

#include <fmt/format.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace typent;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += ok ? what : "FAILED " + what;
  }
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_seconds;  ///< 0 = no limit stated
  std::function<Outcome()> run;
};

Outcome page_formula() {
  Outcome o;
  const std::pair<std::size_t, double> cases[] = {{2, 0.4808}, {4, 1.3307}};
  for (const auto& [n, reference] : cases) {
    const BipartiteDims d = BipartiteDims::make(n, n);
    const double exact = page_average_entropy(d);
    const auto r = estimate([](const EntanglementSpectrum& s) { return entropy(s, 1.0); }, d, 10000, 100 + n);
    const double z = std::abs(r.estimate.mean - exact) / r.estimate.std_error;
    // The quoted four-digit figures are truncated, so they agree with the closed form to 1e-4.
    const double harmonic = oracle::page_entropy_bits(n, n);
    o.require(std::abs(exact - harmonic) < 1e-12 && std::abs(exact - reference) < 1e-4,
              fmt::format("{0}x{0} closed form {1:.6f} (harmonic sum {2:.6f}, quoted {3})", n, exact, harmonic, reference));
    o.require(z <= 3.0, fmt::format("MC {:.4f}+-{:.4f} ({:.2f} SE)", r.estimate.mean, r.estimate.std_error, z));
  }
  return o;
}

Outcome purity_average() {
  Outcome o;
  const std::tuple<std::size_t, std::size_t, double> cases[] = {{2, 2, 4.0 / 5}, {2, 4, 2.0 / 3}, {8, 8, 16.0 / 65}};
  for (const auto& [na, nb, reference] : cases) {
    const BipartiteDims d = BipartiteDims::make(na, nb);
    const auto r = estimate([](const EntanglementSpectrum& s) { return purity(s); }, d, 10000, 200 + na * nb);
    const double z = std::abs(r.estimate.mean - reference) / r.estimate.std_error;
    o.require(std::abs(average_purity(d) - reference) < 1e-15 && z <= 3.0,
              fmt::format("({},{}) MC {:.5f} vs {:.5f} ({:.2f} SE)", na, nb, r.estimate.mean, reference, z));
  }
  return o;
}

Outcome marchenko_pastur() {
  Outcome o;
  const BipartiteDims d = BipartiteDims::make(64, 64);
  const double ks = spectrum_vs_mp_distance(d, 100, 300);
  o.require(ks < 0.05, fmt::format("KS {:.4f} < 0.05", ks));
  const MpEdges e = mp_edges(d);
  auto moment = [&](int k) {
    return oracle::simpson(
        [&](double t) {
          const double s = std::sin(std::max(t, 1e-9)), c = std::cos(t);
          const double p = e.lower + (e.upper - e.lower) * s * s;
          if (p <= 0.0 || p >= e.upper) return 0.0;
          return std::pow(p, k) * marchenko_pastur_density(p, d) * 2.0 * (e.upper - e.lower) * s * c;
        },
        0.0, std::numbers::pi / 2, 4000);
  };
  const double m0 = moment(0), m1 = moment(1);
  o.require(std::abs(m0 - 64.0) < 1e-6, fmt::format("int omega = {:.9f}", m0));
  o.require(std::abs(m1 - 1.0) < 1e-6, fmt::format("int p omega = {:.9f}", m1));
  return o;
}

Outcome concentration() {
  Outcome o;
  const BipartiteDims d = BipartiteDims::make(8, 8);
  const std::size_t n = 10000;
  std::vector<double> s(n);
  for_each_chunk(n, 1, [&](Chunk c) {
    Rng rng = Rng::substream(400, c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) s[i] = entropy(schmidt_spectrum(sample_random_pure_state(8, 8, rng)), 1.0);
  });
  double worst = -1.0;
  for (int k = 1; k <= 10; ++k) {
    const double alpha = 0.1 * k;
    const double threshold = page_lower_bound(d) - alpha;
    const double tail = static_cast<double>(std::count_if(s.begin(), s.end(), [&](double x) { return x < threshold; })) /
                        static_cast<double>(n);
    const double bound = concentration_bound(d, alpha);
    worst = std::max(worst, tail - bound);
    if (tail > bound) o.require(false, fmt::format("alpha {:.1f}: tail {} > bound {:.4f}", alpha, tail, bound));
  }
  o.require(worst <= 0.0, fmt::format("max(tail - bound) = {:.4f} over alpha = 0.1..1.0", worst));
  return o;
}

Outcome random_circuits() {
  Outcome o;
  int compared = 0;
  double worst_z = 0.0;
  for (std::size_t n : {2, 3, 4}) {
    const std::size_t na = std::max<std::size_t>(1, n / 2);
    const auto exact = pauli_chain_purity(n, na, 10);
    const auto mc = statevector_purity(n, na, 10, 10000, 500 + n);
    for (std::size_t step : {1, 2, 5, 10}) {
      const double z = std::abs(mc[step].mean - exact[step]) / mc[step].std_error;
      worst_z = std::max(worst_z, z);
      ++compared;
      if (z > 3.0) o.require(false, fmt::format("n={} step={}: MC {:.5f} vs chain {:.5f} ({:.2f} SE)", n, step, mc[step].mean, exact[step], z));
    }
  }
  o.require(worst_z <= 3.0, fmt::format("(a) {} chain/statevector comparisons, worst {:.2f} SE", compared, worst_z));
  const auto st = pauli_stationary_distribution(6);
  const auto next = pauli_markov_step(st);
  double drift = 0.0;
  for (const auto& [s, w] : st.weights()) drift = std::max(drift, std::abs(next.weight(s) - w));
  const double purity = expected_purity(st, 3);
  o.require(std::abs(purity - 16.0 / 65.0) < 1e-10 && drift < 1e-10,
            fmt::format("(b) stationary purity {:.15f}, fixed-point drift {:.1e}", purity, drift));
  const auto bound = gate_count_bound(4, 0.1);
  o.require(bound == 287, fmt::format("(c) gate_count_bound(4, 0.1) = {}", bound));
  return o;
}

Outcome coulomb_gas() {
  Outcome o;
  const BipartiteDims big = BipartiteDims::make(200, 200);
  const GasResult r = minimize_gas(big, {}, std::nullopt, 600);
  std::vector<double> sorted = r.config.p;
  std::sort(sorted.begin(), sorted.end());
  const double ks = ks_distance_from_values(marchenko_pastur_cdf_sorted(sorted, big));
  o.require(r.residual < 1e-6, fmt::format("200x200 residual {:.2e}", r.residual));
  o.require(ks < 0.05, fmt::format("KS to MP {:.4f}", ks));

  const BipartiteDims d = BipartiteDims::make(64, 64);
  const double low = 0.2 * std::log2(64.0);
  const GasResult s = minimize_gas(d, {ConstraintKind::EntropyQ1, low}, std::nullopt, 601);
  const Phase phase = classify_phase(s.config, d, low);
  // Bulk edge of the remaining 63 coefficients, scaled to their mass.
  const double rest = 1.0 - s.config.p[0];
  const double edge = rest * std::pow(1.0 / std::sqrt(63.0) + 1.0 / 8.0, 2);
  std::size_t detached = 0;
  for (double p : s.config.p) detached += p > kDetachmentFactor * edge;
  o.require(s.residual < 1e-6, fmt::format("64x64 S={:.1f} bits residual {:.2e}", low, s.residual));
  o.require(phase == Phase::SeparableLike && detached == 1,
            fmt::format("phase {}, {} detached (p1 = {:.4f}, p2 = {:.5f}, bulk edge {:.5f})", to_string(phase), detached,
                        s.config.p[0], s.config.p[1], edge));
  return o;
}

Outcome cv_moments() {
  Outcome o;
  const MonteCarloEstimate c = mc_inverse_purity_squared(EnergyEnsemble::Canonical, 4, 2.0, 10000, 700);
  const double cf = canonical_purity_moments(4, 2.0).inv_sq_mean;
  const double zc = std::abs(c.mean - cf) / c.std_error;
  o.require(zc <= 3.0, fmt::format("canonical n=4 T=2: MC {:.4f} vs {:.4f} ({:.2f} SE)", c.mean, cf, zc));
  const MonteCarloEstimate m = mc_inverse_purity_squared(EnergyEnsemble::Microcanonical, 4, 8.0 + 8.0, 10000, 701);
  const double mf = microcanonical_purity_moments(4, 16.0).inv_sq_mean;
  const double zm = std::abs(m.mean - mf) / m.std_error;
  o.require(zm <= 3.0, fmt::format("micro-canonical n=4 Et=8: MC {:.4f} vs {:.4f} ({:.2f} SE)", m.mean, mf, zm));
  const auto x = microcanonical_marginal_samples(5, 10.0 + 10.0, 100000, 702);
  const double ks = ks_distance(x, [](double v) { return microcanonical_marginal_cdf(v, 5, 10.0); });
  o.require(ks < 0.02, fmt::format("marginal KS {:.4f} < 0.02", ks));
  return o;
}

Outcome headline_numbers() {
  Outcome o;
  const double d5 = maximal_purity_distance(5, 10.0 * 5 + 2.0 * 5);
  const double d20 = maximal_purity_distance(20, 10.0 * 20 + 2.0 * 20);
  o.require(std::abs(d5 - 16.5) <= 0.5, fmt::format("n=5: {:.3f} SD (16.5 +- 0.5)", d5));
  o.require(std::abs(d20 - 257.1) <= 1.0, fmt::format("n=20: {:.3f} SD (257.1 +- 1.0)", d20));
  return o;
}

Outcome fixed_purity() {
  Outcome o;
  for (double p : {0.25, 0.5, 1.0}) {
    const auto spec = spectrum_with_purity(p, 16);
    const std::size_t n = 10000;
    std::vector<double> local(n);
    for_each_chunk(n, 1, [&](Chunk c) {
      Rng rng = Rng::substream(800, c.index);
      for (std::size_t i = c.begin; i < c.end; ++i) {
        local[i] = partial_trace_b(sample_fixed_purity_state(spec, rng).matrix(), 4, 4).squaredNorm();
      }
    });
    RunningStats st;
    for (double v : local) st.add(v);
    const double cf = average_local_purity_fixed_global(p, 2, 2);
    const double z = std::abs(st.mean() - cf) / st.std_error();
    o.require(z <= 3.0, fmt::format("P={}: MC {:.5f} vs {:.5f} ({:.2f} SE)", p, st.mean(), cf, z));
  }
  const double identity = std::abs(average_local_purity_fixed_global(1.0, 2, 2) - average_purity(BipartiteDims::make(4, 4)));
  o.require(identity < 1e-12, fmt::format("P=1 identity |diff| = {:.1e}", identity));
  return o;
}

Outcome decoupling_and_page_curve() {
  Outcome o;
  std::vector<double> means;
  std::string sweep;
  for (std::size_t nb : {1, 2, 4, 8, 16, 32}) {
    const double margin = decoupling_margin(2, nb, 2, 1.0);
    const MonteCarloEstimate e = mean_decoupling_deviation(product_zero_state({2, nb, 2}), 2000, 900 + nb);
    means.push_back(e.mean);
    sweep += fmt::format(" {:+.0f}:{:.4f}", margin, e.mean);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) decreasing = decreasing && means[i] < means[i - 1];
  o.require(decreasing, "deviation by margin" + sweep);

  const auto curve = page_curve(10, 2000, 950);
  double worst = 0.0;
  for (std::size_t k = 0; k <= 10; ++k) {
    const auto& a = curve[k];
    const auto& b = curve[10 - k];
    const double se = std::hypot(a.std_error, b.std_error);
    const double diff = std::abs(a.mean_entropy_bits - b.mean_entropy_bits);
    if (se > 0.0) worst = std::max(worst, diff / se);
    else if (diff > 1e-12) worst = std::numeric_limits<double>::infinity();
  }
  o.require(worst <= 3.0, fmt::format("symmetry worst {:.2f} combined SE", worst));
  const std::size_t peak = page_curve_peak(curve);
  const double page = page_average_entropy(BipartiteDims::make(32, 32));
  const double z = std::abs(curve[5].mean_entropy_bits - page) / curve[5].std_error;
  o.require(peak == 5 && z <= 3.0,
            fmt::format("peak n_A={} mean {:.4f} vs Page(32,32) {:.4f} ({:.2f} SE)", peak, curve[5].mean_entropy_bits, page, z));
  return o;
}

int run_lab(const std::string& args) {
  const std::string cmd = std::string(LAB_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "typent_acceptance_determinism";
  fs::remove_all(root);
  std::size_t configs = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    ++configs;
    const std::string cfg = entry.path().string();
    const int a = run_lab("run " + cfg + " --out " + (root / "first").string());
    const int b = run_lab("run " + cfg + " --out " + (root / "second").string());
    const int c = run_lab("run " + cfg + " --threads 3 --out " + (root / "threaded").string());
    if (a != 0 || b != 0 || c != 0) {
      o.require(false, fmt::format("{} exited {}/{}/{}", entry.path().filename().string(), a, b, c));
      continue;
    }
    bool same = true;
    for (const auto& f : fs::directory_iterator(root / "first")) {
      if (f.path().extension() != ".csv") continue;
      const std::string first = slurp(f.path());
      same = same && !first.empty() && first == slurp(root / "second" / f.path().filename()) &&
             first == slurp(root / "threaded" / f.path().filename());
    }
    identical += same;
    if (!same) o.require(false, entry.path().filename().string() + " CSV differs between runs");
    fs::remove_all(root);
  }
  o.require(configs > 0 && identical == configs,
            fmt::format("{}/{} configs byte-identical across two runs and a 3-thread run", identical, configs));
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "Page formula", 60, page_formula},
      {"AC2", "purity average", 60, purity_average},
      {"AC3", "Marchenko-Pastur", 120, marchenko_pastur},
      {"AC4", "concentration bound", 0, concentration},
      {"AC5", "random circuits", 300, random_circuits},
      {"AC6", "Coulomb gas", 600, coulomb_gas},
      {"AC7", "CV moments", 120, cv_moments},
      {"AC8", "headline distances", 0, headline_numbers},
      {"AC9", "fixed-purity local purity", 120, fixed_purity},
      {"AC10", "decoupling and Page curve", 300, decoupling_and_page_curve},
      {"AC11", "determinism", 0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_seconds > 0) {
      o.require(secs < c.time_limit_seconds, fmt::format("runtime {:.1f}s < {:.0f}s", secs, c.time_limit_seconds));
    }
    failures += !o.pass;
    fmt::print("[{}] {} {}: {} ({:.2f}s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail, secs);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
