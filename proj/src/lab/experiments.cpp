#include "typent/lab/experiments.hpp"

#include "typent/circuits.hpp"
#include "typent/coulomb_gas.hpp"
#include "typent/cv_gaussian.hpp"
#include "typent/decoupling.hpp"
#include "typent/errors.hpp"
#include "typent/haar.hpp"
#include "typent/parallel.hpp"
#include "typent/quantum_core.hpp"
#include "typent/rng.hpp"
#include "typent/spectral.hpp"
#include "typent/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>

namespace typent::lab {

namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<std::int64_t> to_integer(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> to_real(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    out.push_back(trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Empty string on success.
std::string check_value(const ParamSpec& spec, std::string_view value) {
  switch (spec.type) {
    case ParamType::Integer:
      return to_integer(value) ? "" : "expected an integer";
    case ParamType::Real:
      return to_real(value) ? "" : "expected a real number";
    case ParamType::IntegerList:
      for (auto item : split_list(value)) {
        if (!to_integer(item)) return "expected a comma-separated list of integers";
      }
      return "";
    case ParamType::RealList:
      for (auto item : split_list(value)) {
        if (!to_real(item)) return "expected a comma-separated list of reals";
      }
      return "";
    case ParamType::Choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), trim(value)) == spec.choices.end()) {
        return fmt::format("expected one of {}", fmt::join(spec.choices, ", "));
      }
      return "";
  }
  return "";
}

// Typed, defaulted access to a validated config.
class Params {
 public:
  Params(const ExperimentInfo& info, const ExperimentConfig& cfg) : info_(info), cfg_(cfg) {}

  std::string raw(const std::string& name) const {
    const auto it = cfg_.params.find(name);
    if (it != cfg_.params.end()) return it->second;
    for (const auto& p : info_.params) {
      if (p.name == name) return p.default_value;
    }
    throw InvalidInput(fmt::format("no parameter '{}'", name));
  }

  std::int64_t integer(const std::string& name) const { return *to_integer(raw(name)); }

  std::size_t count(const std::string& name, std::size_t min = 0) const {
    const std::int64_t v = integer(name);
    if (v < static_cast<std::int64_t>(min)) throw InvalidInput(fmt::format("{} must be at least {}", name, min));
    return static_cast<std::size_t>(v);
  }

  double real(const std::string& name) const { return *to_real(raw(name)); }

  std::vector<std::size_t> counts(const std::string& name, std::size_t min = 1) const {
    std::vector<std::size_t> out;
    const std::string text = raw(name);
    for (auto item : split_list(text)) {
      const std::int64_t v = *to_integer(item);
      if (v < static_cast<std::int64_t>(min)) throw InvalidInput(fmt::format("{} entries must be at least {}", name, min));
      out.push_back(static_cast<std::size_t>(v));
    }
    return out;
  }

  std::vector<double> reals(const std::string& name) const {
    std::vector<double> out;
    const std::string text = raw(name);
    for (auto item : split_list(text)) out.push_back(*to_real(item));
    return out;
  }

  std::string choice(const std::string& name) const { return std::string(trim(raw(name))); }

  std::optional<std::size_t> optional_bins() const {
    const std::int64_t b = integer("bins");
    if (b < 0) throw InvalidInput("bins must be >= 0");
    return b == 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(b));
  }

 private:
  const ExperimentInfo& info_;
  const ExperimentConfig& cfg_;
};

ParamSpec integer(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::Integer, def.empty(), std::move(def), {}, std::move(help)};
}
ParamSpec real(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::Real, def.empty(), std::move(def), {}, std::move(help)};
}
ParamSpec integers(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::IntegerList, def.empty(), std::move(def), {}, std::move(help)};
}
ParamSpec reals(std::string name, std::string def, std::string help) {
  return {std::move(name), ParamType::RealList, def.empty(), std::move(def), {}, std::move(help)};
}
ParamSpec choice(std::string name, std::vector<std::string> choices, std::string def, std::string help) {
  return {std::move(name), ParamType::Choice, def.empty(), std::move(def), std::move(choices), std::move(help)};
}

ParamSpec bins_param() { return integer("bins", "0", "histogram bins; 0 selects Freedman-Diaconis"); }

// Per-chunk statistics for `k` observables, merged in chunk order.
std::vector<RunningStats> chunked_stats(std::size_t n_samples, std::size_t threads, std::uint64_t seed,
                                        std::size_t k,
                                        const std::function<void(Rng&, std::vector<double>&)>& draw) {
  if (n_samples < 2) throw InvalidInput("n_samples must be at least 2");
  std::vector<std::vector<RunningStats>> partial(chunk_count(n_samples), std::vector<RunningStats>(k));
  for_each_chunk(n_samples, threads, [&](Chunk c) {
    Rng rng = Rng::substream(seed, c.index);
    std::vector<double> values(k);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      draw(rng, values);
      for (std::size_t q = 0; q < k; ++q) partial[c.index][q].add(values[q]);
    }
  });
  std::vector<RunningStats> total(k);
  for (const auto& p : partial) {
    for (std::size_t q = 0; q < k; ++q) total[q].merge(p[q]);
  }
  return total;
}

std::vector<std::pair<std::size_t, std::size_t>> dim_pairs(const Params& p) {
  const std::vector<std::size_t> a = p.counts("n_a");
  std::vector<std::size_t> b = p.raw("n_b").empty() ? a : p.counts("n_b");
  if (b.size() != a.size()) throw InvalidInput("n_a and n_b lists must have the same length");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const BipartiteDims d = BipartiteDims::make(a[i], b[i]);
    out.emplace_back(d.dim_a, d.dim_b);
  }
  return out;
}

ParamSpec n_b_list() {
  ParamSpec s = integers("n_b", "", "environment dimensions, paired with n_a; defaults to n_a");
  s.required = false;
  return s;
}

void histogram_rows(RunResult& r, const Histogram& h, const std::function<double(double, double)>& reference) {
  r.table.columns = {"bin_lo", "bin_hi", "count", "empirical_density", "closed_form"};
  for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
    r.table.rows.push_back({h.edges[i], h.edges[i + 1], static_cast<std::int64_t>(h.counts[i]), h.density(i),
                            reference(h.edges[i], h.edges[i + 1])});
  }
  r.details["binning"] = h.binning;
  r.details["bins"] = h.counts.size();
}

// ---- experiments ---------------------------------------------------------

RunResult haar_moments(const Params& p, const RunSettings& s) {
  const std::size_t n = p.count("n", 2);
  const std::string which = p.choice("sampler");
  std::vector<std::string> samplers;
  if (which == "both" || which == "qr") samplers.push_back("qr");
  if (which == "both" || which == "hurwitz") samplers.push_back("hurwitz");
  const double nn = static_cast<double>(n);
  const std::vector<std::pair<std::string, double>> quantities = {
      {"abs2_u11", 1.0 / nn},
      {"abs4_u11", 2.0 / (nn * (nn + 1.0))},
      {"abs2_u11_abs2_u22", 1.0 / (nn * nn - 1.0)},
      {"abs2_trace", 1.0},
  };
  RunResult r;
  r.table.columns = {"sampler", "quantity", "mc_mean", "mc_stderr", "closed_form"};
  for (const std::string& name : samplers) {
    const bool qr = name == "qr";
    const auto stats = chunked_stats(s.n_samples, s.threads, master_seed(s.seed), quantities.size(),
                                     [&](Rng& rng, std::vector<double>& out) {
                                       const UnitaryMatrix u = qr ? sample_haar_unitary(n, rng)
                                                                  : hurwitz_unitary(sample_hurwitz_angles(n, rng));
                                       const Eigen::MatrixXcd& m = u.matrix();
                                       const double a11 = std::norm(m(0, 0));
                                       out[0] = a11;
                                       out[1] = a11 * a11;
                                       out[2] = a11 * std::norm(m(1, 1));
                                       out[3] = std::norm(m.trace());
                                     });
    for (std::size_t q = 0; q < quantities.size(); ++q) {
      r.table.rows.push_back({name, quantities[q].first, stats[q].mean(), stats[q].std_error(), quantities[q].second});
    }
  }
  return r;
}

RunResult page_sweep(const Params& p, const RunSettings& s) {
  RunResult r;
  r.table.columns = {"N_A", "N_B", "mc_mean", "mc_stderr", "closed_form", "lower_bound"};
  for (auto [a, b] : dim_pairs(p)) {
    const BipartiteDims d{a, b};
    const EstimateResult e = estimate([](const EntanglementSpectrum& sp) { return entropy(sp, 1.0); }, d,
                                      s.n_samples, master_seed(s.seed), {s.threads, false, std::nullopt});
    r.table.rows.push_back({static_cast<std::int64_t>(a), static_cast<std::int64_t>(b), e.estimate.mean,
                            e.estimate.std_error, page_average_entropy(d), page_lower_bound(d)});
  }
  r.details["entropy_units"] = "bits";
  return r;
}

RunResult purity_sweep(const Params& p, const RunSettings& s) {
  RunResult r;
  r.table.columns = {"N_A", "N_B", "mc_mean", "mc_stderr", "closed_form"};
  for (auto [a, b] : dim_pairs(p)) {
    const BipartiteDims d{a, b};
    const EstimateResult e = estimate([](const EntanglementSpectrum& sp) { return purity(sp); }, d, s.n_samples,
                                      master_seed(s.seed), {s.threads, false, std::nullopt});
    r.table.rows.push_back({static_cast<std::int64_t>(a), static_cast<std::int64_t>(b), e.estimate.mean,
                            e.estimate.std_error, average_purity(d)});
  }
  return r;
}

RunResult mp_spectrum(const Params& p, const RunSettings& s) {
  const BipartiteDims d = BipartiteDims::make(p.count("n_a", 1), p.count("n_b", 1));
  std::vector<double> pooled = pooled_spectrum(d, s.n_samples, master_seed(s.seed), s.threads);
  const double ks = ks_distance_from_values(marchenko_pastur_cdf_sorted(pooled, d));
  RunResult r;
  const Histogram h = make_histogram(pooled, p.optional_bins());
  histogram_rows(r, h, [&](double lo, double hi) {
    return (marchenko_pastur_cdf(hi, d) - marchenko_pastur_cdf(lo, d)) / (hi - lo);
  });
  const MpEdges e = mp_edges(d);
  r.details["ks_distance"] = ks;
  r.details["mp_lower_edge"] = e.lower;
  r.details["mp_upper_edge"] = e.upper;
  r.details["pooled_values"] = pooled.size();
  return r;
}

RunResult concentration(const Params& p, const RunSettings& s) {
  const BipartiteDims d = BipartiteDims::make(p.count("n_a", 2), p.count("n_b", 2));
  const std::vector<double> alphas = p.reals("alphas");
  std::vector<double> values(s.n_samples);
  if (s.n_samples < 2) throw InvalidInput("n_samples must be at least 2");
  for_each_chunk(s.n_samples, s.threads, [&](Chunk c) {
    Rng rng = Rng::substream(master_seed(s.seed), c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      values[i] = entropy(schmidt_spectrum(sample_random_pure_state(d.dim_a, d.dim_b, rng)), 1.0);
    }
  });
  RunResult r;
  r.table.columns = {"alpha", "threshold", "empirical_tail", "mc_stderr", "closed_form"};
  const double n = static_cast<double>(values.size());
  bool exceeded = false;
  for (double alpha : alphas) {
    const double threshold = page_lower_bound(d) - alpha;
    const double hits = static_cast<double>(std::count_if(values.begin(), values.end(),
                                                          [&](double v) { return v < threshold; }));
    const double tail = hits / n;
    const double bound = concentration_bound(d, alpha);
    exceeded = exceeded || tail > bound;
    r.table.rows.push_back({alpha, threshold, tail, std::sqrt(tail * (1.0 - tail) / n), bound});
  }
  r.details["bound_exceeded"] = exceeded;
  return r;
}

RunResult circuit_trajectory(const Params& p, const RunSettings& s) {
  const std::size_t n = p.count("n", 2);
  const std::size_t n_a = p.count("n_a", 1);
  const std::size_t gates = p.count("gates", 0);
  const std::size_t every = p.count("record_every", 1);
  if (n > kMaxStatevectorQubits) {
    throw CapabilityError(fmt::format("circuit-trajectory: n = {} exceeds {}", n, kMaxStatevectorQubits));
  }
  if (n_a >= n) throw InvalidInput("circuit-trajectory: need n_a < n");
  if (s.n_samples < 1) throw InvalidInput("n_samples must be positive");
  std::vector<std::vector<TrajectoryPoint>> runs(s.n_samples);
  for_each_chunk(s.n_samples, s.threads, [&](Chunk c) {
    Rng rng = Rng::substream(master_seed(s.seed), c.index);
    for (std::size_t i = c.begin; i < c.end; ++i) {
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
      psi[0] = 1.0;
      runs[i] = evolve_trajectory(psi, n_a, gates, rng, every);
    }
  });
  const std::size_t da = std::size_t{1} << n_a;
  const std::size_t db = std::size_t{1} << (n - n_a);
  const BipartiteDims d = BipartiteDims::make(std::min(da, db), std::max(da, db));
  RunResult r;
  r.table.columns = {"trajectory", "step", "entropy_bits", "purity", "closed_form_entropy", "closed_form_purity",
                     "seed"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const TrajectoryPoint& t : runs[i]) {
      r.table.rows.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(t.step), t.entropy_bits,
                              t.purity, page_average_entropy(d), average_purity(d), s.seed});
    }
  }
  r.details["initial_state"] = "computational zero";
  r.details["gate_count_bound_eps_0.01"] = gate_count_bound(n, 0.01);
  return r;
}

RunResult markov_purity(const Params& p, const RunSettings& s) {
  const std::size_t n = p.count("n", 2);
  const std::size_t n_a = p.count("n_a", 1);
  const std::size_t steps = p.count("steps", 0);
  const double eps = p.real("epsilon");
  if (n_a >= n) throw InvalidInput("markov-purity: need n_a < n");
  const std::vector<double> chain = pauli_chain_purity(n, n_a, steps);
  const std::vector<MonteCarloEstimate> mc =
      statevector_purity(n, n_a, steps, s.n_samples, master_seed(s.seed), s.threads);
  const double stationary = expected_purity(pauli_stationary_distribution(n), n_a);
  RunResult r;
  r.table.columns = {"step", "closed_form", "mc_mean", "mc_stderr", "stationary"};
  std::optional<std::size_t> reached;
  for (std::size_t k = 0; k <= steps; ++k) {
    r.table.rows.push_back({static_cast<std::int64_t>(k), chain[k], mc[k].mean, mc[k].std_error, stationary});
    if (!reached && std::abs(chain[k] - stationary) <= eps) reached = k;
  }
  r.details["epsilon"] = eps;
  r.details["gate_count_bound"] = gate_count_bound(n, eps);
  r.details["steps_to_epsilon"] = reached ? json(*reached) : json(nullptr);
  return r;
}

RunResult coulomb_min(const Params& p, const RunSettings& s) {
  const BipartiteDims d = BipartiteDims::make(p.count("n_a", 1), p.count("n_b", 1));
  ConstraintSpec c;
  c.kind = parse_constraint_kind(p.choice("constraint"));
  c.value = p.real("value");
  c.q = p.real("q");
  MinimizeOptions o;
  o.starts = p.count("starts", 1);
  o.tolerance = p.real("tolerance");
  o.max_iterations = p.count("max_iterations", 1);
  o.threads = s.threads;

  RunResult r;
  GasResult g;
  try {
    g = minimize_gas(d, c, std::nullopt, master_seed(s.seed), o);
  } catch (const ConvergenceFailure& e) {
    g = e.best();
    r.status = RunStatus::NonConverged;
    r.message = e.what();
  }
  const std::vector<double> q = marchenko_pastur_quantiles(d, d.dim_a);
  r.table.columns = {"index", "p", "mp_quantile"};
  for (std::size_t i = 0; i < g.config.p.size(); ++i) {
    // Quantiles ascend; the spectrum descends.
    r.table.rows.push_back({static_cast<std::int64_t>(i), g.config.p[i], q[d.dim_a - 1 - i]});
  }
  const double s_bits = shannon_bits(g.config.p);
  std::vector<double> ascending(g.config.p.rbegin(), g.config.p.rend());
  r.details["constraint"] = {{"kind", to_string(c.kind)}, {"value", c.value}, {"q", c.q}};
  r.details["energy"] = g.energy;
  r.details["residual"] = g.residual;
  r.details["mu"] = g.config.mu;
  r.details["lambda"] = g.config.lambda;
  r.details["entropy_bits"] = s_bits;
  r.details["purity"] = constraint_value({ConstraintKind::Purity, 0.0, 2.0}, g.config.p);
  r.details["phase"] = to_string(classify_phase(g.config, d, s_bits));
  r.details["ks_distance_to_mp"] = ks_distance_from_values(marchenko_pastur_cdf_sorted(ascending, d));
  r.details["forced"] = g.forced;
  json starts = json::array();
  for (const StartLog& st : g.starts) {
    starts.push_back({{"start", st.start},
                      {"energy", st.energy},
                      {"residual", st.residual},
                      {"constraint_error", st.constraint_error},
                      {"iterations", st.iterations},
                      {"converged", st.converged}});
  }
  r.details["starts"] = starts;
  return r;
}

RunResult decoupling_sweep(const Params& p, const RunSettings& s) {
  const std::size_t na = p.count("n_a", 1);
  const std::size_t nc = p.count("n_c", 1);
  const DecouplingInitial kind = parse_decoupling_initial(p.choice("initial"));
  RunResult r;
  r.table.columns = {"N_B", "margin", "purity_ac", "mc_mean", "mc_stderr"};
  for (std::size_t nb : p.counts("n_b")) {
    const TripartiteState st = make_initial_state(kind, {na, nb, nc});
    const double pur = reduced_ac(st).squaredNorm();
    const MonteCarloEstimate e = mean_decoupling_deviation(st, s.n_samples, master_seed(s.seed), s.threads);
    r.table.rows.push_back({static_cast<std::int64_t>(nb), decoupling_margin(na, nb, nc, pur), pur, e.mean, e.std_error});
  }
  r.details["distance"] = kDecouplingDistance;
  r.details["initial_state"] = to_string(kind);
  return r;
}

RunResult page_curve_experiment(const Params& p, const RunSettings& s) {
  const std::vector<PageCurvePoint> curve = page_curve(p.count("n", 1), s.n_samples, master_seed(s.seed), s.threads);
  RunResult r;
  r.table.columns = {"n_A", "mean_entropy_bits", "std_error", "closed_form"};
  for (const auto& pt : curve) {
    r.table.rows.push_back({static_cast<std::int64_t>(pt.n_a), pt.mean_entropy_bits, pt.std_error, pt.closed_form});
  }
  r.details["peak_n_A"] = page_curve_peak(curve);
  return r;
}

RunResult cv_moments(const Params& p, const RunSettings& s) {
  const EnergyEnsemble ens = parse_energy_ensemble(p.choice("ensemble"));
  const bool micro = ens == EnergyEnsemble::Microcanonical;
  RunResult r;
  r.table.columns = {"n", "T_or_E", "formula_value", "formula_std", "mc_mean", "mc_stderr", "maximal_inv_sq",
                     "distance_in_sd"};
  for (std::size_t n : p.counts("n")) {
    for (double v : p.reals("values")) {
      const double nn = static_cast<double>(n);
      const PurityMoments m = micro ? microcanonical_purity_moments(n, v + 2.0 * nn) : canonical_purity_moments(n, v);
      const MonteCarloEstimate e =
          mc_inverse_purity_squared(ens, n, micro ? v + 2.0 * nn : v, s.n_samples, master_seed(s.seed), s.threads);
      Cell pm = std::string();
      Cell dist = std::string();
      if (micro) {
        const double p_max = maximal_purity(v + 2.0 * nn, n);
        pm = 1.0 / (p_max * p_max);
        if (m.std_dev() > 0.0) dist = maximal_purity_distance(n, v + 2.0 * nn);
      }
      r.table.rows.push_back({static_cast<std::int64_t>(n), v, m.inv_sq_mean, m.std_dev(), e.mean, e.std_error, pm, dist});
    }
  }
  r.details["ensemble"] = to_string(ens);
  r.details["T_or_E"] = micro ? "E_tilde = E_total - 2n" : "temperature T";
  r.details["observable"] = "det of the first mode's covariance block (inverse squared purity)";
  return r;
}

RunResult cv_microcanonical(const Params& p, const RunSettings& s) {
  const std::size_t n = p.count("n", 1);
  const double et = p.real("e_tilde");
  if (!(et > 0.0)) throw InvalidInput("e_tilde must be positive");
  const std::vector<double> x =
      microcanonical_marginal_samples(n, et + 2.0 * static_cast<double>(n), s.n_samples, master_seed(s.seed), s.threads);
  const double ks = ks_distance(x, [&](double v) { return microcanonical_marginal_cdf(v, n, et); });
  RunResult r;
  histogram_rows(r, make_histogram(x, p.optional_bins()), [&](double lo, double hi) {
    return (microcanonical_marginal_cdf(hi, n, et) - microcanonical_marginal_cdf(lo, n, et)) / (hi - lo);
  });
  r.details["ks_distance"] = ks;
  r.details["variable"] = "E_1 - 2";
  return r;
}

RunResult fixed_purity(const Params& p, const RunSettings& s) {
  const std::size_t n = p.count("n", 2);
  const std::size_t n_a = p.count("n_a", 1);
  if (n_a >= n) throw InvalidInput("fixed-purity: need n_a < n");
  if (n > 10) throw CapabilityError("fixed-purity: at most 10 qubits");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t da = std::size_t{1} << n_a;
  RunResult r;
  r.table.columns = {"P", "mc_mean", "mc_stderr", "closed_form"};
  for (double pur : p.reals("purities")) {
    const double closed = average_local_purity_fixed_global(pur, n_a, n - n_a);
    const std::vector<double> spectrum = spectrum_with_purity(pur, dim);
    const auto st = chunked_stats(s.n_samples, s.threads, master_seed(s.seed), 1, [&](Rng& rng, std::vector<double>& out) {
      const DensityMatrix rho = sample_fixed_purity_state(spectrum, rng);
      out[0] = partial_trace_b(rho.matrix(), da, dim / da).squaredNorm();
    });
    r.table.rows.push_back({pur, st[0].mean(), st[0].std_error(), closed});
  }
  return r;
}

using Runner = RunResult (*)(const Params&, const RunSettings&);

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> kEntries = [] {
    std::vector<Entry> e;
    e.push_back({{"haar-moments", "low-order moments of Haar unitaries from the QR and Hurwitz samplers", true,
                  {integer("n", "4", "unitary dimension"),
                   choice("sampler", {"qr", "hurwitz", "both"}, "both", "sampler(s) to run")}},
                 haar_moments});
    e.push_back({{"page-sweep", "mean subsystem entropy vs the exact Haar average", true,
                  {integers("n_a", "", "subsystem dimensions"), n_b_list()}},
                 page_sweep});
    e.push_back({{"purity-sweep", "mean subsystem purity vs (N_A+N_B)/(N_A N_B+1)", true,
                  {integers("n_a", "", "subsystem dimensions"), n_b_list()}},
                 purity_sweep});
    e.push_back({{"mp-spectrum", "pooled Schmidt spectrum histogram and Marchenko-Pastur density", true,
                  {integer("n_a", "", "subsystem dimension"), integer("n_b", "", "environment dimension"), bins_param()}},
                 mp_spectrum});
    e.push_back({{"concentration", "empirical lower entropy tail vs the concentration bound", true,
                  {integer("n_a", "", "subsystem dimension"), integer("n_b", "", "environment dimension"),
                   reals("alphas", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0", "deviations below the lower bound")}},
                 concentration});
    e.push_back({{"circuit-trajectory", "entanglement along random two-qubit-gate circuits (one per sample)", true,
                  {integer("n", "", "qubits"), integer("n_a", "", "leading qubits in A"),
                   integer("gates", "", "gates per circuit"), integer("record_every", "1", "recording interval")}},
                 circuit_trajectory});
    e.push_back({{"markov-purity", "Pauli Markov chain purity vs statevector Monte Carlo", true,
                  {integer("n", "", "qubits"), integer("n_a", "", "leading qubits in A"),
                   integer("steps", "", "gates"), real("epsilon", "0.01", "tolerance for gate_count_bound")}},
                 markov_purity});
    e.push_back({{"coulomb-min", "constrained Coulomb-gas minimizer of the Schmidt spectrum", false,
                  {integer("n_a", "", "subsystem dimension"), integer("n_b", "", "environment dimension"),
                   choice("constraint", {"none", "entropy", "renyi", "purity"}, "none", "fixed quantity"),
                   real("value", "0", "constraint value (entropies in bits)"),
                   real("q", "2", "Renyi order"), integer("starts", "8", "multi-start count"),
                   real("tolerance", "1e-6", "stationarity residual target"),
                   integer("max_iterations", "400", "Newton iterations per stage")}},
                 coulomb_min});
    e.push_back({{"decoupling-sweep", "trace distance of rho_AC from I/N_A x rho_C across N_B", true,
                  {integer("n_a", "2", "dimension of A"), integer("n_c", "2", "dimension of C"),
                   integers("n_b", "1,2,4,8,16,32", "dimensions of B"),
                   choice("initial", {"product", "entangled"}, "product", "initial tripartite state")}},
                 decoupling_sweep});
    e.push_back({{"page-curve", "mean entropy of the first n_A qubits for n_A = 0..n", true,
                  {integer("n", "", "qubits")}},
                 page_curve_experiment});
    e.push_back({{"cv-moments", "inverse squared purity of one mode: closed form vs Monte Carlo", true,
                  {choice("ensemble", {"canonical", "microcanonical"}, "", "energy ensemble"),
                   integers("n", "", "mode counts"), reals("values", "", "T (canonical) or E_tilde (micro-canonical)")}},
                 cv_moments});
    e.push_back({{"cv-microcanonical", "micro-canonical marginal of one mode energy", true,
                  {integer("n", "", "modes"), real("e_tilde", "", "E_total - 2n"), bins_param()}},
                 cv_microcanonical});
    e.push_back({{"fixed-purity", "local purity of Haar-rotated states with fixed global purity", true,
                  {integer("n", "4", "qubits"), integer("n_a", "2", "leading qubits in A"),
                   reals("purities", "", "global purities")}},
                 fixed_purity});
    return e;
  }();
  return kEntries;
}

const Entry* find_entry(std::string_view name) {
  for (const Entry& e : registry()) {
    if (e.info.name == name) return &e;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::Integer: return "integer";
    case ParamType::Real: return "real";
    case ParamType::IntegerList: return "integer list";
    case ParamType::RealList: return "real list";
    case ParamType::Choice: return "choice";
  }
  return "integer";
}

std::string_view to_string(RunStatus status) { return status == RunStatus::Ok ? "ok" : "non_converged"; }

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> kInfos = [] {
    std::vector<ExperimentInfo> v;
    for (const Entry& e : registry()) v.push_back(e.info);
    return v;
  }();
  return kInfos;
}

const ExperimentInfo* find_experiment(std::string_view name) {
  const Entry* e = find_entry(name);
  return e ? &e->info : nullptr;
}

std::vector<Diagnostic> validate(const ExperimentConfig& cfg) {
  std::vector<Diagnostic> out;
  if (cfg.experiment.empty()) {
    out.push_back({"experiment", "missing"});
    return out;
  }
  const ExperimentInfo* info = find_experiment(cfg.experiment);
  if (!info) {
    out.push_back({"experiment", fmt::format("unknown experiment '{}'", cfg.experiment)});
    return out;
  }
  if (!cfg.seed) {
    out.push_back({"seed", "missing"});
  } else {
    try {
      parse_seed(*cfg.seed);
    } catch (const std::exception& e) {
      out.push_back({"seed", e.what()});
    }
  }
  if (!cfg.n_samples) {
    if (info->uses_samples) out.push_back({"n_samples", "missing"});
  } else {
    const auto v = to_integer(*cfg.n_samples);
    if (!v || *v < 2) out.push_back({"n_samples", "expected an integer >= 2"});
  }
  std::set<std::string> known;
  for (const ParamSpec& spec : info->params) {
    known.insert(spec.name);
    const auto it = cfg.params.find(spec.name);
    if (it == cfg.params.end()) {
      if (spec.required) out.push_back({spec.name, "missing required parameter"});
      continue;
    }
    if (it->second.empty() && !spec.required) continue;
    if (const std::string err = check_value(spec, it->second); !err.empty()) {
      out.push_back({spec.name, fmt::format("{} (got '{}')", err, it->second)});
    }
  }
  for (const auto& [key, value] : cfg.params) {
    if (!known.count(key)) out.push_back({key, fmt::format("unknown parameter for {}", info->name)});
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunSettings& settings) {
  const Entry* entry = find_entry(cfg.experiment);
  if (!entry) throw InvalidInput(fmt::format("unknown experiment '{}'", cfg.experiment));
  const std::vector<Diagnostic> diags = validate(cfg);
  if (!diags.empty()) {
    throw InvalidInput(fmt::format("invalid config: {}: {}", diags.front().key, diags.front().message));
  }
  const Params params(entry->info, cfg);
  RunSettings s = settings;
  s.threads = std::max<std::size_t>(1, s.threads);
  return entry->run(params, s);
}

}  // namespace typent::lab
