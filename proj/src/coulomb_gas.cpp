#include "typent/coulomb_gas.hpp"

#include "typent/errors.hpp"
#include "typent/parallel.hpp"
#include "typent/rng.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace typent {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCollision = 1e-14;
constexpr double kConstraintTol = 1e-9;

// Neumaier summation; the stationarity terms reach 1e7 near the hard edge.
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// 0 * inf counts as 0.
double times(double a, double b) { return a == 0.0 ? 0.0 : a * b; }

struct Constraint {
  ConstraintKind kind = ConstraintKind::None;
  double target = 0.0;
  double q = 2.0;

  explicit Constraint(const ConstraintSpec& spec) : kind(spec.kind), target(spec.value), q(spec.q) {
    if (kind == ConstraintKind::RenyiQ && q == 1.0) kind = ConstraintKind::EntropyQ1;
  }

  bool active() const { return kind != ConstraintKind::None; }

  double value(const VectorXd& p) const {
    switch (kind) {
      case ConstraintKind::None:
        return 0.0;
      case ConstraintKind::EntropyQ1: {
        CompensatedSum s;
        for (double x : p) {
          if (x > 0.0) s.add(-x * std::log(x));
        }
        return s.value() / kLn2;
      }
      case ConstraintKind::RenyiQ: {
        CompensatedSum s;
        for (double x : p) {
          if (x > 0.0) s.add(std::pow(x, q));
        }
        return std::log(s.value()) / ((1.0 - q) * kLn2);
      }
      case ConstraintKind::Purity: {
        CompensatedSum s;
        for (double x : p) s.add(x * x);
        return s.value();
      }
    }
    return 0.0;
  }

  double error(const VectorXd& p) const { return active() ? value(p) - target : 0.0; }

  // Derivative at a single coordinate; +inf at p = 0 where the true slope diverges.
  VectorXd gradient(const VectorXd& p) const {
    const Eigen::Index n = p.size();
    VectorXd g = VectorXd::Zero(n);
    switch (kind) {
      case ConstraintKind::None:
        break;
      case ConstraintKind::EntropyQ1:
        for (Eigen::Index i = 0; i < n; ++i) g[i] = p[i] > 0.0 ? -(std::log(p[i]) + 1.0) / kLn2 : kInf;
        break;
      case ConstraintKind::RenyiQ: {
        double t = 0.0;
        for (double x : p) t += x > 0.0 ? std::pow(x, q) : 0.0;
        const double scale = q / ((1.0 - q) * kLn2 * t);
        for (Eigen::Index i = 0; i < n; ++i) {
          if (p[i] > 0.0) {
            g[i] = scale * std::pow(p[i], q - 1.0);
          } else {
            g[i] = q < 1.0 ? kInf : (q == 1.0 ? scale : 0.0);
          }
        }
        break;
      }
      case ConstraintKind::Purity:
        g = 2.0 * p;
        break;
    }
    return g;
  }

  // Hessian restricted to the leading m (strictly positive) coordinates.
  MatrixXd hessian(const VectorXd& p, Eigen::Index m) const {
    MatrixXd h = MatrixXd::Zero(m, m);
    switch (kind) {
      case ConstraintKind::None:
        break;
      case ConstraintKind::EntropyQ1:
        for (Eigen::Index i = 0; i < m; ++i) h(i, i) = -1.0 / (p[i] * kLn2);
        break;
      case ConstraintKind::RenyiQ: {
        double t = 0.0;
        for (double x : p) t += x > 0.0 ? std::pow(x, q) : 0.0;
        const double c = 1.0 / ((1.0 - q) * kLn2);
        VectorXd u(m);
        for (Eigen::Index i = 0; i < m; ++i) u[i] = q * std::pow(p[i], q - 1.0) / t;
        h = -c * u * u.transpose();
        for (Eigen::Index i = 0; i < m; ++i) h(i, i) += c * q * (q - 1.0) * std::pow(p[i], q - 2.0) / t;
        break;
      }
      case ConstraintKind::Purity:
        h.diagonal().setConstant(2.0);
        break;
    }
    return h;
  }
};

double energy_of(const VectorXd& p, double external) {
  CompensatedSum s;
  const Eigen::Index n = p.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (external > 0.0) {
      if (!(p[i] > 0.0)) return kInf;
      s.add(-external * std::log(p[i]));
    } else if (p[i] < 0.0) {
      return kInf;
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::abs(p[i] - p[j]);
      if (d < kCollision) return kInf;
      s.add(-2.0 * std::log(d));
    }
  }
  return s.value();
}

VectorXd energy_gradient(const VectorXd& p, double external) {
  const Eigen::Index n = p.size();
  VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    CompensatedSum s;
    if (external > 0.0) s.add(-external / p[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) s.add(2.0 / (p[j] - p[i]));
    }
    g[i] = s.value();
  }
  return g;
}

MatrixXd energy_hessian(const VectorXd& p, double external, Eigen::Index m) {
  MatrixXd h = MatrixXd::Zero(m, m);
  const Eigen::Index n = p.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    double diag = external > 0.0 ? external / (p[i] * p[i]) : 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = p[j] - p[i];
      const double w = 2.0 / (d * d);
      diag += w;
      if (j < m) h(i, j) = -w;
    }
    h(i, i) = diag;
  }
  return h;
}

// Largest step keeping the ordering p_0 > ... > p_{m-1} and p_{m-1} >= 0.
struct StepLimits {
  double order = kInf;
  double positivity = kInf;
};

StepLimits step_limits(const VectorXd& p, const VectorXd& d, Eigen::Index m) {
  StepLimits s;
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    const double rate = d[i] - d[i + 1];
    if (rate < 0.0) s.order = std::min(s.order, (p[i] - p[i + 1]) / -rate);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (d[i] < 0.0) s.positivity = std::min(s.positivity, p[i] / -d[i]);
  }
  return s;
}

void renormalize(VectorXd& p) {
  CompensatedSum s;
  for (double x : p) s.add(x);
  p /= s.value();
}

struct StartOutcome {
  VectorXd p;
  StationarityReport report;
  double energy = kInf;
  double constraint_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

class Solver {
 public:
  Solver(BipartiteDims dims, const ConstraintSpec& spec, const MinimizeOptions& options)
      : dims_(dims),
        spec_(spec),
        constraint_(spec),
        options_(options),
        external_(static_cast<double>(dims.dim_b - dims.dim_a)) {}

  StartOutcome run(VectorXd p) {
    p_ = std::move(p);
    std::sort(p_.begin(), p_.end(), std::greater<>());
    renormalize(p_);
    wall_ = external_ == 0.0 && p_[p_.size() - 1] == 0.0;
    iterations_ = 0;

    double lambda = 0.0;
    if (constraint_.active()) {
      double rho = 10.0;
      double previous = kInf;
      for (int outer = 0; outer < 80; ++outer) {
        minimize_penalized(lambda, rho);
        const double c = constraint_.error(p_);
        if (std::abs(c) < kConstraintTol) break;
        lambda += rho * c;
        if (std::abs(c) > 0.25 * previous) rho = std::min(rho * 10.0, 1e14);
        previous = std::abs(c);
      }
    } else {
      minimize_penalized(0.0, 0.0);
    }
    polish(lambda);

    StartOutcome out;
    out.p = p_;
    const std::vector<double> pv(p_.begin(), p_.end());
    out.report = stationarity(pv, dims_, spec_);
    out.energy = energy_of(p_, external_);
    out.constraint_error = constraint_.error(p_);
    out.iterations = iterations_;
    out.converged = std::isfinite(out.energy) && out.report.residual < options_.tolerance &&
                    std::abs(out.constraint_error) <= 1e-8;
    return out;
  }

 private:
  Eigen::Index free_count() const { return p_.size() - (wall_ ? 1 : 0); }

  double objective(const VectorXd& p, double lambda, double rho) const {
    const double e = energy_of(p, external_);
    if (!constraint_.active() || !std::isfinite(e)) return e;
    const double c = constraint_.error(p);
    return e + lambda * c + 0.5 * rho * c * c;
  }

  // Modified Newton on the free coordinates of the simplex for
  // E + lambda c + rho/2 c^2, with the wall particle (if any) held at 0.
  void minimize_penalized(double lambda, double rho) {
    for (std::size_t it = 0; it < options_.max_iterations; ++it) {
      const Eigen::Index m = free_count();
      if (m < 2) return;
      ++iterations_;
      const double phi = objective(p_, lambda, rho);
      const double c = constraint_.error(p_);
      const double weight = lambda + rho * c;

      VectorXd g_full = energy_gradient(p_, external_);
      MatrixXd h = energy_hessian(p_, external_, m);
      if (constraint_.active()) {
        const VectorXd gc = constraint_.gradient(p_);
        for (Eigen::Index i = 0; i < g_full.size(); ++i) g_full[i] += times(weight, gc[i]);
        h += weight * constraint_.hessian(p_, m);
        h += rho * gc.head(m) * gc.head(m).transpose();
      }
      const VectorXd g = g_full.head(m);

      // Reduce to the tangent space of sum p = 1 with the Householder reflector
      // mapping the normalized ones vector to e_0.
      VectorXd u = VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
      u[0] += 1.0;
      u.normalize();
      const VectorXd hu = h * u;
      const double uhu = u.dot(hu);
      MatrixXd phph = h - 2.0 * u * hu.transpose() - 2.0 * hu * u.transpose() + 4.0 * uhu * u * u.transpose();
      const VectorXd pg = g - 2.0 * u.dot(g) * u;
      const MatrixXd hr = phph.bottomRightCorner(m - 1, m - 1);
      const VectorXd gr = pg.tail(m - 1);

      VectorXd dr;
      Eigen::LLT<MatrixXd> llt(hr);
      if (llt.info() == Eigen::Success) {
        dr = -llt.solve(gr);
      } else {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(hr);
        VectorXd ev = eig.eigenvalues().cwiseAbs();
        const double floor = std::max(1e-10 * ev.maxCoeff(), 1e-300);
        for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], floor);
        dr = -eig.eigenvectors() * (eig.eigenvectors().transpose() * gr).cwiseQuotient(ev);
      }
      VectorXd y = VectorXd::Zero(m);
      y.tail(m - 1) = dr;
      VectorXd d = VectorXd::Zero(p_.size());
      d.head(m) = y - 2.0 * u.dot(y) * u;

      const double slope = g.dot(d.head(m));
      if (!(slope < 0.0) || -slope <= 1e-15 * (1.0 + std::abs(phi))) {
        if (release_wall(g_full)) continue;
        return;
      }

      const StepLimits lim = step_limits(p_, d, m);
      bool moved = false;
      if (external_ == 0.0 && !wall_ && lim.positivity < std::min(1.0, lim.order)) {
        // Try to land the smallest particle exactly on the wall.
        VectorXd trial = p_ + lim.positivity * d;
        trial[m - 1] = 0.0;
        if (trial.head(m - 1).minCoeff() > 0.0) {
          renormalize(trial);
          const double f = objective(trial, lambda, rho);
          if (f <= phi + 1e-4 * lim.positivity * slope) {
            p_ = trial;
            wall_ = true;
            moved = true;
          }
        }
      }
      if (!moved) {
        double alpha = std::min({1.0, 0.99 * lim.order, 0.99 * lim.positivity});
        for (int ls = 0; ls < 60 && alpha > 1e-16; ++ls, alpha *= 0.5) {
          VectorXd trial = p_ + alpha * d;
          renormalize(trial);
          const double f = objective(trial, lambda, rho);
          if (f <= phi + 1e-4 * alpha * slope) {
            p_ = trial;
            moved = true;
            break;
          }
        }
      }
      if (!moved) {
        if (release_wall(g_full)) continue;
        return;
      }
    }
  }

  // Frees the wall particle when the KKT sign condition fails.
  bool release_wall(const VectorXd& g_full) {
    if (!wall_) return false;
    const Eigen::Index m = free_count();
    const double nu = -g_full.head(m).mean();
    const Eigen::Index w = p_.size() - 1;
    if (g_full[w] + nu >= 0.0) return false;
    p_[w] = 1e-3 * p_[w - 1];
    renormalize(p_);
    wall_ = false;
    return true;
  }

  // Lagrange-Newton on the KKT system with the wall particle fixed.
  void polish(double lambda_guess) {
    const std::vector<double> pv(p_.begin(), p_.end());
    const StationarityReport start = stationarity(pv, dims_, spec_);
    double mu = start.mu;
    double lambda = constraint_.active() ? start.lambda : 0.0;
    if (constraint_.active() && !std::isfinite(lambda)) lambda = lambda_guess;

    const bool with_c = constraint_.active();
    auto residual_vector = [&](const VectorXd& p, double mu_, double lam_, Eigen::Index m) {
      const Eigen::Index k = m + 1 + (with_c ? 1 : 0);
      VectorXd f(k);
      const VectorXd ge = energy_gradient(p, external_);
      const VectorXd gc = with_c ? constraint_.gradient(p) : VectorXd::Zero(p.size());
      for (Eigen::Index i = 0; i < m; ++i) f[i] = ge[i] + mu_ + lam_ * gc[i];
      CompensatedSum s;
      for (double x : p) s.add(x);
      f[m] = s.value() - 1.0;
      if (with_c) f[m + 1] = constraint_.error(p);
      return f;
    };
    auto merit = [&](const VectorXd& f, Eigen::Index m, double scale) {
      double r = f.head(m).cwiseAbs().maxCoeff() / 2.0;
      for (Eigen::Index i = m; i < f.size(); ++i) r = std::max(r, scale * std::abs(f[i]));
      return r;
    };

    for (std::size_t it = 0; it < options_.max_iterations; ++it) {
      const Eigen::Index m = free_count();
      if (m < 2) return;
      ++iterations_;
      const VectorXd f = residual_vector(p_, mu, lambda, m);
      const double scale = 1.0 + std::abs(mu);
      const double current = merit(f, m, scale);
      if (!std::isfinite(current)) return;

      const Eigen::Index k = f.size();
      MatrixXd j = MatrixXd::Zero(k, k);
      j.topLeftCorner(m, m) = energy_hessian(p_, external_, m);
      j.block(0, m, m, 1).setOnes();
      j.block(m, 0, 1, m).setOnes();
      if (with_c) {
        j.topLeftCorner(m, m) += lambda * constraint_.hessian(p_, m);
        const VectorXd gc = constraint_.gradient(p_).head(m);
        j.block(0, m + 1, m, 1) = gc;
        j.block(m + 1, 0, 1, m) = gc.transpose();
      }
      // Symmetric diagonal scaling before the LU solve.
      VectorXd dscale = VectorXd::Ones(k);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = std::abs(j(i, i));
        if (a > 0.0) dscale[i] = 1.0 / std::sqrt(a);
      }
      const MatrixXd js = dscale.asDiagonal() * j * dscale.asDiagonal();
      const VectorXd step = dscale.cwiseProduct(js.partialPivLu().solve(-dscale.cwiseProduct(f)));
      if (!step.allFinite()) return;

      VectorXd d = VectorXd::Zero(p_.size());
      d.head(m) = step.head(m);
      const StepLimits lim = step_limits(p_, d, m);
      double alpha = std::min({1.0, 0.99 * lim.order, 0.99 * lim.positivity});
      bool improved = false;
      for (int ls = 0; ls < 40 && alpha > 1e-12; ++ls, alpha *= 0.5) {
        VectorXd trial = p_ + alpha * d;
        const double mu_t = mu + alpha * step[m];
        const double lam_t = with_c ? lambda + alpha * step[m + 1] : 0.0;
        const VectorXd ft = residual_vector(trial, mu_t, lam_t, m);
        const double mt = merit(ft, m, scale);
        if (mt < current) {
          p_ = trial;
          mu = mu_t;
          lambda = lam_t;
          improved = true;
          break;
        }
      }
      if (!improved) return;
    }
  }

  BipartiteDims dims_;
  ConstraintSpec spec_;
  Constraint constraint_;
  MinimizeOptions options_;
  double external_;
  VectorXd p_;
  bool wall_ = false;
  std::size_t iterations_ = 0;
};

void validate_config(std::span<const double> p, BipartiteDims dims, const char* who) {
  if (p.size() != dims.dim_a) {
    throw InvalidInput(fmt::format("{}: {} coordinates for N_A = {}", who, p.size(), dims.dim_a));
  }
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidInput(fmt::format("{}: negative or NaN coordinate", who));
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-8) throw InvalidInput(fmt::format("{}: coordinates sum to {}", who, sum));
}

}  // namespace

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::None: return "none";
    case ConstraintKind::EntropyQ1: return "entropy";
    case ConstraintKind::RenyiQ: return "renyi";
    case ConstraintKind::Purity: return "purity";
  }
  return "none";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
  if (name == "none") return ConstraintKind::None;
  if (name == "entropy" || name == "entropy_q1") return ConstraintKind::EntropyQ1;
  if (name == "renyi" || name == "renyi_q") return ConstraintKind::RenyiQ;
  if (name == "purity") return ConstraintKind::Purity;
  throw InvalidInput(fmt::format("unknown constraint kind '{}'", name));
}

std::pair<double, double> constraint_range(const ConstraintSpec& c, std::size_t dim_a) {
  const double na = static_cast<double>(dim_a);
  switch (c.kind) {
    case ConstraintKind::None: return {0.0, 0.0};
    case ConstraintKind::EntropyQ1:
    case ConstraintKind::RenyiQ: return {0.0, std::log2(na)};
    case ConstraintKind::Purity: return {1.0 / na, 1.0};
  }
  return {0.0, 0.0};
}

double constraint_value(const ConstraintSpec& c, std::span<const double> p) {
  VectorXd v(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = p[i];
  return Constraint(c).value(v);
}

double gas_energy(std::span<const double> p, BipartiteDims dims) {
  VectorXd v(static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) v[static_cast<Eigen::Index>(i)] = p[i];
  return energy_of(v, static_cast<double>(dims.dim_b - dims.dim_a));
}

double gas_energy(const GasConfiguration& config, BipartiteDims dims) {
  return gas_energy(config.p, dims);
}

StationarityReport stationarity(std::span<const double> p, BipartiteDims dims,
                                const ConstraintSpec& spec) {
  validate_config(p, dims, "stationarity");
  const std::size_t n = p.size();
  const double external = static_cast<double>(dims.dim_b - dims.dim_a);
  const Constraint constraint(spec);
  VectorXd pv(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) pv[static_cast<Eigen::Index>(i)] = p[i];
  const VectorXd gc = constraint.active() ? constraint.gradient(pv) : VectorXd::Zero(pv.size());

  // a_i: multiplier-free part of r_i.
  std::vector<double> a(n);
  std::vector<bool> interior(n);
  for (std::size_t i = 0; i < n; ++i) {
    interior[i] = p[i] > 0.0;
    if (!interior[i] && external > 0.0) return {kInf, 0.0, 0.0};
    CompensatedSum s;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = p[j] - p[i];
      if (d == 0.0) return {kInf, 0.0, 0.0};
      s.add(1.0 / d);
    }
    if (external > 0.0) s.add(-external / (2.0 * p[i]));
    a[i] = s.value();
  }

  // Least squares for (mu/2, lambda/2) over interior equations.
  double half_mu = 0.0;
  double half_lambda = 0.0;
  {
    CompensatedSum sa, sc, scc, sac;
    double count = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!interior[i]) continue;
      count += 1.0;
      sa.add(a[i]);
      if (constraint.active()) {
        const double c = gc[static_cast<Eigen::Index>(i)];
        sc.add(c);
        scc.add(c * c);
        sac.add(a[i] * c);
      }
    }
    if (count > 0.0) {
      if (!constraint.active()) {
        half_mu = -sa.value() / count;
      } else {
        const double det = count * scc.value() - sc.value() * sc.value();
        if (std::abs(det) > 1e-300 * std::max(1.0, count * scc.value())) {
          half_mu = (-sa.value() * scc.value() + sc.value() * sac.value()) / det;
          half_lambda = (-count * sac.value() + sc.value() * sa.value()) / det;
        } else {
          half_mu = -sa.value() / count;
        }
      }
    }
  }

  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = gc[static_cast<Eigen::Index>(i)];
    const double r = a[i] + half_mu + times(half_lambda, c);
    residual = std::max(residual, interior[i] ? std::abs(r) : std::max(0.0, -r));
  }
  return {residual, 2.0 * half_mu, 2.0 * half_lambda};
}

double stationarity_residual(const GasConfiguration& config, BipartiteDims dims,
                             const ConstraintSpec& constraint) {
  return stationarity(config.p, dims, constraint).residual;
}

GasResult minimize_gas(BipartiteDims dims, const ConstraintSpec& constraint,
                       const std::optional<GasConfiguration>& init, std::uint64_t seed,
                       const MinimizeOptions& options) {
  dims = BipartiteDims::make(dims.dim_a, dims.dim_b);
  if (options.starts == 0) throw InvalidInput("minimize_gas: need at least one start");
  if (!(options.tolerance > 0.0)) throw InvalidInput("minimize_gas: tolerance must be positive");
  if (constraint.kind == ConstraintKind::RenyiQ && !(constraint.q > 0.0)) {
    throw InvalidInput("minimize_gas: Renyi order must be positive");
  }
  const std::size_t na = dims.dim_a;

  // Constraint values admitting a single spectrum.
  auto forced = [&](std::vector<double> p) {
    GasResult r;
    r.config.p = std::move(p);
    r.energy = gas_energy(r.config.p, dims);
    r.residual = 0.0;
    r.forced = true;
    return r;
  };
  if (constraint.kind != ConstraintKind::None) {
    const auto [lo, hi] = constraint_range(constraint, na);
    const double slack = 1e-12 * std::max(1.0, hi);
    if (!(constraint.value >= lo - slack && constraint.value <= hi + slack)) {
      throw InvalidInput(fmt::format("minimize_gas: {} = {} outside the achievable range [{}, {}]",
                                     to_string(constraint.kind), constraint.value, lo, hi));
    }
    const bool purity = constraint.kind == ConstraintKind::Purity;
    const double at_uniform = purity ? lo : hi;
    const double at_pure = purity ? hi : lo;
    if (na == 1 || std::abs(constraint.value - at_uniform) <= slack) {
      return forced(std::vector<double>(na, 1.0 / static_cast<double>(na)));
    }
    if (std::abs(constraint.value - at_pure) <= slack) {
      std::vector<double> p(na, 0.0);
      p[0] = 1.0;
      return forced(std::move(p));
    }
  } else if (na == 1) {
    return forced({1.0});
  }

  std::optional<VectorXd> init_p;
  if (init) {
    validate_config(init->p, dims, "minimize_gas init");
    if (!std::isfinite(gas_energy(init->p, dims))) {
      throw InvalidInput("minimize_gas: initial configuration has infinite energy");
    }
    init_p = VectorXd(static_cast<Eigen::Index>(na));
    for (std::size_t i = 0; i < na; ++i) (*init_p)[static_cast<Eigen::Index>(i)] = init->p[i];
  }

  VectorXd base(static_cast<Eigen::Index>(na));
  if (constraint.kind == ConstraintKind::None) {
    const std::vector<double> q = marchenko_pastur_quantiles(dims, na);
    for (std::size_t i = 0; i < na; ++i) base[static_cast<Eigen::Index>(i)] = q[i];
    renormalize(base);
  } else {
    base.setConstant(1.0 / static_cast<double>(na));
  }

  std::vector<StartOutcome> outcomes(options.starts);
  for_each_chunk(
      options.starts, options.threads,
      [&](Chunk c) {
        VectorXd p0;
        if (c.index == 0 && init_p) {
          p0 = *init_p;
        } else {
          Rng rng = Rng::substream(seed, c.index);
          p0 = base;
          // The uniform start needs jitter even for start 0 to separate particles.
          if (c.index > 0 || constraint.kind != ConstraintKind::None) {
            for (auto& x : p0) x *= 1.0 + options.jitter * (2.0 * rng.uniform() - 1.0);
          }
        }
        Solver solver(dims, constraint, options);
        outcomes[c.index] = solver.run(std::move(p0));
      },
      1);

  GasResult result;
  std::optional<std::size_t> best;
  std::size_t fallback = 0;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    const StartOutcome& o = outcomes[s];
    result.starts.push_back({s, o.energy, o.report.residual, o.constraint_error, o.iterations, o.converged});
    if (o.converged && (!best || o.energy < outcomes[*best].energy)) best = s;
    if (o.report.residual < outcomes[fallback].report.residual) fallback = s;
  }
  const StartOutcome& chosen = outcomes[best.value_or(fallback)];
  result.config.p.assign(chosen.p.begin(), chosen.p.end());
  result.config.mu = chosen.report.mu;
  result.config.lambda = chosen.report.lambda;
  result.energy = chosen.energy;
  result.residual = chosen.report.residual;
  if (!best) {
    throw ConvergenceFailure(
        fmt::format("minimize_gas: no start reached residual {:g} (best {:g})", options.tolerance,
                    result.residual),
        std::move(result));
  }
  return result;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::MaximallyEntangled: return "maximally_entangled";
    case Phase::Typical: return "typical";
    case Phase::SeparableLike: return "separable_like";
  }
  return "typical";
}

Phase classify_phase(const GasConfiguration& config, BipartiteDims dims, double entropy_value) {
  validate_config(config.p, dims, "classify_phase");
  const std::size_t na = dims.dim_a;
  if (na == 1) return Phase::SeparableLike;
  if (entropy_value >= std::log2(static_cast<double>(na)) - 1e-9) return Phase::MaximallyEntangled;
  const auto [lo, hi] = std::minmax_element(config.p.begin(), config.p.end());
  const MpEdges e = mp_edges(dims);
  if (*hi - *lo < kNarrowWidthFraction * (e.upper - e.lower)) return Phase::MaximallyEntangled;
  const double top = *hi;
  const double edge = std::pow(1.0 / std::sqrt(static_cast<double>(na - 1)) +
                                   1.0 / std::sqrt(static_cast<double>(dims.dim_b)),
                               2);
  if (top > kDetachmentFactor * (1.0 - top) * edge) return Phase::SeparableLike;
  return Phase::Typical;
}

}  // namespace typent
