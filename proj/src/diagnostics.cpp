#include "sagabb/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "sagabb/csv.hpp"

namespace sagabb {

namespace {

double composite_lambda_l2(const Problem& p) {
  return p.composite().kind == CompositeKind::l2_squared ? p.composite().lambda : 0.0;
}

// Newton's method with Armijo backtracking on f + (lambda_h/2)||x||^2.
ReferenceOptimum newton(const Problem& p, const ReferenceOptions& opt) {
  const Index d = p.dim();
  const double ridge = p.smooth_l2() + composite_lambda_l2(p);
  const double inv_n = 1.0 / static_cast<double>(p.n());
  auto value = [&](const Vector& x) { return objective_value(p, x); };
  auto gradient = [&](const Vector& x) {
    Vector g = full_gradient(p, x);
    if (composite_lambda_l2(p) != 0.0) g += composite_lambda_l2(p) * x;
    return g;
  };

  ReferenceOptimum r;
  r.method = "newton";
  Vector x = Vector::Zero(d);
  double fx = value(x);
  Vector g = gradient(x);
  for (r.iterations = 0; r.iterations < std::min<long>(opt.max_iterations, 200); ++r.iterations) {
    if (g.norm() <= opt.tolerance) break;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
    for (Index i = 0; i < p.n(); ++i) {
      const auto& a = p.data().row(i);
      const double w = inv_n * psi_second_derivative(p.loss(), dot(a, x), p.data().label(i));
      if (w == 0.0) continue;
      for (std::size_t u = 0; u < a.nnz(); ++u) {
        for (std::size_t v = 0; v < a.nnz(); ++v) {
          H(a.indices[u], a.indices[v]) += w * a.values[u] * a.values[v];
        }
      }
    }
    H.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Vector step = ldlt.solve(-g);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(g) >= 0.0) {
      // Singular Hessian: damp it until the direction descends.
      H.diagonal().array() += 1e-8 * std::max(1.0, H.diagonal().maxCoeff());
      step = H.ldlt().solve(-g);
      if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;
    }
    double t = 1.0;
    const double slope = g.dot(step);
    Vector xn = x + step;
    double fn = value(xn);
    int halvings = 0;
    while (!(fn <= fx + 1e-4 * t * slope) && halvings < 60) {
      t *= 0.5;
      xn = x + t * step;
      fn = value(xn);
      ++halvings;
    }
    Vector gn = gradient(xn);
    if (halvings == 60 || (gn.norm() >= g.norm() && fn >= fx)) {
      // No further progress at working precision.
      if (gn.norm() < g.norm()) {
        x = xn;
        fx = fn;
        g = gn;
      }
      break;
    }
    x = std::move(xn);
    fx = fn;
    g = std::move(gn);
  }
  r.x = x;
  r.value = fx;
  r.certificate = g.norm();
  r.converged = r.certificate <= opt.tolerance;
  return r;
}

// FISTA with backtracking and gradient-based adaptive restart.
ReferenceOptimum fista(const Problem& p, const ReferenceOptions& opt) {
  const auto& geom = p.geometry();
  const auto& h = p.composite();
  const auto constants = estimate_constants(p);
  double Lk = std::max(1e-12, constants ? 1e-2 * constants->L : 1.0);

  ReferenceOptimum r;
  r.method = "fista";
  Vector x = Vector::Zero(p.dim());
  Vector y = x;
  double t = 1.0;
  double mapping = INFINITY;
  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    const Vector gy = full_gradient(p, y);
    const double fy = smooth_value(p, y);
    Vector xn;
    while (true) {
      xn = prox_step(geom, h, y, 1.0 / Lk, gy);
      const Vector dx = xn - y;
      if (smooth_value(p, xn) <= fy + gy.dot(dx) + 0.5 * Lk * dx.squaredNorm() + 1e-15 * std::abs(fy)) break;
      Lk *= 2.0;
    }
    // Prox-gradient mapping at the new point as the stopping certificate.
    const Vector gx = full_gradient(p, xn);
    mapping = Lk * (xn - prox_step(geom, h, xn, 1.0 / Lk, gx)).norm();
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Vector yn = xn + ((t - 1.0) / tn) * (xn - x);
    if ((y - xn).dot(xn - x) > 0.0) {
      yn = xn;
      t = 1.0;
    } else {
      t = tn;
    }
    x = std::move(xn);
    y = std::move(yn);
    if (mapping <= opt.tolerance) {
      ++r.iterations;
      break;
    }
  }
  r.x = x;
  r.value = objective_value(p, x);
  r.certificate = mapping;
  r.converged = mapping <= opt.tolerance;
  return r;
}

// Entropic mirror descent with backtracking on the KL-smoothness condition.
ReferenceOptimum mirror(const Problem& p, const ReferenceOptions& opt) {
  const auto& geom = p.geometry();
  const double L1 = std::max(1e-12, l1_smoothness_bound(p));
  double eta = 1.0 / L1;

  ReferenceOptimum r;
  r.method = "mirror";
  Vector x = geom.center(p.dim());
  double fx = smooth_value(p, x);
  Vector g = full_gradient(p, x);
  double gap = g.dot(x) - g.minCoeff();
  for (r.iterations = 0; r.iterations < opt.max_iterations && gap > opt.tolerance; ++r.iterations) {
    eta *= 2.0;
    Vector xn;
    double fn;
    while (true) {
      xn = prox_step(geom, p.composite(), x, eta, g);
      fn = smooth_value(p, xn);
      double kl = 0.0;
      for (Eigen::Index j = 0; j < xn.size(); ++j) {
        if (xn(j) > 0.0) kl += xn(j) * std::log(xn(j) / x(j));
      }
      if (fn <= fx + g.dot(xn - x) + kl / eta + 1e-15 * std::abs(fx) || eta <= 1.0 / L1) break;
      eta = std::max(eta * 0.5, 1.0 / L1);
    }
    x = std::move(xn);
    fx = fn;
    g = full_gradient(p, x);
    gap = g.dot(x) - g.minCoeff();
  }
  r.x = x;
  r.value = objective_value(p, x);
  r.certificate = gap;
  r.converged = gap <= opt.tolerance;
  return r;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double a : v) s += (a - mean) * (a - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

void check_points(const Problem& p, const std::vector<Vector>& points) {
  if (static_cast<Index>(points.size()) != p.n()) {
    throw Error(Errc::dimension_mismatch, "table state needs one point per sample");
  }
}

}  // namespace

ReferenceOptimum reference_optimum(const Problem& p, const ReferenceOptions& opt) {
  if (!p.geometry().is_euclidean()) return mirror(p, opt);
  const bool twice_differentiable = p.loss().kind != LossKind::huber;
  if (twice_differentiable && p.composite().kind != CompositeKind::l1) return newton(p, opt);
  return fista(p, opt);
}

double estimate_smoothness_sampled(const Problem& p, int samples, std::uint64_t seed) {
  const auto& geom = p.geometry();
  const auto& norms = geom.norms();
  const Index d = p.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<Index> pick(0, p.n() - 1);
  auto draw = [&]() {
    Vector x(d);
    if (geom.domain() == Domain::simplex) {
      for (Index j = 0; j < d; ++j) x(j) = expo(rng);
      return Vector(x / x.sum());
    }
    for (Index j = 0; j < d; ++j) x(j) = gauss(rng);
    return x;
  };
  double best = 0.0;
  auto consider = [&](Index i, const Vector& x, const Vector& y) {
    const double den = norms.primal(x - y);
    if (den == 0.0) return;
    best = std::max(best, norms.dual(grad_component(p, i, x) - grad_component(p, i, y)) / den);
  };
  for (int s = 0; s < samples; ++s) consider(pick(rng), draw(), draw());
  if (geom.domain() == Domain::simplex && d <= 64) {
    for (Index i = 0; i < p.n(); ++i) {
      for (Index u = 0; u < d; ++u) {
        for (Index v = u + 1; v < d; ++v) consider(i, Vector::Unit(d, u), Vector::Unit(d, v));
      }
    }
  }
  return 1.1 * best;
}

VarianceCheck check_variance_bound(const Problem& p, const std::vector<Vector>& points, const Vector& x,
                                   const Vector& x_star, double L) {
  check_points(p, points);
  const auto& geom = p.geometry();
  const double inv_n = 1.0 / static_cast<double>(p.n());
  VectorTable table(p, points);
  const Vector gf = full_gradient(p, x);

  VarianceCheck c;
  for (Index i = 0; i < p.n(); ++i) {
    const Vector est = table.estimator(i, grad_component(p, i, x));
    c.lhs += dual_norm_sq(geom, Vector(gf - est));
  }
  c.lhs *= inv_n;

  const double f_star = smooth_value(p, x_star);
  const Vector g_star = full_gradient(p, x_star);
  const double d_x = smooth_value(p, x) - f_star - g_star.dot(x - x_star);
  double d_table = -f_star;
  for (Index i = 0; i < p.n(); ++i) {
    d_table += inv_n * (component_value(p, i, points[i]) -
                        grad_component(p, i, x_star).dot(points[i] - x_star));
  }
  c.rhs = 4.0 * L * d_x + 4.0 * L * d_table;
  c.holds = c.lhs <= c.rhs + 1e-9 * (1.0 + c.rhs);
  return c;
}

LyapunovSnapshot lyapunov(const Problem& p, const std::vector<Vector>& points, const Vector& x,
                          const Vector& x_star, double eta) {
  check_points(p, points);
  if (!(eta > 0.0)) throw Error(Errc::invalid_argument, "lyapunov: step-size must be positive");
  const double n = static_cast<double>(p.n());
  const double F_star = objective_value(p, x_star);
  const Vector gF_star = full_gradient(p, x_star);

  LyapunovSnapshot s;
  s.omega = 4.0 / n;
  s.c = 1.0 / eta;
  double bracket = -F_star;
  for (Index i = 0; i < p.n(); ++i) {
    const Vector& phi = points[i];
    const double Fi = component_value(p, i, phi) + p.composite().value(phi);
    const Vector gFi = grad_component(p, i, x_star) - gF_star;
    bracket += (Fi - gFi.dot(phi - x_star)) / n;
  }
  s.term_table = bracket / s.omega;
  s.term_gap = objective_value(p, x) - F_star;
  s.term_dist = s.c * bregman(p.geometry(), x_star, x);
  s.T = s.term_table + s.term_gap + s.term_dist;
  return s;
}

ContractionCheck check_contraction(const Problem& p, const SolverConfig& cfg, const Vector& x,
                                   const std::vector<Vector>& points, const Vector& x_star, double mu, double L,
                                   int seeds) {
  if (!(mu > 0.0)) throw Error(Errc::domain, "check_contraction: needs mu > 0");
  if (seeds < 1) throw Error(Errc::invalid_argument, "check_contraction: needs at least one seed");
  check_points(p, points);

  ContractionCheck c;
  c.factor = contraction_factor(mu, L, p.n());
  SagaSolver probe(p, cfg, x, points);
  StepSizeController probe_ctl = probe.stepsize();
  c.T0 = lyapunov(p, points, x, x_star, probe_ctl.maybe_update(1)).T;
  if (c.T0 == 0.0) {
    c.vacuous = true;
    c.pass = true;
    return c;
  }
  std::vector<double> ratios;
  ratios.reserve(static_cast<std::size_t>(seeds));
  for (int s = 0; s < seeds; ++s) {
    SolverConfig run = cfg;
    run.seed = static_cast<std::uint64_t>(s);
    SagaSolver solver(p, run, x, points);
    // T_k is evaluated with c_k = 1/eta_k, the step-size the step will use.
    StepSizeController before = solver.stepsize();
    const double eta_k = before.maybe_update(1);
    const double T0 = lyapunov(p, points, x, x_star, eta_k).T;
    solver.step();
    std::vector<Vector> next = points;
    for (Index j : solver.last_batch()) next[j] = x;
    StepSizeController after = solver.stepsize();
    const double eta_next = after.maybe_update(solver.iteration() + 1);
    ratios.push_back(lyapunov(p, next, solver.x(), x_star, eta_next).T / T0);
  }
  c.mean_ratio = mean_of(ratios);
  c.std_error = std_error_of(ratios, c.mean_ratio);
  c.pass = c.mean_ratio <= c.factor + 3.0 * c.std_error;
  return c;
}

double sublinear_bound(long long K, Index n, double F0, double F_star, double gamma, double L, double V0) {
  return 2.0 / static_cast<double>(K) *
         (static_cast<double>(n) / 4.0 * (F0 - F_star) + 0.5 * F0 + gamma * L * V0);
}

std::vector<SublinearRow> check_sublinear(const Problem& p, const SolverConfig& cfg, const Vector& x_star,
                                          double L, double gamma, const std::vector<long long>& checkpoints,
                                          int seeds) {
  if (!(gamma >= 9.0)) throw Error(Errc::invalid_argument, "check_sublinear: gamma must be >= 9");
  if (!(L > 0.0)) throw Error(Errc::invalid_argument, "check_sublinear: L must be positive");
  if (checkpoints.empty() || seeds < 1) throw Error(Errc::invalid_argument, "check_sublinear: nothing to check");
  std::vector<long long> ks = checkpoints;
  std::sort(ks.begin(), ks.end());
  if (ks.front() < 1) throw Error(Errc::invalid_argument, "check_sublinear: K must be >= 1");

  SolverConfig base = cfg;
  base.stepsize.clamp = std::make_pair(1.0 / (gamma * L), 1.0 / (9.0 * L));
  base = resolve(p, base);
  const Vector x0 = base.x0 ? *base.x0 : p.geometry().center(p.dim());
  const double F0 = objective_value(p, x0);
  const double F_star = objective_value(p, x_star);
  const double V0 = bregman(p.geometry(), x_star, x0);

  std::vector<std::vector<double>> gaps(ks.size());
  for (int s = 0; s < seeds; ++s) {
    SolverConfig run = base;
    run.seed = static_cast<std::uint64_t>(s);
    SagaSolver solver(p, run);
    AverageIterate avg;
    std::size_t next = 0;
    // xbar_K averages x_1..x_K, where x_1 is the starting point.
    for (long long k = 1; next < ks.size(); ++k) {
      avg.add(solver.x());
      while (next < ks.size() && ks[next] == k) {
        gaps[next].push_back(objective_value(p, avg.mean()) - F_star);
        ++next;
      }
      if (next < ks.size()) solver.step();
    }
  }
  std::vector<SublinearRow> rows;
  for (std::size_t j = 0; j < ks.size(); ++j) {
    SublinearRow r;
    r.K = ks[j];
    r.mean_gap = mean_of(gaps[j]);
    r.std_error = std_error_of(gaps[j], r.mean_gap);
    r.bound = sublinear_bound(r.K, p.n(), F0, F_star, gamma, L, V0);
    r.pass = r.mean_gap <= r.bound;
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> curvature_proxy(const Problem& p, const Vector& x) {
  if (p.loss().kind != LossKind::logistic) {
    throw Error(Errc::unsupported, "curvature_proxy: defined for the logistic loss only");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.n()));
  for (Index i = 0; i < p.n(); ++i) {
    out.push_back(psi_second_derivative(p.loss(), margin(p, i, x), p.data().label(i)));
  }
  return out;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows) {
  csv::write_row(out, {"check", "lhs", "rhs", "pass"});
  for (const auto& r : rows) {
    csv::write_row(out, {csv::field(r.check), csv::field(r.lhs), csv::field(r.rhs), csv::field(r.pass)});
  }
}

}  // namespace sagabb
