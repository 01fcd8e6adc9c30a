// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: acceptance [criterion numbers...]; no arguments runs all twelve.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "sagabb/bench.hpp"
#include "sagabb/csv.hpp"
#include "sagabb/diagnostics.hpp"
#include "test_support.hpp"

using namespace sagabb;
using sagabb::testing::random_problem_data;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string mushrooms_path() { return std::string(SAGABB_DATA_DIR) + "/mushrooms.libsvm"; }

std::vector<Vector> gaussian_points(std::mt19937_64& rng, Index n, Index d, double scale) {
  std::normal_distribution<double> g;
  std::vector<Vector> pts;
  for (Index i = 0; i < n; ++i) {
    Vector v(d);
    for (Index j = 0; j < d; ++j) v(j) = scale * g(rng);
    pts.push_back(v);
  }
  return pts;
}

std::vector<Vector> simplex_points(std::mt19937_64& rng, Index n, Index d) {
  std::exponential_distribution<double> e(1.0);
  std::vector<Vector> pts;
  for (Index i = 0; i < n; ++i) {
    Vector v(d);
    for (Index j = 0; j < d; ++j) v(j) = e(rng);
    pts.push_back(v / v.sum());
  }
  return pts;
}

double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// 1. psi' and grad f_i against central differences, h = 1e-6.
Outcome gradient_correctness() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> z(-5.0, 5.0), lab(-2.0, 2.0);
  const double h = 1e-6;
  double worst_psi = 0.0, worst_grad = 0.0;
  for (const Loss& loss : {Loss::logistic(), Loss::ridge(), Loss::huber(1.0)}) {
    for (int c = 0; c < 1000; ++c) {
      const double b = loss.kind == LossKind::ridge ? lab(rng) : (rng() % 2 ? 1.0 : -1.0);
      double t = z(rng);
      // Keep the finite-difference stencil off the Huber kinks.
      if (loss.kind == LossKind::huber && std::abs(std::abs(t - b) - loss.delta) < 1e-3) t += 0.01;
      const double fd = (psi_value(loss, t + h, b) - psi_value(loss, t - h, b)) / (2 * h);
      worst_psi = std::max(worst_psi, rel_err(psi_derivative(loss, t, b), fd));
    }
    for (int c = 0; c < 1000; ++c) {
      auto data = random_problem_data(rng, 1, 6, 0.6);
      Problem p(data, loss, 0.05);
      Vector x = gaussian_points(rng, 1, 6, 0.5)[0];
      if (loss.kind == LossKind::huber) {
        const double r = margin(p, 0, x) - data->label(0);
        if (std::abs(std::abs(r) - loss.delta) < 1e-3) x *= 1.01;
      }
      const Vector g = grad_component(p, 0, x);
      Vector fd(6);
      for (Index j = 0; j < 6; ++j) {
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        fd(j) = (component_value(p, 0, xp) - component_value(p, 0, xm)) / (2 * h);
      }
      const double s = std::max(g.norm(), fd.norm());
      worst_grad = std::max(worst_grad, s == 0.0 ? 0.0 : (g - fd).norm() / s);
    }
  }
  return {worst_psi <= 1e-6 && worst_grad <= 1e-6,
          "max rel err psi' " + fmt(worst_psi) + ", grad " + fmt(worst_grad) + " (3 losses x 1000 cases)"};
}

// 2. Euclidean prox against a 1e-4 grid; entropy prox on the simplex.
Outcome prox_correctness() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.05, 1.0);
  double worst = 0.0;
  const Geometry euc = Geometry::euclidean();
  for (int c = 0; c < 100; ++c) {
    const double x = u(rng), g = u(rng), eta = pos(rng), lambda = pos(rng);
    Vector xv(1), gv(1);
    xv << x;
    gv << g;
    for (const auto& h : {CompositeTerm::l1(lambda), CompositeTerm::l2_squared(lambda)}) {
      const double got = prox_step(euc, h, xv, eta, gv)(0);
      auto obj = [&](double v) {
        Vector vv(1);
        vv << v;
        return 0.5 * (v - x) * (v - x) + eta * g * v + eta * h.value(vv);
      };
      double best = 0.0, best_val = std::numeric_limits<double>::infinity();
      for (int k = -60000; k <= 60000; ++k) {
        const double v = k * 1e-4;
        if (const double f = obj(v); f < best_val) {
          best_val = f;
          best = v;
        }
      }
      worst = std::max(worst, std::abs(got - best));
    }
  }
  const Geometry ent = Geometry::entropy_simplex();
  double worst_sum = 0.0;
  for (int c = 0; c < 100; ++c) {
    const Vector x = simplex_points(rng, 1, 7)[0];
    const Vector g = gaussian_points(rng, 1, 7, 3.0)[0];
    worst_sum = std::max(worst_sum, std::abs(prox_step(ent, CompositeTerm::zero(), x, pos(rng), g).sum() - 1.0));
  }
  // Two coordinates: u_1 = 1 / (1 + (x_2 / x_1) exp(-eta (g_2 - g_1))).
  struct Hand {
    double x1, g1, g2, eta, u1;
  };
  const Hand hand[] = {
      {0.5, 0.0, std::log(3.0), 1.0, 0.75},
      {0.5, 1.0, 1.0, 2.0, 0.5},
      {0.25, 0.0, 0.0, 1.0, 0.25},
      {0.2, 1.0, -1.0, 0.5, 1.0 / (1.0 + 4.0 * std::exp(1.0))},
      {0.9, -3.0, 2.0, 0.1, 1.0 / (1.0 + (0.1 / 0.9) * std::exp(-0.5))},
  };
  double worst_hand = 0.0;
  for (const auto& c : hand) {
    Vector x(2), g(2);
    x << c.x1, 1.0 - c.x1;
    g << c.g1, c.g2;
    const Vector got = prox_step(ent, CompositeTerm::zero(), x, c.eta, g);
    worst_hand = std::max({worst_hand, std::abs(got(0) - c.u1), std::abs(got(1) - (1.0 - c.u1))});
  }
  // Grid resolution 1e-4: the grid argmin is within half a cell of the exact one.
  return {worst <= 0.5e-4 + 1e-12 && worst_sum <= 1e-9 && worst_hand <= 2e-16,
          "grid dev " + fmt(worst) + ", simplex sum dev " + fmt(worst_sum) + ", 2-d hand dev " + fmt(worst_hand)};
}

// 3. Mean over i of the SAGA estimator equals grad f(x).
Outcome unbiasedness() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Index n = 5 + static_cast<Index>(rng() % 46), d = 1 + static_cast<Index>(rng() % 8);
    auto data = random_problem_data(rng, n, d, 0.5);
    const Loss loss = s % 3 == 0 ? Loss::logistic() : s % 3 == 1 ? Loss::ridge() : Loss::huber(0.5);
    Problem p(data, loss, 0.01 * (s % 2));
    VectorTable table(p, gaussian_points(rng, n, d, 1.0));
    const Vector x = gaussian_points(rng, 1, d, 1.0)[0];
    Vector mean = Vector::Zero(d);
    for (Index i = 0; i < n; ++i) mean += table.estimator(i, grad_component(p, i, x));
    mean /= static_cast<double>(n);
    worst = std::max(worst, (mean - full_gradient(p, x)).lpNorm<Eigen::Infinity>());
  }
  return {worst <= 1e-12, "max |E[v] - grad f| " + fmt(worst) + " over 50 states"};
}

// sTy for sample i from x and phi in extended precision (linear predictor, no smooth l2).
long double exact_sty(const Problem& p, Index i, const Vector& x, const Vector& phi) {
  const auto& row = p.data().row(i);
  long double z_new = 0, z_old = 0, dz = 0;
  for (std::size_t t = 0; t < row.indices.size(); ++t) {
    const long double a = row.values[t];
    const Index j = row.indices[t];
    z_new += a * x(j);
    z_old += a * phi(j);
    dz += a * (static_cast<long double>(x(j)) - phi(j));
  }
  const long double b = p.data().label(i);
  return dz * (psi_derivative<long double>(p.loss(), z_new, b) - psi_derivative<long double>(p.loss(), z_old, b));
}

// 4. Vector and scalar tables give the same trajectory at |B| = 1.
Outcome scalar_table_equivalence() {
  std::mt19937_64 rng(4);
  auto data = random_problem_data(rng, 200, 50, 0.2);
  const double lambda = 1.0 / 200.0;
  Problem p(data, Loss::logistic(), 0.0, CompositeTerm::l2_squared(lambda));
  SolverConfig cfg;
  cfg.stepsize.variant = Variant::stable_bb2;
  cfg.stepsize.eta0 = 1.0;
  cfg.batch = 1;
  cfg.seed = 11;
  cfg.memory = MemoryMode::vector_table;
  SagaSolver a(p, resolve(p, cfg));
  cfg.memory = MemoryMode::scalar_table;
  SagaSolver b(p, resolve(p, cfg));
  std::vector<Vector> phi(static_cast<std::size_t>(p.n()), a.x());

  double worst_x = 0.0, worst_pair = 0.0;
  long double vec_vs_exact = 0, scalar_vs_exact = 0;
  int over = 0;
  const Index steps = 5 * p.n();
  for (Index k = 0; k < steps; ++k) {
    const Vector xk = a.x();
    a.step();
    b.step();
    worst_x = std::max(worst_x, (a.x() - b.x()).lpNorm<Eigen::Infinity>());
    const auto &pa = a.last_pair(), &pb = b.last_pair();
    if (!pa.sTy || !pb.sTy) return {false, "sTy missing from a curvature pair"};
    const double e = std::max(rel_err(*pa.sTy, *pb.sTy), rel_err(pa.yTy, pb.yTy));
    worst_pair = std::max(worst_pair, e);
    const Index i = a.last_batch().front();
    if (e > 1e-12) {
      ++over;
      const long double ref = exact_sty(p, i, xk, phi[static_cast<std::size_t>(i)]);
      vec_vs_exact = std::max(vec_vs_exact, std::abs((*pa.sTy - ref) / ref));
      scalar_vs_exact = std::max(scalar_vs_exact, std::abs((*pb.sTy - ref) / ref));
    }
    phi[static_cast<std::size_t>(i)] = xk;
  }
  std::string detail = "stable-bb2, " + std::to_string(steps) + " steps: max |x_vec - x_scalar|_inf " +
                       fmt(worst_x) + ", max pair rel err " + fmt(worst_pair);
  if (over > 0) {
    detail += " (" + std::to_string(over) + " steps over 1e-12; there sTy vs extended precision: vector " +
              fmt(static_cast<double>(vec_vs_exact)) + ", scalar " + fmt(static_cast<double>(scalar_vs_exact)) +
              ")";
  }
  return {worst_x <= 1e-10 && worst_pair <= 1e-12, detail};
}

// 5. Lemma 1 on 200 random states per loss and geometry.
Outcome variance_bound() {
  std::mt19937_64 rng(5);
  const Index n = 20, d = 5;
  auto data = random_problem_data(rng, n, d, 0.6);
  std::string detail;
  bool all = true;
  for (const Loss& loss : {Loss::logistic(), Loss::ridge()}) {
    for (bool simplex : {false, true}) {
      Problem p = simplex ? Problem(data, loss, 0.0, CompositeTerm::zero(), Geometry::entropy_simplex())
                          : Problem(data, loss, 0.0);
      const double L = simplex ? estimate_smoothness_sampled(p, 2000, 7) : estimate_constants(p)->L;
      const Vector xs = reference_optimum(p).x;
      int held = 0;
      double tightest = 0.0;
      for (int t = 0; t < 200; ++t) {
        auto pts = simplex ? simplex_points(rng, n, d) : gaussian_points(rng, n, d, 1.0);
        const Vector x = simplex ? simplex_points(rng, 1, d)[0] : gaussian_points(rng, 1, d, 1.0)[0];
        const auto c = check_variance_bound(p, pts, x, xs, L);
        held += c.holds ? 1 : 0;
        if (c.rhs > 0.0) tightest = std::max(tightest, c.lhs / c.rhs);
      }
      all = all && held == 200;
      detail += std::string(to_string(loss.kind)) + (simplex ? "/simplex " : "/l2 ") + std::to_string(held) +
                "/200 (max lhs/rhs " + fmt(tightest) + ") ";
    }
  }
  return {all, detail};
}

// 6. One-step Lyapunov contraction on the n = 4, mu = L = 1 quadratic.
Outcome contraction() {
  auto data = std::make_shared<SparseDataset>(std::vector<SparseVector>(4, SparseVector{{}, {}, 3}),
                                              std::vector<double>{1, -2, 0.5, 3}, 3);
  Problem p(data, Loss::ridge(), 1.0);
  std::mt19937_64 rng(6);
  const auto pts = gaussian_points(rng, 4, 3, 1.0);
  const Vector x = gaussian_points(rng, 1, 3, 1.0)[0];
  bool all = true;
  std::string detail;
  for (double eta : {1.0 / 90.0, 1.0 / 17.0}) {
    SolverConfig cfg;
    cfg.stepsize.eta0 = eta;
    cfg.stepsize.clamp = std::make_pair(1.0 / 90.0, 1.0 / 17.0);
    const auto c = check_contraction(p, cfg, x, pts, Vector::Zero(3), 1.0, 1.0, 10000);
    all = all && c.pass && !c.vacuous;
    detail += "eta=1/" + fmt(1.0 / eta) + ": mean " + fmt(c.mean_ratio) + " vs " + fmt(c.factor) + "+3*" +
              fmt(c.std_error) + "; ";
  }
  return {all, detail};
}

// 7. Averaged-iterate bound on a 20 x 5 logistic instance with a finite optimum.
Outcome sublinear() {
  std::mt19937_64 rng(7);
  auto base = random_problem_data(rng, 10, 5, 0.7);
  std::vector<SparseVector> rows;
  std::vector<double> labels;
  // Five opposite-label pairs along a basis of R^5 keep the optimum finite.
  for (Index j = 0; j < 5; ++j) {
    SparseVector r;
    r.dim = 5;
    for (Index k = 0; k <= j; ++k) {
      r.indices.push_back(k);
      r.values.push_back(1.0 + 0.5 * static_cast<double>(k));
    }
    rows.push_back(r);
    labels.push_back(1.0);
    rows.push_back(r);
    labels.push_back(-1.0);
  }
  for (Index i = 0; i < base->n(); ++i) {
    rows.push_back(base->row(i));
    labels.push_back(base->label(i));
  }
  auto data = std::make_shared<SparseDataset>(std::move(rows), std::move(labels), 5);
  Problem p(data, Loss::logistic(), 0.0);
  const auto ref = reference_optimum(p);
  const double L = estimate_constants(p)->L;
  std::vector<long long> ks;
  for (long long k = p.n(); k <= 64 * p.n(); k *= 2) ks.push_back(k);
  const auto rows_out = check_sublinear(p, SolverConfig{}, ref.x, L, 9.0, ks, 20);
  bool all = ref.converged && rows_out.size() == ks.size();
  double worst = 0.0;
  for (const auto& r : rows_out) {
    all = all && r.pass;
    worst = std::max(worst, r.mean_gap / r.bound);
  }
  return {all, "max gap/bound " + fmt(worst) + " over K = n..64n, 20 seeds (F* certificate " +
                   fmt(ref.certificate) + ")"};
}

// 8. Stable BB2 with alpha = 2 settles at eta = 1/2 on f = ||x||^2 / 2.
Outcome fixed_point() {
  std::string detail;
  bool all = true;
  auto check = [&](const std::string& name, const Problem& p, MemoryMode mode, Vector x0) {
    SolverConfig cfg;
    cfg.stepsize.variant = Variant::stable_bb2;
    cfg.stepsize.alpha = 2.0;
    cfg.stepsize.eta0 = 0.1;
    cfg.memory = mode;
    cfg.epochs = 20;
    cfg.x0 = std::move(x0);
    cfg = resolve(p, cfg);
    const long m = cfg.stepsize.m;
    int windows = 0, exact = 0;
    run_saga_adaptive(p, cfg, [&](const SagaSolver& s) {
      // eta for the coming window is fixed when iteration() % m == 0.
      if (s.iteration() % m == 0 && s.iteration() > 0) {
        ++windows;
        exact += s.stepsize().state().eta == 0.5 ? 1 : 0;
      }
    });
    all = all && windows > 0 && exact == windows;
    detail += name + " " + std::to_string(exact) + "/" + std::to_string(windows) + "; ";
  };
  // Rows a_i = 1 in one dimension: every component is (x - 0)^2 / 2.
  auto one_d = std::make_shared<SparseDataset>(std::vector<SparseVector>(6, SparseVector{{0}, {1.0}, 1}),
                                               std::vector<double>(6, 0.0), 1);
  Problem p1(one_d, Loss::ridge(), 0.0);
  check("scalar d=1", p1, MemoryMode::scalar_table, Vector::Constant(1, 1.5));
  check("vector d=1", p1, MemoryMode::vector_table, Vector::Constant(1, 1.5));
  // Empty rows with smooth l2 = 1: every component is ||x||^2 / 2 + const.
  auto empty = std::make_shared<SparseDataset>(std::vector<SparseVector>(5, SparseVector{{}, {}, 4}),
                                               std::vector<double>{1, -1, 2, 0, 3}, 4);
  Problem p4(empty, Loss::ridge(), 1.0);
  Vector x0(4);
  x0 << 1.0, -2.0, 0.5, 3.0;
  check("vector d=4", p4, MemoryMode::vector_table, x0);
  return {all, detail};
}

// 9. One outlier pair barely moves the mediant but drags the mean of ratios.
Outcome mediant_stability() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> eig(1.0, 10.0);
  const Index d = 10;
  Vector h(d);
  for (Index j = 0; j < d; ++j) h(j) = eig(rng);
  StepSizeState benign;
  for (int k = 0; k < 20; ++k) {
    const Vector s = gaussian_points(rng, 1, d, 1.0)[0];
    const Vector y = h.cwiseProduct(s);
    CurvaturePair pair;
    pair.sTs = s.squaredNorm();
    pair.sTy = s.dot(y);
    pair.yTy = y.squaredNorm();
    record(benign, pair);
  }
  StepSizeState outlier = benign;
  CurvaturePair bad;
  bad.sTy = 1e-8;
  bad.yTy = 1e-2;
  record(outlier, bad);
  StepSizeConfig stable{Variant::stable_bb2, 1.0, 21, 1.0, std::nullopt};
  StepSizeConfig mean = stable;
  mean.variant = Variant::unstable_bb2;
  const double ds = rel_err(*candidate(outlier, stable), *candidate(benign, stable));
  const double dm = rel_err(*candidate(outlier, mean), *candidate(benign, mean));
  return {ds <= 1e-4 && dm >= 10.0 * ds,
          "stable-bb2 moves " + fmt(ds) + ", bb2 mean moves " + fmt(dm) + " (" + fmt(dm / ds) + "x)"};
}

bench::ExperimentSpec mushrooms_spec() {
  bench::ExperimentSpec spec;
  spec.dataset = mushrooms_path();
  spec.batches = {8};
  spec.seeds = {0, 1, 2, 3, 4};
  spec.rerun_best = false;
  return spec;
}

// Mean final objective per (solver, eta0).
std::map<std::pair<SolverKind, double>, double> final_mean(const bench::ExperimentResult& r) {
  std::map<std::pair<SolverKind, double>, double> out;
  for (const auto& s : r.summary) out[{s.key.solver, s.key.eta0}] = s.final_loss_mean;
  return out;
}

// 10. SAGA-BB with default settings against the best constant step on mushrooms.
Outcome convergence_trend() {
  auto spec = mushrooms_spec();
  spec.epochs = 50;
  auto data = bench::load_dataset(spec);
  const Problem p = bench::make_problem(spec, data);
  const auto ref = reference_optimum(p);

  spec.solvers = {SolverKind::saga};
  const auto saga = bench::run_experiment(spec, data);
  spec.solvers = {SolverKind::saga_adaptive};
  spec.eta0s = {SolverConfig{}.stepsize.eta0};
  const auto bb = bench::run_experiment(spec, data);

  double best_saga = std::numeric_limits<double>::infinity(), best_eta = 0.0;
  for (const auto& s : saga.summary) {
    if (s.diverged == 0 && s.failed == 0 && s.final_loss_mean - ref.value < best_saga) {
      best_saga = s.final_loss_mean - ref.value;
      best_eta = s.key.eta0;
    }
  }
  const auto& b = bb.summary.front();
  const double gap = b.final_loss_mean - ref.value;
  const bool ok = ref.converged && b.diverged == 0 && b.failed == 0 && gap <= 1.5 * best_saga;
  return {ok, "stable-bb2 gap " + fmt(gap) + " vs best saga gap " + fmt(best_saga) + " (eta0=" + fmt(best_eta) +
                  "), F* certificate " + fmt(ref.certificate)};
}

// 11. Final gradient norm across the eta0 grid.
Outcome robustness_sweep() {
  auto spec = mushrooms_spec();
  spec.epochs = 120;
  spec.solvers = {SolverKind::saga_adaptive, SolverKind::svrg, SolverKind::sarah};
  auto data = bench::load_dataset(spec);
  const auto r = bench::run_experiment(spec, data);
  std::map<SolverKind, std::vector<double>> norms;
  std::map<SolverKind, int> diverged;
  for (const auto& s : r.summary) {
    diverged[s.key.solver] += s.diverged + s.failed;
    if (s.diverged == 0 && s.failed == 0) norms[s.key.solver].push_back(s.final_grad_norm_mean);
  }
  auto spread = [&](SolverKind k) {
    const auto& v = norms[k];
    if (v.empty()) return std::numeric_limits<double>::infinity();
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  const double bb = spread(SolverKind::saga_adaptive);
  bool baseline_fragile = false;
  std::string detail = "saga-bb spread " + fmt(bb) + " (diverged " +
                       std::to_string(diverged[SolverKind::saga_adaptive]) + ")";
  for (SolverKind k : {SolverKind::svrg, SolverKind::sarah}) {
    const double sp = spread(k);
    baseline_fragile = baseline_fragile || sp >= 1e4 || diverged[k] > 0;
    detail += ", " + std::string(to_string(k)) + " spread " + fmt(sp) + " (diverged " + std::to_string(diverged[k]) +
              ")";
  }
  return {diverged[SolverKind::saga_adaptive] == 0 && bb <= 1e2 && baseline_fragile, detail};
}

std::string without_timing(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::string line, out;
  std::getline(f, line);
  const auto header = csv::split_row(line);
  const auto col = static_cast<std::size_t>(std::find(header.begin(), header.end(), "wall_ms") - header.begin());
  out += line + "\n";
  while (std::getline(f, line)) {
    auto fields = csv::split_row(line);
    fields.at(col).clear();
    std::ostringstream row;
    csv::write_row(row, fields);
    out += row.str();
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// 12. Same spec, same bytes (timing column aside), also across worker counts.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sagabb_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::vector<std::string> base{"run",    "--dataset", mushrooms_path(), "--solver", "saga-bb,saga,svrg,sarah",
                                "--variant", "stable-bb2,bb1", "--eta0", "0.01,1", "--batch", "1,8",
                                "--epochs", "3", "--seeds", "0..1"};
  std::ostringstream sink;
  int rc = 0;
  for (const auto& [name, workers] : {std::pair<const char*, const char*>{"a", "1"}, {"b", "1"}, {"c", "3"}}) {
    auto args = base;
    args.insert(args.end(), {"--out", (dir / (std::string(name) + ".csv")).string(), "--workers", workers});
    rc = std::max(rc, bench::cli_main(args, sink, sink));
  }
  if (rc != 0) return {false, "cli exit " + std::to_string(rc) + ": " + sink.str()};
  auto path = [&](const char* n, const char* ext) { return (dir / (std::string(n) + ext)).string(); };
  bool same = true;
  for (const char* other : {"b", "c"}) {
    same = same && without_timing(path("a", ".csv")) == without_timing(path(other, ".csv")) &&
           slurp(path("a", ".summary.csv")) == slurp(path(other, ".summary.csv")) &&
           slurp(path("a", ".meta.json")) == slurp(path(other, ".meta.json"));
  }
  const bool timing_differs = slurp(path("a", ".csv")) != slurp(path("b", ".csv"));
  const auto rows = std::count(std::istreambuf_iterator<char>(*std::make_unique<std::ifstream>(path("a", ".csv"))),
                               std::istreambuf_iterator<char>(), '\n');
  fs::remove_all(dir);
  return {same, std::to_string(rows - 1) + " trace rows identical across 3 runs (workers 1, 1, 3)" +
                    (timing_differs ? "; raw files differ only in wall_ms" : "")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient correctness", 5, gradient_correctness},
      {2, "prox correctness", 10, prox_correctness},
      {3, "estimator unbiasedness", 5, unbiasedness},
      {4, "scalar table equivalence", 30, scalar_table_equivalence},
      {5, "variance bound", 60, variance_bound},
      {6, "one-step contraction", 60, contraction},
      {7, "averaged-iterate bound", 60, sublinear},
      {8, "step-size fixed point", 5, fixed_point},
      {9, "mediant stability", 1, mediant_stability},
      {10, "convergence trend on mushrooms", 600, convergence_trend},
      {11, "robustness sweep on mushrooms", 1200, robustness_sweep},
      {12, "determinism", 600, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " " << c.id << ". " << c.name << ": " << o.detail << " [" << fmt(secs)
              << " s of " << fmt(c.budget_s) << " s" << (in_time ? "" : ", over budget") << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
