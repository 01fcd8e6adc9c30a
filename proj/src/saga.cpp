#include <algorithm>
#include <cmath>
#include <string>

#include "sagabb/solvers.hpp"
#include "trace_recorder.hpp"

namespace sagabb {

std::string_view to_string(SolverKind s) {
  switch (s) {
    case SolverKind::saga_adaptive: return "saga-bb";
    case SolverKind::saga: return "saga";
    case SolverKind::svrg: return "svrg";
    case SolverKind::svrg_bb: return "svrg-bb";
    case SolverKind::svrg_loopless: return "svrg-loopless";
    case SolverKind::sarah: return "sarah";
  }
  return "?";
}

SolverKind parse_solver(std::string_view s) {
  for (auto k : {SolverKind::saga_adaptive, SolverKind::saga, SolverKind::svrg, SolverKind::svrg_bb,
                 SolverKind::svrg_loopless, SolverKind::sarah}) {
    if (to_string(k) == s) return k;
  }
  throw Error(Errc::invalid_argument, "unknown solver '" + std::string(s) + "'");
}

std::string_view to_string(MemoryMode m) {
  return m == MemoryMode::vector_table ? "vector" : "scalar";
}

MemoryMode parse_memory_mode(std::string_view s) {
  if (s == "vector") return MemoryMode::vector_table;
  if (s == "scalar") return MemoryMode::scalar_table;
  throw Error(Errc::invalid_argument, "unknown memory mode '" + std::string(s) + "'");
}

std::string_view to_string(RunStatus s) { return s == RunStatus::ok ? "ok" : "diverged"; }

SolverConfig resolve(const Problem& p, SolverConfig cfg) {
  const Index n = p.n();
  if (cfg.batch < 1 || cfg.batch > n) {
    throw Error(Errc::invalid_argument, "batch size must lie in [1, n]");
  }
  if (cfg.epochs < 1) throw Error(Errc::invalid_argument, "epochs must be >= 1");
  if (cfg.solver == SolverKind::saga) cfg.stepsize.variant = Variant::constant;
  if (cfg.stepsize.m == 0) cfg.stepsize.m = std::max<long>(1, static_cast<long>(n / cfg.batch));
  if (cfg.stepsize.alpha <= 0.0) cfg.stepsize.alpha = default_alpha(cfg.stepsize.variant, cfg.stepsize.m);
  cfg.stepsize.validate();

  const bool saga_family = cfg.solver == SolverKind::saga_adaptive || cfg.solver == SolverKind::saga;
  if (cfg.memory == MemoryMode::scalar_table) {
    if (!saga_family) throw Error(Errc::invalid_argument, "scalar table is only available to SAGA solvers");
    if (!p.is_pure_linear_predictor()) {
      throw Error(Errc::invalid_argument, "scalar table needs the l2 term in the prox (move_l2_to_prox)");
    }
    if (needs_displacement(cfg.stepsize.variant)) {
      throw Error(Errc::invalid_argument, "variant '" + std::string(to_string(cfg.stepsize.variant)) +
                                              "' needs the stored points; use the vector table");
    }
  }
  if (!cfg.inner_loop) cfg.inner_loop = std::max<Index>(1, n / cfg.batch);
  if (*cfg.inner_loop < 0) throw Error(Errc::invalid_argument, "inner loop length must be >= 0");
  if (!cfg.loopless_p) cfg.loopless_p = static_cast<double>(cfg.batch) / static_cast<double>(n);
  if (!(*cfg.loopless_p > 0.0 && *cfg.loopless_p <= 1.0)) {
    throw Error(Errc::invalid_argument, "restart probability must lie in (0, 1]");
  }
  if (cfg.x0) {
    if (cfg.x0->size() != p.dim()) throw Error(Errc::dimension_mismatch, "x0 has the wrong length");
    p.geometry().require_domain(*cfg.x0, "x0");
  }
  return cfg;
}

Index Rng::uniform(Index n) { return std::uniform_int_distribution<Index>(0, n - 1)(engine_); }

void Rng::sample_batch(Index n, Index batch, std::vector<Index>& out) {
  out.clear();
  if (batch == 1) {
    out.push_back(uniform(n));
    return;
  }
  // Floyd's algorithm: distinct indices, deterministic for a given engine state.
  for (Index j = n - batch; j < n; ++j) {
    const Index t = std::uniform_int_distribution<Index>(0, j)(engine_);
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
}

void AverageIterate::add(const Vector& x) {
  ++count_;
  if (count_ == 1) {
    mean_ = x;
  } else {
    mean_ += (x - mean_) / static_cast<double>(count_);
  }
}

namespace {

Vector start_point(const Problem& p, const SolverConfig& cfg) {
  return cfg.x0 ? *cfg.x0 : p.geometry().center(p.dim());
}

std::variant<VectorTable, ScalarTable> make_table(const Problem& p, const SolverConfig& cfg,
                                                  const Vector& x0) {
  if (cfg.memory == MemoryMode::scalar_table) {
    return std::variant<VectorTable, ScalarTable>(std::in_place_type<ScalarTable>, p, x0);
  }
  // Every adaptive variant needs s (at least for s^T y), so only the
  // constant variant skips the points.
  const bool points = cfg.stepsize.variant != Variant::constant;
  return std::variant<VectorTable, ScalarTable>(std::in_place_type<VectorTable>, p, x0, points);
}

}  // namespace

SagaSolver::SagaSolver(const Problem& p, const SolverConfig& cfg)
    : problem_(&p),
      cfg_(resolve(p, cfg)),
      rng_(cfg_.seed),
      ctl_(cfg_.stepsize),
      x_(start_point(p, cfg_)),
      table_(make_table(p, cfg_, x_)),
      evals_(p.n()) {}

SagaSolver::SagaSolver(const Problem& p, const SolverConfig& cfg, Vector x, std::vector<Vector> points)
    : problem_(&p),
      cfg_(resolve(p, cfg)),
      rng_(cfg_.seed),
      ctl_(cfg_.stepsize),
      x_(std::move(x)),
      table_(std::in_place_type<VectorTable>, p, std::move(points)),
      evals_(p.n()) {
  if (cfg_.memory != MemoryMode::vector_table) {
    throw Error(Errc::invalid_argument, "explicit table states use the vector table");
  }
  if (x_.size() != p.dim()) throw Error(Errc::dimension_mismatch, "x has the wrong length");
}

void SagaSolver::step() {
  const Problem& p = *problem_;
  ++k_;
  const double eta = ctl_.maybe_update(static_cast<long>(k_));
  rng_.sample_batch(p.n(), cfg_.batch, batch_);

  if (auto* vt = std::get_if<VectorTable>(&table_)) {
    gnew_.resize(batch_.size());
    for (std::size_t j = 0; j < batch_.size(); ++j) gnew_[j] = grad_component(p, batch_[j], x_);
    est_ = vt->estimator(batch_, gnew_);
    pair_ = vt->commit(batch_, gnew_, x_);
  } else {
    auto& st = std::get<ScalarTable>(table_);
    znew_.resize(batch_.size());
    for (std::size_t j = 0; j < batch_.size(); ++j) znew_[j] = dot(p.data().row(batch_[j]), x_);
    est_ = st.estimator(batch_, znew_);
    pair_ = st.commit(batch_, znew_);
  }
  evals_ += static_cast<long long>(batch_.size());
  if (cfg_.stepsize.variant != Variant::constant) ctl_.record(pair_);
  x_ = prox_step(p.geometry(), p.composite(), x_, eta, est_);
}

SolverTrace run_saga_adaptive(const Problem& p, const SolverConfig& cfg, const IterationObserver& observer) {
  detail::TraceRecorder rec(p, cfg.epochs);
  SagaSolver solver(p, cfg);
  // Pass 0 is the starting point, before the table initialization pass.
  rec.update(0, solver.x(), solver.eta());
  rec.update(solver.grad_evals(), solver.x(), solver.eta());
  while (!rec.finished()) {
    solver.step();
    if (observer) observer(solver);
    rec.update(solver.grad_evals(), solver.x(), solver.eta());
  }
  return rec.finish(solver.x(), cfg.seed, solver.iteration());
}

SolverTrace run_solver(const Problem& p, const SolverConfig& cfg) {
  if (cfg.solver == SolverKind::saga_adaptive || cfg.solver == SolverKind::saga) {
    return run_saga_adaptive(p, cfg);
  }
  return run_baseline(p, cfg);
}

}  // namespace sagabb
