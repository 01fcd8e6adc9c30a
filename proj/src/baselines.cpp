#include <algorithm>
#include <cmath>

#include "sagabb/solvers.hpp"
#include "trace_recorder.hpp"

namespace sagabb {

namespace {

// (1/|B|) sum_j (grad f_j(x) - grad f_j(ref)) + anchor
Vector corrected_gradient(const Problem& p, const std::vector<Index>& batch, const Vector& x,
                          const Vector& ref, const Vector& anchor) {
  Vector v = anchor;
  const double w = 1.0 / static_cast<double>(batch.size());
  for (Index j : batch) {
    add_grad_component(p, j, x, w, v);
    add_grad_component(p, j, ref, -w, v);
  }
  return v;
}

class BaselineRun {
 public:
  BaselineRun(const Problem& p, const SolverConfig& cfg)
      : p_(p), cfg_(resolve(p, cfg)), rng_(cfg_.seed), rec_(p, cfg_.epochs) {
    x_ = cfg_.x0 ? *cfg_.x0 : p.geometry().center(p.dim());
    eta_ = cfg_.stepsize.eta0;
    if (cfg_.stepsize.clamp) eta_ = std::clamp(eta_, cfg_.stepsize.clamp->first, cfg_.stepsize.clamp->second);
    rec_.update(0, x_, eta_);
  }

  SolverTrace run() {
    switch (cfg_.solver) {
      case SolverKind::svrg:
      case SolverKind::svrg_bb: run_svrg(); break;
      case SolverKind::svrg_loopless: run_loopless(); break;
      case SolverKind::sarah: run_sarah(); break;
      default: throw Error(Errc::invalid_argument, "run_baseline: not a baseline solver");
    }
    return rec_.finish(x_, cfg_.seed, iterations_);
  }

 private:
  Vector full_grad(const Vector& x) {
    evals_ += p_.n();
    return full_gradient(p_, x);
  }

  bool advance(const Vector& v) {
    x_ = prox_step(p_.geometry(), p_.composite(), x_, eta_, v);
    ++iterations_;
    return rec_.update(evals_, x_, eta_);
  }

  void draw() {
    rng_.sample_batch(p_.n(), cfg_.batch, batch_);
    evals_ += 2 * static_cast<long long>(batch_.size());
  }

  void run_svrg() {
    const Index inner = *cfg_.inner_loop;
    Vector prev_ref, prev_grad;
    while (!rec_.finished()) {
      const Vector ref = x_;
      const Vector g_ref = full_grad(ref);
      if (!rec_.update(evals_, x_, eta_)) break;
      if (cfg_.solver == SolverKind::svrg_bb && prev_ref.size() > 0) {
        // eta = ||dx||^2 / (m * dx^T dg) with m the inner-loop length.
        const Vector dx = ref - prev_ref;
        const double den = dx.dot(g_ref - prev_grad);
        if (den > 0.0) {
          eta_ = dx.squaredNorm() / (static_cast<double>(std::max<Index>(inner, 1)) * den);
          if (cfg_.stepsize.clamp) {
            eta_ = std::clamp(eta_, cfg_.stepsize.clamp->first, cfg_.stepsize.clamp->second);
          }
        }
      }
      prev_ref = ref;
      prev_grad = g_ref;
      if (inner == 0) {
        // No inner loop: a plain full prox-gradient step per outer pass.
        if (!advance(g_ref)) break;
        continue;
      }
      for (Index t = 0; t < inner; ++t) {
        draw();
        if (!advance(corrected_gradient(p_, batch_, x_, ref, g_ref))) return;
      }
    }
  }

  void run_loopless() {
    Vector ref = x_;
    Vector g_ref = full_grad(ref);
    if (!rec_.update(evals_, x_, eta_)) return;
    while (!rec_.finished()) {
      draw();
      if (!advance(corrected_gradient(p_, batch_, x_, ref, g_ref))) return;
      if (rng_.uniform01() < *cfg_.loopless_p) {
        ref = x_;
        g_ref = full_grad(ref);
        if (!rec_.update(evals_, x_, eta_)) return;
      }
    }
  }

  void run_sarah() {
    const Index inner = *cfg_.inner_loop;
    while (!rec_.finished()) {
      Vector v = full_grad(x_);
      if (!rec_.update(evals_, x_, eta_)) break;
      Vector prev = x_;
      if (!advance(v)) break;
      for (Index t = 1; t < inner; ++t) {
        draw();
        v = corrected_gradient(p_, batch_, x_, prev, v);
        prev = x_;
        if (!advance(v)) return;
      }
    }
  }

  const Problem& p_;
  SolverConfig cfg_;
  Rng rng_;
  detail::TraceRecorder rec_;
  Vector x_;
  double eta_ = 1.0;
  long long evals_ = 0;
  long long iterations_ = 0;
  std::vector<Index> batch_;
};

}  // namespace

SolverTrace run_baseline(const Problem& p, const SolverConfig& cfg) {
  if (cfg.solver == SolverKind::saga || cfg.solver == SolverKind::saga_adaptive) {
    SolverConfig c = cfg;
    if (c.solver == SolverKind::saga) c.stepsize.variant = Variant::constant;
    return run_saga_adaptive(p, c);
  }
  return BaselineRun(p, cfg).run();
}

}  // namespace sagabb
