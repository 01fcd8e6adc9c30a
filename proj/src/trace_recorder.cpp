#include "trace_recorder.hpp"

#include <algorithm>
#include <cmath>

namespace sagabb::detail {

namespace {
constexpr double kDivergenceFactor = 1e3;
}

TraceRecorder::TraceRecorder(const Problem& p, int epochs)
    : problem_(&p), epochs_(epochs), start_(std::chrono::steady_clock::now()) {
  records_.reserve(static_cast<std::size_t>(epochs) + 1);
}

bool TraceRecorder::update(long long evals, const Vector& x, double eta) {
  const long long n = problem_->n();
  while (!finished() && evals >= static_cast<long long>(next_pass_) * n) snapshot(evals, x, eta);
  return !finished();
}

void TraceRecorder::snapshot(long long evals, const Vector& x, double eta) {
  TraceRecord r;
  r.pass = next_pass_++;
  r.grad_evals = evals;
  r.eta = eta;
  if (x.allFinite()) {
    r.objective = objective_value(*problem_, x);
    r.grad_norm = problem_->geometry().norms().dual(full_gradient(*problem_, x));
  } else {
    r.objective = r.grad_norm = std::nan("");
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  if (r.pass == 0) initial_ = r.objective;
  const double limit = kDivergenceFactor * std::max(std::abs(initial_), 1e-12);
  if (!std::isfinite(r.objective) || r.objective > limit) diverged_ = true;
  records_.push_back(r);
}

SolverTrace TraceRecorder::finish(const Vector& x, std::uint64_t seed, long long iterations) {
  SolverTrace t;
  t.records = std::move(records_);
  t.x = x;
  t.status = diverged_ ? RunStatus::diverged : RunStatus::ok;
  t.seed = seed;
  t.iterations = iterations;
  return t;
}

}  // namespace sagabb::detail
