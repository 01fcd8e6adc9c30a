#pragma once

#include <chrono>

#include "sagabb/solvers.hpp"

namespace sagabb::detail {

// Snapshots F(x), ||grad f(x)||_* and eta each time the gradient-evaluation
// count crosses a multiple of n. Snapshots are not counted as oracle calls.
class TraceRecorder {
 public:
  TraceRecorder(const Problem& p, int epochs);

  // Records every pass boundary crossed by `evals`. Returns false once the
  // run is finished (epoch budget reached or divergence detected).
  bool update(long long evals, const Vector& x, double eta);

  bool finished() const { return diverged_ || next_pass_ > epochs_; }
  bool diverged() const { return diverged_; }

  SolverTrace finish(const Vector& x, std::uint64_t seed, long long iterations);

 private:
  void snapshot(long long evals, const Vector& x, double eta);

  const Problem* problem_;
  int epochs_;
  int next_pass_ = 0;
  bool diverged_ = false;
  double initial_ = 0.0;
  std::vector<TraceRecord> records_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sagabb::detail
