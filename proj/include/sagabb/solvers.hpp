#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "sagabb/grad_memory.hpp"
#include "sagabb/stepsize.hpp"

namespace sagabb {

enum class SolverKind { saga_adaptive, saga, svrg, svrg_bb, svrg_loopless, sarah };
enum class MemoryMode { vector_table, scalar_table };
enum class RunStatus { ok, diverged };

// CLI names: saga-bb, saga, svrg, svrg-bb, svrg-loopless, sarah.
std::string_view to_string(SolverKind s);
SolverKind parse_solver(std::string_view s);
std::string_view to_string(MemoryMode m);
MemoryMode parse_memory_mode(std::string_view s);
std::string_view to_string(RunStatus s);

struct SolverConfig {
  SolverKind solver = SolverKind::saga_adaptive;
  // m == 0 selects n / batch; alpha <= 0 selects default_alpha(variant, m).
  StepSizeConfig stepsize{Variant::stable_bb2, 0.0, 0, 1.0, std::nullopt};
  Index batch = 1;
  int epochs = 120;
  std::uint64_t seed = 0;
  MemoryMode memory = MemoryMode::vector_table;
  std::optional<Index> inner_loop;   // SVRG/SARAH; default n / batch
  std::optional<double> loopless_p;  // default batch / n
  std::optional<Vector> x0;          // default: center of the geometry's domain
};

// Resolves the auto fields (m, alpha, inner loop, restart probability) and
// checks the config against the problem. Throws Errc::invalid_argument.
SolverConfig resolve(const Problem& p, SolverConfig cfg);

struct TraceRecord {
  int pass = 0;                  // effective data passes completed
  long long grad_evals = 0;      // component gradient evaluations so far
  double objective = 0.0;        // F(x)
  double grad_norm = 0.0;        // ||grad f(x)||_*
  double eta = 0.0;
  double wall_ms = 0.0;
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  Vector x;
  RunStatus status = RunStatus::ok;
  std::uint64_t seed = 0;
  long long iterations = 0;
};

// Deterministic index source: uniform with replacement across iterations,
// without replacement inside a batch.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Index uniform(Index n);
  void sample_batch(Index n, Index batch, std::vector<Index>& out);
  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
};

// Running mean of iterates, kept without storing them.
class AverageIterate {
 public:
  void add(const Vector& x);
  const Vector& mean() const { return mean_; }
  long long count() const { return count_; }

 private:
  Vector mean_;
  long long count_ = 0;
};

// State of one SAGA run with an adaptive (or constant) step-size, advanced
// one iteration at a time: update eta, draw a batch, form the estimator,
// commit the table, take the prox step.
class SagaSolver {
 public:
  SagaSolver(const Problem& p, const SolverConfig& cfg);
  // Start from an explicit table state phi_i = points[i] (vector table only).
  SagaSolver(const Problem& p, const SolverConfig& cfg, Vector x, std::vector<Vector> points);

  void step();

  const Vector& x() const { return x_; }
  double eta() const { return ctl_.eta(); }
  long long iteration() const { return k_; }
  long long grad_evals() const { return evals_; }
  const std::vector<Index>& last_batch() const { return batch_; }
  const CurvaturePair& last_pair() const { return pair_; }
  const Vector& last_estimator() const { return est_; }
  const StepSizeController& stepsize() const { return ctl_; }
  const SolverConfig& config() const { return cfg_; }

  const VectorTable* vector_table() const { return std::get_if<VectorTable>(&table_); }
  const ScalarTable* scalar_table() const { return std::get_if<ScalarTable>(&table_); }

 private:
  const Problem* problem_;
  SolverConfig cfg_;
  Rng rng_;
  StepSizeController ctl_;
  Vector x_;
  std::variant<VectorTable, ScalarTable> table_;
  long long k_ = 0;
  long long evals_ = 0;
  std::vector<Index> batch_;
  std::vector<Vector> gnew_;
  std::vector<double> znew_;
  CurvaturePair pair_;
  Vector est_;
};

// Called after every iteration of run_saga_adaptive; used by tests and the
// step-size trace to observe the run without copying state.
using IterationObserver = std::function<void(const SagaSolver&)>;

SolverTrace run_saga_adaptive(const Problem& p, const SolverConfig& cfg,
                              const IterationObserver& observer = {});
SolverTrace run_baseline(const Problem& p, const SolverConfig& cfg);
// Dispatches on cfg.solver.
SolverTrace run_solver(const Problem& p, const SolverConfig& cfg);

}  // namespace sagabb
