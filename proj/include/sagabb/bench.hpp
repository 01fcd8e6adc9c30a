#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sagabb/diagnostics.hpp"
#include "sagabb/solvers.hpp"

namespace sagabb::bench {

inline constexpr int kSchemaVersion = 1;

inline const std::vector<double> kDefaultEta0Grid{1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
inline const std::vector<Index> kDefaultBatchGrid{1, 8, 16, 64};

struct ExperimentSpec {
  std::string dataset;
  std::optional<Index> dim;  // dimension override for the loader
  bool scale = false;        // max-abs column scaling on load
  LossKind loss = LossKind::logistic;
  double huber_delta = 1.0;
  std::optional<double> lambda;  // nullopt: 1/n
  std::vector<SolverKind> solvers{SolverKind::saga_adaptive};
  std::vector<Variant> variants{Variant::stable_bb2};
  bool variants_explicit = false;
  std::vector<double> eta0s = kDefaultEta0Grid;
  std::vector<Index> batches = kDefaultBatchGrid;
  std::optional<double> alpha;
  int epochs = 120;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::optional<long> update_freq;  // nullopt: n / batch
  MemoryMode memory = MemoryMode::vector_table;
  std::optional<std::pair<double, double>> clamp;
  int workers = 1;
  std::string out;
  bool rerun_best = true;  // f_best from a 3x-epoch rerun of the best cell
};

// One grid cell; `variant` is "constant" for plain SAGA and "none" for the
// baselines, which have no step-size rule of their own to vary.
struct CellKey {
  SolverKind solver = SolverKind::saga_adaptive;
  std::string variant;
  double eta0 = 1.0;
  Index batch = 1;

  bool operator==(const CellKey&) const = default;
};

// Sort order of the output: solver name, variant, eta0, batch.
bool operator<(const CellKey& a, const CellKey& b);

struct RunResult {
  CellKey key;
  std::uint64_t seed = 0;
  SolverConfig config;  // resolved
  SolverTrace trace;
  std::string error;  // non-empty when the run threw
};

struct SummaryRow {
  CellKey key;
  double alpha = 0.0;
  int seeds = 0;
  int diverged = 0;
  int failed = 0;
  double final_grad_norm_mean = 0.0;
  double final_grad_norm_std = 0.0;
  double final_loss_mean = 0.0;
  double final_loss_gap_mean = 0.0;
};

struct ExperimentResult {
  Index n = 0;
  Index dim = 0;
  double lambda = 0.0;
  double f_best = 0.0;
  std::string f_best_source;
  std::vector<RunResult> runs;  // sorted by (cell, seed)
  std::vector<SummaryRow> summary;
};

// The problem the experiment solves: smooth l2 = lambda, moved into the prox
// for the scalar table.
Problem make_problem(const ExperimentSpec& spec, std::shared_ptr<const SparseDataset> data);

std::shared_ptr<const SparseDataset> load_dataset(const ExperimentSpec& spec);

std::vector<CellKey> expand_grid(const ExperimentSpec& spec);

// Throws Errc::invalid_argument for grids no solver can run (batch > n,
// scalar table with a baseline or a displacement variant, ...).
void validate_grid(const ExperimentSpec& spec, const SparseDataset& data);

SolverConfig cell_config(const ExperimentSpec& spec, const CellKey& key, std::uint64_t seed);

ExperimentResult run_experiment(const ExperimentSpec& spec, std::shared_ptr<const SparseDataset> data);

void write_trace_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r);
void write_summary_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r);
void write_meta_json(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r);

// <out>, <stem>.summary.csv and <stem>.meta.json, where stem drops a trailing ".csv".
struct OutputPaths {
  std::string trace, summary, meta;
};
OutputPaths output_paths(const std::string& out);
void write_outputs(const ExperimentSpec& spec, const ExperimentResult& r);

struct StepSizeTraceRow {
  std::string variant;
  long long iteration = 0;
  double pass = 0.0;
  double eta = 0.0;
};

// One run per variant from the same seed (first eta0, batch and seed of the
// spec); a row at start and after every window update.
std::vector<StepSizeTraceRow> emit_stepsize_trace(const ExperimentSpec& spec,
                                                  std::shared_ptr<const SparseDataset> data);
void write_stepsize_csv(std::ostream& out, const std::vector<StepSizeTraceRow>& rows);

struct DiagnoseOptions {
  int states = 200;
  int contraction_seeds = 0;  // 0 skips the contraction check
  std::uint64_t seed = 0;
};

std::vector<DiagnosticRow> run_diagnostics(const ExperimentSpec& spec, const DiagnoseOptions& opt,
                                           std::shared_ptr<const SparseDataset> data);

enum class Command { run, stepsize_trace, diagnose };

struct CliResult {
  Command command = Command::run;
  ExperimentSpec spec;
  DiagnoseOptions diagnose;
  bool exit_now = false;  // --help, or a usage error
  int exit_code = 0;
  std::string message;
};

inline constexpr int kExitUsage = 64;
inline constexpr int kExitDataset = 2;
inline constexpr int kExitGrid = 3;

CliResult cli_parse(const std::vector<std::string>& args);

// Whole CLI: parse, load, validate, run, write. Returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sagabb::bench
