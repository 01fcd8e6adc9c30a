#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "sagabb/bench.hpp"
#include "sagabb/csv.hpp"
#include "sagabb/format.hpp"

namespace sagabb::bench {

namespace {

double to_double(const std::string& s, const char* flag) {
  double v;
  if (!parse_double(s, v)) throw CLI::ValidationError(flag, "not a number: " + s);
  return v;
}

// "0,1,2", "0..4" (inclusive) or a single seed.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    std::uint64_t lo, hi;
    if (!parse_int(std::string_view(s).substr(0, dots), lo) || !parse_int(std::string_view(s).substr(dots + 2), hi) ||
        lo > hi) {
      throw CLI::ValidationError("--seeds", "bad range: " + s);
    }
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::string_view rest(s);
  while (true) {
    const auto comma = rest.find(',');
    std::uint64_t v;
    if (!parse_int(rest.substr(0, comma), v)) throw CLI::ValidationError("--seeds", "bad seed list: " + s);
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void check_writable(const std::string& path) {
  const auto paths = output_paths(path);
  for (const auto& p : {paths.trace, paths.summary, paths.meta}) {
    const bool existed = std::filesystem::exists(p);
    std::ofstream f(p, std::ios::app);
    if (!f) throw CLI::ValidationError("--out", "cannot write " + p);
    f.close();
    if (!existed) std::filesystem::remove(p);
  }
}

struct RawFlags {
  std::string dataset;
  Index dim = 0;
  bool scale = false;
  std::string loss = "logistic";
  double huber_delta = 1.0;
  std::string lambda = "1/n";
  std::vector<std::string> solvers, variants, eta0s;
  std::vector<Index> batches;
  double alpha = 0.0;
  int epochs = 120;
  std::string seeds = "0..4";
  long update_freq = 0;
  std::string memory = "vector";
  std::string clamp;
  int workers = 1;
  std::string out;
  bool no_rerun = false;
};

void add_shared(CLI::App* app, RawFlags& f, bool needs_out) {
  app->add_option("--dataset", f.dataset, "LIBSVM file")->required();
  app->add_option("--dim", f.dim, "feature dimension (default: max index in the file)")->check(CLI::PositiveNumber);
  app->add_flag("--scale", f.scale, "scale each column by its max |value|");
  app->add_option("--loss", f.loss, "logistic, ridge or huber")->capture_default_str();
  app->add_option("--huber-delta", f.huber_delta)->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--lambda", f.lambda, "l2 weight: 1/n or a number")->capture_default_str();
  app->add_option("--solver", f.solvers, "saga-bb, saga, svrg, svrg-bb, svrg-loopless, sarah")->delimiter(',');
  app->add_option("--variant", f.variants, "step-size rule for saga-bb")->delimiter(',');
  app->add_option("--eta0", f.eta0s, "initial step sizes")->delimiter(',');
  app->add_option("--batch", f.batches, "batch sizes")->delimiter(',')->check(CLI::PositiveNumber);
  app->add_option("--alpha", f.alpha, "safeguard scale (default per variant)")->check(CLI::PositiveNumber);
  app->add_option("--epochs", f.epochs, "effective gradient passes")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--seeds", f.seeds, "seed list a,b,c or range a..b")->capture_default_str();
  app->add_option("--update-freq", f.update_freq, "step-size window m (default n/batch)")->check(CLI::PositiveNumber);
  app->add_option("--memory-mode", f.memory, "vector or scalar")->capture_default_str();
  app->add_option("--clamp", f.clamp, "lo,hi bounds on the step size");
  app->add_option("--workers", f.workers)->check(CLI::PositiveNumber)->capture_default_str();
  auto* out = app->add_option("--out", f.out, "output CSV");
  if (needs_out) out->required();
  app->add_flag("--no-rerun-best", f.no_rerun, "skip the long rerun that refines f_best");
}

ExperimentSpec to_spec(const RawFlags& f, bool first_only_grid) {
  ExperimentSpec s;
  s.dataset = f.dataset;
  if (f.dim > 0) s.dim = f.dim;
  s.scale = f.scale;
  try {
    s.loss = parse_loss_kind(f.loss);
    s.memory = parse_memory_mode(f.memory);
    if (!f.solvers.empty()) {
      s.solvers.clear();
      for (const auto& n : f.solvers) s.solvers.push_back(parse_solver(n));
    }
    if (!f.variants.empty()) {
      s.variants.clear();
      for (const auto& n : f.variants) s.variants.push_back(parse_variant(n));
      s.variants_explicit = true;
    }
  } catch (const Error& e) {
    throw CLI::ValidationError(e.what());
  }
  s.huber_delta = f.huber_delta;
  if (f.lambda != "1/n") {
    s.lambda = to_double(f.lambda, "--lambda");
    if (!(*s.lambda >= 0.0)) throw CLI::ValidationError("--lambda", "must be >= 0");
  }
  if (!f.eta0s.empty()) {
    s.eta0s.clear();
    for (const auto& e : f.eta0s) {
      const double v = to_double(e, "--eta0");
      if (!(v > 0.0) || !std::isfinite(v)) throw CLI::ValidationError("--eta0", "must be positive: " + e);
      s.eta0s.push_back(v);
    }
  } else if (first_only_grid) {
    s.eta0s = {1.0};
  }
  if (!f.batches.empty()) {
    s.batches = f.batches;
  } else if (first_only_grid) {
    s.batches = {1};
  }
  if (f.alpha > 0.0) s.alpha = f.alpha;
  s.epochs = f.epochs;
  s.seeds = parse_seeds(f.seeds);
  if (f.update_freq > 0) s.update_freq = f.update_freq;
  if (!f.clamp.empty()) {
    const auto comma = f.clamp.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--clamp", "expected lo,hi");
    const double lo = to_double(f.clamp.substr(0, comma), "--clamp");
    const double hi = to_double(f.clamp.substr(comma + 1), "--clamp");
    if (!(lo > 0.0) || !(lo <= hi)) throw CLI::ValidationError("--clamp", "need 0 < lo <= hi");
    s.clamp = std::make_pair(lo, hi);
  }
  s.workers = f.workers;
  s.out = f.out;
  s.rerun_best = !f.no_rerun;
  return s;
}

}  // namespace

CliResult cli_parse(const std::vector<std::string>& args) {
  CliResult r;
  CLI::App app{"SAGA with Barzilai-Borwein step sizes: experiment runner"};
  app.require_subcommand(1);
  RawFlags run_f, trace_f, diag_f;
  auto* run = app.add_subcommand("run", "run a solver grid and write trace, summary and metadata");
  auto* trace = app.add_subcommand("stepsize-trace", "step size over iterations for each adaptive variant");
  auto* diag = app.add_subcommand("diagnose", "reference optimum and theory checks on a dataset");
  add_shared(run, run_f, true);
  add_shared(trace, trace_f, false);
  add_shared(diag, diag_f, false);
  diag->add_option("--states", r.diagnose.states, "random states for the variance bound")
      ->check(CLI::NonNegativeNumber);
  diag->add_option("--contraction-seeds", r.diagnose.contraction_seeds, "0 skips the contraction check")
      ->check(CLI::NonNegativeNumber);
  diag->add_option("--diag-seed", r.diagnose.seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (run->parsed()) {
      r.command = Command::run;
      r.spec = to_spec(run_f, false);
      check_writable(r.spec.out);
    } else if (trace->parsed()) {
      r.command = Command::stepsize_trace;
      r.spec = to_spec(trace_f, true);
    } else {
      r.command = Command::diagnose;
      r.spec = to_spec(diag_f, true);
    }
    if (std::set<std::uint64_t>(r.spec.seeds.begin(), r.spec.seeds.end()).size() != r.spec.seeds.size()) {
      throw CLI::ValidationError("--seeds", "seeds must be distinct");
    }
  } catch (const CLI::CallForHelp&) {
    r.exit_now = true;
    r.exit_code = 0;
    r.message = (app.get_subcommands().empty() ? &app : app.get_subcommands().front())->help();
  } catch (const CLI::ParseError& e) {
    r.exit_now = true;
    r.exit_code = kExitUsage;
    r.message = e.what();
  }
  return r;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const CliResult cli = cli_parse(args);
  if (cli.exit_now) {
    (cli.exit_code == 0 ? out : err) << cli.message << (cli.exit_code == 0 ? "" : "\n");
    return cli.exit_code;
  }
  std::shared_ptr<const SparseDataset> data;
  try {
    data = load_dataset(cli.spec);
  } catch (const std::exception& e) {
    err << "dataset: " << e.what() << "\n";
    return kExitDataset;
  }
  try {
    validate_grid(cli.spec, *data);
  } catch (const std::exception& e) {
    err << "grid: " << e.what() << "\n";
    return kExitGrid;
  }
  try {
    switch (cli.command) {
      case Command::run: {
        const auto result = run_experiment(cli.spec, data);
        write_outputs(cli.spec, result);
        int diverged = 0, failed = 0;
        for (const auto& s : result.summary) {
          diverged += s.diverged;
          failed += s.failed;
        }
        out << result.runs.size() << " runs, " << diverged << " diverged, " << failed << " failed; f_best "
            << format_double(result.f_best) << "\n";
        break;
      }
      case Command::stepsize_trace: {
        const auto rows = emit_stepsize_trace(cli.spec, data);
        if (cli.spec.out.empty()) {
          write_stepsize_csv(out, rows);
        } else {
          std::ofstream f(cli.spec.out, std::ios::binary);
          if (!f) throw Error(Errc::io, "cannot write " + cli.spec.out);
          write_stepsize_csv(f, rows);
        }
        break;
      }
      case Command::diagnose: {
        const auto rows = run_diagnostics(cli.spec, cli.diagnose, data);
        if (cli.spec.out.empty()) {
          write_diagnostics_csv(out, rows);
        } else {
          std::ofstream f(cli.spec.out, std::ios::binary);
          if (!f) throw Error(Errc::io, "cannot write " + cli.spec.out);
          write_diagnostics_csv(f, rows);
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sagabb::bench
