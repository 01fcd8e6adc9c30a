#include "sagabb/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "json.hpp"
#include "sagabb/csv.hpp"

namespace sagabb::bench {

namespace {

bool is_saga_family(SolverKind s) { return s == SolverKind::saga_adaptive || s == SolverKind::saga; }

std::string cell_name(const CellKey& k) {
  return std::string(to_string(k.solver)) + "/" + k.variant + "/eta0=" + format_double(k.eta0) +
         "/batch=" + std::to_string(k.batch);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double m) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double a : v) s += (a - m) * (a - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// alpha and m as they apply to the solver: empty where the solver has no such knob.
std::string alpha_field(const RunResult& r) {
  return r.key.solver == SolverKind::saga_adaptive ? csv::field(r.config.stepsize.alpha) : std::string();
}

std::string m_field(const RunResult& r) {
  switch (r.key.solver) {
    case SolverKind::saga_adaptive:
    case SolverKind::saga: return std::to_string(r.config.stepsize.m);
    case SolverKind::svrg:
    case SolverKind::svrg_bb:
    case SolverKind::sarah: return std::to_string(*r.config.inner_loop);
    case SolverKind::svrg_loopless: return std::string();
  }
  return std::string();
}

std::string status_of(const RunResult& r) {
  if (!r.error.empty()) return "error";
  return std::string(to_string(r.trace.status));
}

void run_jobs(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

bool operator<(const CellKey& a, const CellKey& b) {
  const auto sa = to_string(a.solver), sb = to_string(b.solver);
  if (sa != sb) return sa < sb;
  if (a.variant != b.variant) return a.variant < b.variant;
  if (a.eta0 != b.eta0) return a.eta0 < b.eta0;
  return a.batch < b.batch;
}

std::shared_ptr<const SparseDataset> load_dataset(const ExperimentSpec& spec) {
  return std::make_shared<SparseDataset>(load_libsvm(spec.dataset, LibsvmOptions{spec.dim, spec.scale}));
}

Problem make_problem(const ExperimentSpec& spec, std::shared_ptr<const SparseDataset> data) {
  const double lambda = spec.lambda.value_or(1.0 / static_cast<double>(data->n()));
  Loss loss = spec.loss == LossKind::huber ? Loss::huber(spec.huber_delta)
              : spec.loss == LossKind::ridge ? Loss::ridge()
                                             : Loss::logistic();
  Problem p(std::move(data), loss, lambda);
  return spec.memory == MemoryMode::scalar_table ? move_l2_to_prox(p) : p;
}

std::vector<CellKey> expand_grid(const ExperimentSpec& spec) {
  std::vector<CellKey> cells;
  for (SolverKind s : spec.solvers) {
    std::vector<std::string> variants;
    if (s == SolverKind::saga_adaptive) {
      for (Variant v : spec.variants) variants.emplace_back(to_string(v));
    } else {
      variants.emplace_back(s == SolverKind::saga ? "constant" : "none");
    }
    for (const auto& v : variants) {
      for (double eta0 : spec.eta0s) {
        for (Index b : spec.batches) cells.push_back(CellKey{s, v, eta0, b});
      }
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

SolverConfig cell_config(const ExperimentSpec& spec, const CellKey& key, std::uint64_t seed) {
  SolverConfig c;
  c.solver = key.solver;
  c.stepsize.variant = key.solver == SolverKind::saga_adaptive ? parse_variant(key.variant) : Variant::constant;
  c.stepsize.alpha = spec.alpha.value_or(0.0);
  c.stepsize.m = spec.update_freq.value_or(0);
  c.stepsize.eta0 = key.eta0;
  c.stepsize.clamp = spec.clamp;
  c.batch = key.batch;
  c.epochs = spec.epochs;
  c.seed = seed;
  c.memory = is_saga_family(key.solver) ? spec.memory : MemoryMode::vector_table;
  return c;
}

void validate_grid(const ExperimentSpec& spec, const SparseDataset& data) {
  if (spec.solvers.empty() || spec.eta0s.empty() || spec.batches.empty() || spec.seeds.empty()) {
    throw Error(Errc::invalid_argument, "empty grid");
  }
  if (std::set<std::uint64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size()) {
    throw Error(Errc::invalid_argument, "seeds must be distinct");
  }
  if (spec.memory == MemoryMode::scalar_table) {
    for (SolverKind s : spec.solvers) {
      if (!is_saga_family(s)) {
        throw Error(Errc::invalid_argument,
                    "scalar memory mode is only available to saga and saga-bb, not " + std::string(to_string(s)));
      }
    }
  }
  auto shared = std::make_shared<SparseDataset>(data);
  const Problem p = make_problem(spec, shared);
  for (const auto& key : expand_grid(spec)) {
    try {
      resolve(p, cell_config(spec, key, spec.seeds.front()));
    } catch (const Error& e) {
      throw Error(Errc::invalid_argument, cell_name(key) + ": " + e.what());
    }
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::shared_ptr<const SparseDataset> data) {
  const Problem p = make_problem(spec, data);
  ExperimentResult out;
  out.n = p.n();
  out.dim = p.dim();
  out.lambda = spec.lambda.value_or(1.0 / static_cast<double>(p.n()));

  const auto cells = expand_grid(spec);
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());
  for (const auto& key : cells) {
    for (auto s : seeds) {
      RunResult r;
      r.key = key;
      r.seed = s;
      out.runs.push_back(std::move(r));
    }
  }
  run_jobs(out.runs.size(), spec.workers, [&](std::size_t i) {
    RunResult& r = out.runs[i];
    try {
      r.config = resolve(p, cell_config(spec, r.key, r.seed));
      r.trace = run_solver(p, r.config);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  // Best-known objective: the lowest value seen anywhere, refined by rerunning
  // the best non-diverged cell for three times the budget.
  double f_best = std::numeric_limits<double>::infinity();
  for (const auto& r : out.runs) {
    for (const auto& rec : r.trace.records) {
      if (std::isfinite(rec.objective)) f_best = std::min(f_best, rec.objective);
    }
  }
  std::map<CellKey, std::vector<const RunResult*>> by_cell;
  for (const auto& r : out.runs) by_cell[r.key].push_back(&r);
  const CellKey* best = nullptr;
  double best_final = std::numeric_limits<double>::infinity();
  for (const auto& [key, runs] : by_cell) {
    std::vector<double> finals;
    bool clean = true;
    for (const auto* r : runs) {
      clean = clean && r->error.empty() && r->trace.status == RunStatus::ok;
      if (clean) finals.push_back(r->trace.records.back().objective);
    }
    if (clean && mean(finals) < best_final) {
      best_final = mean(finals);
      best = &key;
    }
  }
  out.f_best_source = "min over all trace records";
  if (best && spec.rerun_best) {
    SolverConfig c = resolve(p, cell_config(spec, *best, seeds.front()));
    c.epochs = 3 * spec.epochs;
    const auto rerun = run_solver(p, c);
    for (const auto& rec : rerun.records) {
      if (std::isfinite(rec.objective)) f_best = std::min(f_best, rec.objective);
    }
    out.f_best_source = "min over all trace records and a " + std::to_string(c.epochs) + "-pass rerun of " +
                        cell_name(*best) + " seed " + std::to_string(seeds.front());
  }
  out.f_best = f_best;

  for (const auto& [key, runs] : by_cell) {
    SummaryRow s;
    s.key = key;
    s.seeds = static_cast<int>(runs.size());
    std::vector<double> gn, loss;
    for (const auto* r : runs) {
      if (!r->error.empty()) {
        ++s.failed;
        continue;
      }
      s.alpha = r->config.stepsize.alpha;
      if (r->trace.status == RunStatus::diverged) ++s.diverged;
      gn.push_back(r->trace.records.back().grad_norm);
      loss.push_back(r->trace.records.back().objective);
    }
    s.final_grad_norm_mean = mean(gn);
    s.final_grad_norm_std = sample_std(gn, s.final_grad_norm_mean);
    s.final_loss_mean = mean(loss);
    std::vector<double> gaps;
    for (double l : loss) gaps.push_back(l - f_best);
    s.final_loss_gap_mean = mean(gaps);
    out.summary.push_back(s);
  }
  return out;
}

void write_trace_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r) {
  csv::write_row(out, {"dataset", "solver", "variant", "eta0", "batch", "alpha", "lambda", "m", "seed", "pass",
                       "grad_evals", "loss", "loss_gap", "grad_norm", "eta", "status", "wall_ms"});
  for (const auto& run : r.runs) {
    const std::string status = status_of(run);
    for (const auto& rec : run.trace.records) {
      csv::write_row(out, {csv::field(spec.dataset), std::string(to_string(run.key.solver)),
                           csv::field(run.key.variant), csv::field(run.key.eta0),
                           std::to_string(run.key.batch), alpha_field(run), csv::field(r.lambda), m_field(run),
                           std::to_string(run.seed), std::to_string(rec.pass), std::to_string(rec.grad_evals),
                           csv::field(rec.objective), csv::field(rec.objective - r.f_best),
                           csv::field(rec.grad_norm), csv::field(rec.eta), status, csv::field(rec.wall_ms)});
    }
  }
}

void write_summary_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r) {
  csv::write_row(out, {"dataset", "solver", "variant", "eta0", "batch", "alpha", "seeds", "diverged", "failed",
                       "final_grad_norm_mean", "final_grad_norm_std", "final_loss_mean", "final_loss_gap_mean"});
  for (const auto& s : r.summary) {
    csv::write_row(out, {csv::field(spec.dataset), std::string(to_string(s.key.solver)), csv::field(s.key.variant),
                         csv::field(s.key.eta0), std::to_string(s.key.batch),
                         s.key.solver == SolverKind::saga_adaptive ? csv::field(s.alpha) : std::string(),
                         std::to_string(s.seeds), std::to_string(s.diverged), std::to_string(s.failed),
                         csv::field(s.final_grad_norm_mean), csv::field(s.final_grad_norm_std),
                         csv::field(s.final_loss_mean), csv::field(s.final_loss_gap_mean)});
  }
}

void write_meta_json(std::ostream& out, const ExperimentSpec& spec, const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["dataset"] = spec.dataset;
  j["n"] = r.n;
  j["dim"] = r.dim;
  j["loss"] = std::string(to_string(spec.loss));
  if (spec.loss == LossKind::huber) j["huber_delta"] = spec.huber_delta;
  j["lambda"] = r.lambda;
  j["lambda_rule"] = spec.lambda ? "fixed" : "1/n";
  j["m_rule"] = spec.update_freq ? "fixed" : "n/batch";
  if (spec.update_freq) j["m"] = *spec.update_freq;
  j["alpha"] = spec.alpha ? nlohmann::ordered_json(*spec.alpha) : nlohmann::ordered_json("variant default");
  j["epochs"] = spec.epochs;
  j["seeds"] = spec.seeds;
  std::vector<std::string> solvers, variants;
  for (auto s : spec.solvers) solvers.emplace_back(to_string(s));
  for (auto v : spec.variants) variants.emplace_back(to_string(v));
  j["solvers"] = solvers;
  j["variants"] = variants;
  j["eta0_grid"] = spec.eta0s;
  j["batch_grid"] = spec.batches;
  j["memory_mode"] = std::string(to_string(spec.memory));
  if (spec.memory == MemoryMode::scalar_table) j["l2_term"] = "prox";
  if (spec.clamp) j["clamp"] = {spec.clamp->first, spec.clamp->second};
  j["f_best"] = r.f_best;
  j["f_best_source"] = r.f_best_source;
  j["timing_columns"] = {"wall_ms"};
  out << j.dump(2) << "\n";
}

OutputPaths output_paths(const std::string& out) {
  std::string stem = out;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0) stem.resize(stem.size() - 4);
  return {out, stem + ".summary.csv", stem + ".meta.json"};
}

void write_outputs(const ExperimentSpec& spec, const ExperimentResult& r) {
  const auto paths = output_paths(spec.out);
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::io, "cannot write " + path);
    return f;
  };
  {
    auto f = open(paths.trace);
    write_trace_csv(f, spec, r);
  }
  {
    auto f = open(paths.summary);
    write_summary_csv(f, spec, r);
  }
  {
    auto f = open(paths.meta);
    write_meta_json(f, spec, r);
  }
}

std::vector<StepSizeTraceRow> emit_stepsize_trace(const ExperimentSpec& spec,
                                                  std::shared_ptr<const SparseDataset> data) {
  const Problem p = make_problem(spec, data);
  std::vector<Variant> variants(std::begin(kAdaptiveVariants), std::end(kAdaptiveVariants));
  if (spec.variants_explicit) variants = spec.variants;
  const double n = static_cast<double>(p.n());

  std::vector<StepSizeTraceRow> rows;
  for (Variant v : variants) {
    const CellKey key{SolverKind::saga_adaptive, std::string(to_string(v)), spec.eta0s.front(),
                      spec.batches.front()};
    const SolverConfig cfg = resolve(p, cell_config(spec, key, spec.seeds.front()));
    const long m = cfg.stepsize.m;
    rows.push_back({key.variant, 0, 0.0, StepSizeController(cfg.stepsize).eta()});
    run_saga_adaptive(p, cfg, [&](const SagaSolver& s) {
      if (s.iteration() % m == 0) {
        rows.push_back({key.variant, s.iteration(), static_cast<double>(s.grad_evals()) / n, s.eta()});
      }
    });
  }
  return rows;
}

void write_stepsize_csv(std::ostream& out, const std::vector<StepSizeTraceRow>& rows) {
  csv::write_row(out, {"variant", "iteration", "pass", "eta"});
  for (const auto& r : rows) {
    csv::write_row(out, {csv::field(r.variant), std::to_string(r.iteration), csv::field(r.pass), csv::field(r.eta)});
  }
}

std::vector<DiagnosticRow> run_diagnostics(const ExperimentSpec& spec, const DiagnoseOptions& opt,
                                           std::shared_ptr<const SparseDataset> data) {
  const Problem p = make_problem(spec, data);
  std::vector<DiagnosticRow> rows;
  const auto ref = reference_optimum(p);
  rows.push_back({"reference_optimum." + ref.method, ref.certificate, ReferenceOptions{}.tolerance, ref.converged});

  const auto constants = estimate_constants(p);
  if (!constants) throw Error(Errc::unsupported, "diagnose: Euclidean geometry only");
  const Index d = p.dim();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  auto near_opt = [&] {
    Vector v = ref.x;
    for (Index j = 0; j < d; ++j) v(j) += g(rng);
    return v;
  };
  int held = 0;
  for (int t = 0; t < opt.states; ++t) {
    std::vector<Vector> pts;
    pts.reserve(static_cast<std::size_t>(p.n()));
    for (Index i = 0; i < p.n(); ++i) pts.push_back(near_opt());
    const auto c = check_variance_bound(p, pts, near_opt(), ref.x, constants->L);
    held += c.holds ? 1 : 0;
    rows.push_back({"variance_bound." + std::to_string(t), c.lhs, c.rhs, c.holds});
  }

  if (opt.contraction_seeds > 0 && constants->mu > 0.0) {
    const double mu = constants->mu, L = constants->L, n = static_cast<double>(p.n());
    SolverConfig cfg;
    cfg.stepsize.eta0 = 1.0 / (17.0 * L);
    cfg.stepsize.clamp = std::make_pair(1.0 / (18.0 * (mu * n + L)), 1.0 / (17.0 * L));
    std::vector<Vector> pts;
    for (Index i = 0; i < p.n(); ++i) pts.push_back(near_opt());
    const auto c = check_contraction(p, cfg, near_opt(), pts, ref.x, mu, L, opt.contraction_seeds);
    rows.push_back({"contraction", c.mean_ratio, c.factor + 3.0 * c.std_error, c.pass});
  }

  if (p.loss().kind == LossKind::logistic) {
    const auto prox = curvature_proxy(p, ref.x);
    const auto [lo, hi] = std::minmax_element(prox.begin(), prox.end());
    rows.push_back({"curvature_proxy.min", *lo, 0.0, *lo > 0.0});
    rows.push_back({"curvature_proxy.max", *hi, 0.25, *hi <= 0.25});
  }
  return rows;
}

}  // namespace sagabb::bench
