#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sagabb/solvers.hpp"

namespace sagabb {

// High-accuracy minimizer of F, computed with a deterministic full-batch
// method chosen from the problem structure:
//   newton        Euclidean, twice-differentiable loss, h in {zero, l2}
//   fista         Euclidean otherwise (l1 prox or huber loss)
//   mirror        entropy geometry on the simplex
// `certificate` bounds how far x is from optimal in the method's own terms:
// the gradient norm (newton), the prox-gradient mapping norm (fista) or the
// Frank-Wolfe gap, which upper-bounds F(x) - F* (mirror).
struct ReferenceOptimum {
  Vector x;
  double value = 0.0;
  double certificate = 0.0;
  long iterations = 0;
  bool converged = false;
  std::string method;
};

struct ReferenceOptions {
  double tolerance = 1e-12;
  long max_iterations = 100000;
};

ReferenceOptimum reference_optimum(const Problem& p, const ReferenceOptions& opt = {});

// Smoothness constant of the components in the geometry's norm pair,
// max over sampled pairs of ||grad f_i(x) - grad f_i(y)||_* / ||x - y||, times
// 1.1. On the simplex every pair of vertices is included along with random
// interior pairs.
double estimate_smoothness_sampled(const Problem& p, int samples, std::uint64_t seed);

struct VarianceCheck {
  double lhs = 0.0;  // E_i ||grad f(x) - estimator_i||_*^2, by enumeration
  double rhs = 0.0;
  bool holds = false;
};

// points[i] is the table point phi_i.
VarianceCheck check_variance_bound(const Problem& p, const std::vector<Vector>& points, const Vector& x,
                                   const Vector& x_star, double L);

struct LyapunovSnapshot {
  double T = 0.0;
  double term_table = 0.0;
  double term_gap = 0.0;
  double term_dist = 0.0;
  double omega = 0.0;
  double c = 0.0;
};

// Uses the subgradient of h at x_star that makes grad F(x_star) vanish, i.e.
// grad F_i(x_star) = grad f_i(x_star) - grad f(x_star).
LyapunovSnapshot lyapunov(const Problem& p, const std::vector<Vector>& points, const Vector& x,
                          const Vector& x_star, double eta);

inline double contraction_factor(double mu, double L, Index n) {
  return 1.0 - mu / (18.0 * (mu * static_cast<double>(n) + L));
}

struct ContractionCheck {
  double T0 = 0.0;
  double mean_ratio = 0.0;  // mean over seeds of T_{k+1} / T_k
  double std_error = 0.0;
  double factor = 0.0;
  bool vacuous = false;  // T_k == 0
  bool pass = false;
};

// One SAGA-BB step from (x, points) per seed. cfg.seed is ignored; seeds run
// 0..seeds-1. Throws Errc::domain when mu == 0.
ContractionCheck check_contraction(const Problem& p, const SolverConfig& cfg, const Vector& x,
                                   const std::vector<Vector>& points, const Vector& x_star, double mu, double L,
                                   int seeds);

struct SublinearRow {
  long long K = 0;       // iterations
  double mean_gap = 0.0; // mean over seeds of F(xbar_K) - F*
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// (2/K) [ (n/4)(F0 - F*) + F0/2 + gamma L V_d(x*, x0) ]
double sublinear_bound(long long K, Index n, double F0, double F_star, double gamma, double L, double V0);

// Runs SAGA-BB with eta clamped to [1/(gamma L), 1/(9 L)] and checks the
// averaged-iterate bound at every K in `checkpoints` (iterations).
std::vector<SublinearRow> check_sublinear(const Problem& p, const SolverConfig& cfg, const Vector& x_star,
                                          double L, double gamma, const std::vector<long long>& checkpoints,
                                          int seeds);

// p_i(x) = sigma(b_i a_i^T x)(1 - sigma(b_i a_i^T x)); logistic loss only.
std::vector<double> curvature_proxy(const Problem& p, const Vector& x);

struct DiagnosticRow {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows);

}  // namespace sagabb
