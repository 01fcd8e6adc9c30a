#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sagabb/objective.hpp"

namespace sagabb {

// Curvature information gathered in one iteration, from the displacement
// s = x_k - phi_i and the gradient change y = grad f_i(x_k) - grad f_i(phi_i)
// (summed over the batch in mini-batch mode). Quantities that need s itself
// are absent when the table does not store the points.
struct CurvaturePair {
  std::optional<double> sTs;
  std::optional<double> sTy;
  double yTy = 0.0;
  std::optional<double> s_norm;  // primal norm of s
  double y_norm = 0.0;           // dual norm of y

  CurvaturePair& operator+=(const CurvaturePair& o);
};

// Full-gradient SAGA table: grads[i] = grad f_i(phi_i) and the running mean mu.
class VectorTable {
 public:
  // All phi_i = x0.
  VectorTable(const Problem& p, const Vector& x0, bool store_points);
  // Arbitrary phi_i (used to probe diagnostics from hand-built states).
  VectorTable(const Problem& p, std::vector<Vector> points);

  Index n() const { return static_cast<Index>(grads_.size()); }
  bool stores_points() const { return !points_.empty(); }

  const Vector& mu() const { return mu_; }
  const Vector& gradient(Index i) const { return grads_.at(static_cast<std::size_t>(i)); }
  const Vector& point(Index i) const { return points_.at(static_cast<std::size_t>(i)); }

  // g_new - grads[i] + mu.
  Vector estimator(Index i, const Vector& g_new) const;
  // (1/|B|) sum_j (g_new[j] - grads[B_j]) + mu.
  Vector estimator(std::span<const Index> batch, std::span<const Vector> g_new) const;

  CurvaturePair commit(Index i, const Vector& g_new, const Vector& x);
  // s = sum_j (x - phi_j), y = sum_j (g_new[j] - grads[B_j]); indices must be distinct.
  CurvaturePair commit(std::span<const Index> batch, std::span<const Vector> g_new, const Vector& x);

  Vector recompute_mu() const;
  void resync_mu() { mu_ = recompute_mu(); }

 private:
  void check_index(Index i) const;

  const Problem* problem_;
  std::vector<Vector> grads_;
  std::vector<Vector> points_;
  Vector mu_;
};

// Scalar table for linear predictors: phi[i] = <a_i, phi_i>, so the stored
// gradient is psi'(phi[i]) a_i. Per-sample state is exactly n scalars.
// Requires a pure linear-predictor problem (smooth_l2 == 0).
class ScalarTable {
 public:
  ScalarTable(const Problem& p, const Vector& x0);

  Index n() const { return static_cast<Index>(phi_.size()); }
  std::span<const double> phi() const { return phi_; }
  const Vector& mu() const { return mu_; }

  // (psi'(z_new) - psi'(phi[i])) a_i + mu, with z_new = <a_i, x_k>.
  Vector estimator(Index i, double z_new) const;
  Vector estimator(std::span<const Index> batch, std::span<const double> z_new) const;

  // sTy = dz * dpsi, yTy = dpsi^2 ||a_i||^2, y_norm = |dpsi| ||a_i||_*; sTs and
  // s_norm are not recoverable from scalars and stay absent.
  CurvaturePair commit(Index i, double z_new);
  // Batch pairs are the sum of the per-sample pairs (cross terms between
  // distinct samples need the points, which this table does not keep).
  CurvaturePair commit(std::span<const Index> batch, std::span<const double> z_new);

  Vector recompute_mu() const;
  void resync_mu() { mu_ = recompute_mu(); }

 private:
  void check_index(Index i) const;
  double dpsi(Index i, double z_new) const;

  const Problem* problem_;
  std::vector<double> phi_;
  Vector mu_;
};

}  // namespace sagabb
