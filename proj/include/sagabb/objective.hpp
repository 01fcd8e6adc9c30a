#pragma once

#include <Eigen/Core>

#include <memory>
#include <optional>

#include "sagabb/dataset.hpp"
#include "sagabb/geometry.hpp"
#include "sagabb/loss.hpp"

namespace sagabb {

using Vector = Eigen::VectorXd;

// F(x) = (1/n) sum_i f_i(x) + h(x),  f_i(x) = psi(<a_i, x>, b_i) + (smooth_l2/2)||x||^2.
class Problem {
 public:
  Problem(std::shared_ptr<const SparseDataset> data, Loss loss, double smooth_l2 = 0.0,
          CompositeTerm composite = CompositeTerm::zero(),
          Geometry geometry = Geometry::euclidean());

  const SparseDataset& data() const { return *data_; }
  const std::shared_ptr<const SparseDataset>& data_ptr() const { return data_; }
  const Loss& loss() const { return loss_; }
  double smooth_l2() const { return smooth_l2_; }
  const CompositeTerm& composite() const { return composite_; }
  const Geometry& geometry() const { return geometry_; }

  Index n() const { return data_->n(); }
  Index dim() const { return data_->dim(); }

  // True when every f_i is a pure function of <a_i, x> (no smooth_l2 part).
  bool is_pure_linear_predictor() const { return smooth_l2_ == 0.0; }

 private:
  std::shared_ptr<const SparseDataset> data_;
  Loss loss_;
  double smooth_l2_;
  CompositeTerm composite_;
  Geometry geometry_;
};

// Moves the smooth (smooth_l2/2)||x||^2 part into h = L2Squared(smooth_l2).
// Same minimizer; f_i becomes a pure linear-predictor loss.
Problem move_l2_to_prox(const Problem& p);

struct TheoryConstants {
  double L = 0.0;   // smoothness w.r.t. the primal norm
  double mu = 0.0;  // generalized strong convexity modulus
};

double margin(const Problem& p, Index i, const Vector& x);  // <a_i, x>

double component_value(const Problem& p, Index i, const Vector& x);  // f_i(x)
Vector grad_component(const Problem& p, Index i, const Vector& x);
// out += scale * grad f_i(x)
void add_grad_component(const Problem& p, Index i, const Vector& x, double scale, Vector& out);

double smooth_value(const Problem& p, const Vector& x);  // f(x)
Vector full_gradient(const Problem& p, const Vector& x);
double objective_value(const Problem& p, const Vector& x);  // F(x) = f(x) + h(x)

// Per-component bounds L = c_loss * max_i ||a_i||^2 + smooth_l2, mu = smooth_l2.
// Only defined for the Euclidean geometry.
std::optional<TheoryConstants> estimate_constants(const Problem& p);

// L1/Linf bound c_loss * max_i ||a_i||_inf^2 + smooth_l2 (closed form; valid
// because |<a, dx>| <= ||a||_inf ||dx||_1).
double l1_smoothness_bound(const Problem& p);

}  // namespace sagabb
