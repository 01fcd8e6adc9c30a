#include "sagabb/objective.hpp"

#include <string>

namespace sagabb {

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::logistic: return "logistic";
    case LossKind::huber: return "huber";
    case LossKind::ridge: return "ridge";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view s) {
  if (s == "logistic") return LossKind::logistic;
  if (s == "huber") return LossKind::huber;
  if (s == "ridge") return LossKind::ridge;
  throw Error(Errc::invalid_argument, "unknown loss '" + std::string(s) + "'");
}

Problem::Problem(std::shared_ptr<const SparseDataset> data, Loss loss, double smooth_l2,
                 CompositeTerm composite, Geometry geometry)
    : data_(std::move(data)),
      loss_(loss),
      smooth_l2_(smooth_l2),
      composite_(composite),
      geometry_(geometry) {
  if (!data_) throw Error(Errc::invalid_argument, "problem: no dataset");
  if (!(smooth_l2_ >= 0.0) || !std::isfinite(smooth_l2_)) {
    throw Error(Errc::invalid_argument, "problem: smooth_l2 must be finite and nonnegative");
  }
  if (smooth_l2_ > 0.0 && composite_.kind == CompositeKind::l2_squared) {
    throw Error(Errc::invalid_argument, "problem: the l2 term is either smooth or composite, not both");
  }
  if (loss_.is_classification() && !data_->has_binary_labels()) {
    throw Error(Errc::invalid_argument, "problem: classification losses need labels in {-1,+1}");
  }
}

Problem move_l2_to_prox(const Problem& p) {
  if (p.smooth_l2() == 0.0) return p;
  if (p.composite().kind != CompositeKind::zero) {
    throw Error(Errc::unsupported, "move_l2_to_prox: composite term already present");
  }
  return Problem(p.data_ptr(), p.loss(), 0.0, CompositeTerm::l2_squared(p.smooth_l2()), p.geometry());
}

double margin(const Problem& p, Index i, const Vector& x) {
  if (i < 0 || i >= p.n()) throw Error(Errc::out_of_range, "sample index out of range");
  return dot(p.data().row(i), x);
}

double component_value(const Problem& p, Index i, const Vector& x) {
  const double z = margin(p, i, x);
  return psi_value(p.loss(), z, p.data().label(i)) + 0.5 * p.smooth_l2() * x.squaredNorm();
}

void add_grad_component(const Problem& p, Index i, const Vector& x, double scale, Vector& out) {
  const double z = margin(p, i, x);
  add_scaled(p.data().row(i), scale * psi_derivative(p.loss(), z, p.data().label(i)), out);
  if (p.smooth_l2() != 0.0) out.noalias() += (scale * p.smooth_l2()) * x;
}

Vector grad_component(const Problem& p, Index i, const Vector& x) {
  if (x.size() != p.dim()) throw Error(Errc::dimension_mismatch, "grad_component: length mismatch");
  Vector g = Vector::Zero(p.dim());
  add_grad_component(p, i, x, 1.0, g);
  return g;
}

double smooth_value(const Problem& p, const Vector& x) {
  double s = 0.0;
  for (Index i = 0; i < p.n(); ++i) s += psi_value(p.loss(), dot(p.data().row(i), x), p.data().label(i));
  return s / static_cast<double>(p.n()) + 0.5 * p.smooth_l2() * x.squaredNorm();
}

Vector full_gradient(const Problem& p, const Vector& x) {
  if (x.size() != p.dim()) throw Error(Errc::dimension_mismatch, "full_gradient: length mismatch");
  const double inv_n = 1.0 / static_cast<double>(p.n());
  Vector g = Vector::Zero(p.dim());
  for (Index i = 0; i < p.n(); ++i) {
    const auto& a = p.data().row(i);
    add_scaled(a, inv_n * psi_derivative(p.loss(), dot(a, x), p.data().label(i)), g);
  }
  if (p.smooth_l2() != 0.0) g.noalias() += p.smooth_l2() * x;
  return g;
}

double objective_value(const Problem& p, const Vector& x) {
  return smooth_value(p, x) + p.composite().value(x);
}

std::optional<TheoryConstants> estimate_constants(const Problem& p) {
  if (!p.geometry().is_euclidean()) return std::nullopt;
  TheoryConstants c;
  c.L = p.loss().curvature_bound() * p.data().max_squared_norm() + p.smooth_l2();
  c.mu = p.smooth_l2();
  return c;
}

double l1_smoothness_bound(const Problem& p) {
  return p.loss().curvature_bound() * p.data().max_abs_entry_squared() + p.smooth_l2();
}

}  // namespace sagabb
