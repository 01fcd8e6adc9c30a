#include "sagabb/grad_memory.hpp"

#include <cmath>
#include <string>

namespace sagabb {

namespace {

void add_opt(std::optional<double>& a, const std::optional<double>& b) {
  if (a && b) {
    *a += *b;
  } else {
    a.reset();
  }
}

}  // namespace

CurvaturePair& CurvaturePair::operator+=(const CurvaturePair& o) {
  add_opt(sTs, o.sTs);
  add_opt(sTy, o.sTy);
  add_opt(s_norm, o.s_norm);
  yTy += o.yTy;
  y_norm += o.y_norm;
  return *this;
}

VectorTable::VectorTable(const Problem& p, const Vector& x0, bool store_points) : problem_(&p) {
  const auto n = static_cast<std::size_t>(p.n());
  grads_.reserve(n);
  for (Index i = 0; i < p.n(); ++i) grads_.push_back(grad_component(p, i, x0));
  if (store_points) points_.assign(n, x0);
  mu_ = recompute_mu();
}

VectorTable::VectorTable(const Problem& p, std::vector<Vector> points)
    : problem_(&p), points_(std::move(points)) {
  if (static_cast<Index>(points_.size()) != p.n()) {
    throw Error(Errc::invalid_argument, "VectorTable: need one point per sample");
  }
  grads_.reserve(points_.size());
  for (Index i = 0; i < p.n(); ++i) grads_.push_back(grad_component(p, i, points_[i]));
  mu_ = recompute_mu();
}

void VectorTable::check_index(Index i) const {
  if (i < 0 || i >= n()) throw Error(Errc::out_of_range, "table index " + std::to_string(i) + " out of range");
}

Vector VectorTable::estimator(Index i, const Vector& g_new) const {
  check_index(i);
  return g_new - grads_[i] + mu_;
}

Vector VectorTable::estimator(std::span<const Index> batch, std::span<const Vector> g_new) const {
  Vector acc = Vector::Zero(mu_.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    check_index(batch[j]);
    acc += g_new[j] - grads_[batch[j]];
  }
  return acc / static_cast<double>(batch.size()) + mu_;
}

CurvaturePair VectorTable::commit(Index i, const Vector& g_new, const Vector& x) {
  const Index b[1] = {i};
  return commit(std::span<const Index>(b), std::span<const Vector>(&g_new, 1), x);
}

CurvaturePair VectorTable::commit(std::span<const Index> batch, std::span<const Vector> g_new,
                                  const Vector& x) {
  const double inv_n = 1.0 / static_cast<double>(n());
  Vector y = Vector::Zero(mu_.size());
  Vector s;
  if (stores_points()) s = Vector::Zero(mu_.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Index i = batch[j];
    check_index(i);
    Vector dy = g_new[j] - grads_[i];
    mu_.noalias() += inv_n * dy;
    y += dy;
    grads_[i] = g_new[j];
    if (stores_points()) {
      s += x - points_[i];
      points_[i] = x;
    }
  }
  const auto& norms = problem_->geometry().norms();
  CurvaturePair pair;
  pair.yTy = y.squaredNorm();
  pair.y_norm = norms.dual(y);
  if (stores_points()) {
    pair.sTs = s.squaredNorm();
    pair.sTy = s.dot(y);
    pair.s_norm = norms.primal(s);
  }
  return pair;
}

Vector VectorTable::recompute_mu() const {
  Vector m = Vector::Zero(problem_->dim());
  for (const auto& g : grads_) m += g;
  return m / static_cast<double>(grads_.size());
}

ScalarTable::ScalarTable(const Problem& p, const Vector& x0) : problem_(&p) {
  if (!p.is_pure_linear_predictor()) {
    throw Error(Errc::unsupported,
                "ScalarTable: smooth l2 term present; move it into the prox first (move_l2_to_prox)");
  }
  phi_.reserve(static_cast<std::size_t>(p.n()));
  for (Index i = 0; i < p.n(); ++i) phi_.push_back(dot(p.data().row(i), x0));
  mu_ = recompute_mu();
}

void ScalarTable::check_index(Index i) const {
  if (i < 0 || i >= n()) throw Error(Errc::out_of_range, "table index " + std::to_string(i) + " out of range");
}

double ScalarTable::dpsi(Index i, double z_new) const {
  const auto& loss = problem_->loss();
  const double b = problem_->data().label(i);
  return psi_derivative(loss, z_new, b) - psi_derivative(loss, phi_[i], b);
}

Vector ScalarTable::estimator(Index i, double z_new) const {
  check_index(i);
  Vector g = mu_;
  add_scaled(problem_->data().row(i), dpsi(i, z_new), g);
  return g;
}

Vector ScalarTable::estimator(std::span<const Index> batch, std::span<const double> z_new) const {
  Vector acc = Vector::Zero(mu_.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    check_index(batch[j]);
    add_scaled(problem_->data().row(batch[j]), dpsi(batch[j], z_new[j]), acc);
  }
  return acc / static_cast<double>(batch.size()) + mu_;
}

CurvaturePair ScalarTable::commit(Index i, double z_new) {
  check_index(i);
  const auto& a = problem_->data().row(i);
  const double d = dpsi(i, z_new);
  const double dz = z_new - phi_[i];
  add_scaled(a, d / static_cast<double>(n()), mu_);
  phi_[i] = z_new;

  CurvaturePair pair;
  pair.sTy = dz * d;
  pair.yTy = d * d * problem_->data().squared_norm(i);
  double a_dual = 0.0;
  if (problem_->geometry().norms().tag == NormTag::l2_l2) {
    a_dual = std::sqrt(problem_->data().squared_norm(i));
  } else {
    for (double v : a.values) a_dual = std::max(a_dual, std::abs(v));
  }
  pair.y_norm = std::abs(d) * a_dual;
  return pair;
}

CurvaturePair ScalarTable::commit(std::span<const Index> batch, std::span<const double> z_new) {
  CurvaturePair total;
  total.sTy = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) total += commit(batch[j], z_new[j]);
  return total;
}

Vector ScalarTable::recompute_mu() const {
  Vector m = Vector::Zero(problem_->dim());
  const auto& loss = problem_->loss();
  for (Index i = 0; i < n(); ++i) {
    add_scaled(problem_->data().row(i), psi_derivative(loss, phi_[i], problem_->data().label(i)), m);
  }
  return m / static_cast<double>(n());
}

}  // namespace sagabb
