#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>

#include "sagabb/error.hpp"

namespace sagabb {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class NormTag { l2_l2, l1_linf };

// Primal norm on iterates, dual norm on gradients.
struct NormPair {
  NormTag tag = NormTag::l2_l2;

  template <typename Derived>
  typename Derived::Scalar primal(const Eigen::MatrixBase<Derived>& x) const {
    return tag == NormTag::l2_l2 ? x.norm() : x.template lpNorm<1>();
  }

  template <typename Derived>
  typename Derived::Scalar dual(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() == 0) return typename Derived::Scalar(0);
    return tag == NormTag::l2_l2 ? v.norm() : v.template lpNorm<Eigen::Infinity>();
  }
};

enum class Dgf { euclidean, entropy };
enum class Domain { full_space, simplex };

inline constexpr double kSimplexTolerance = 1e-9;

class Geometry {
 public:
  Geometry(NormPair norms, Dgf dgf, Domain domain) : norms_(norms), dgf_(dgf), domain_(domain) {
    if (dgf == Dgf::entropy && (domain != Domain::simplex || norms.tag != NormTag::l1_linf)) {
      throw Error(Errc::invalid_argument, "entropy DGF requires the simplex and the l1/linf pair");
    }
    if (dgf == Dgf::euclidean && (domain != Domain::full_space || norms.tag != NormTag::l2_l2)) {
      throw Error(Errc::invalid_argument, "Euclidean DGF requires full space and the l2/l2 pair");
    }
  }

  static Geometry euclidean() { return {NormPair{NormTag::l2_l2}, Dgf::euclidean, Domain::full_space}; }
  static Geometry entropy_simplex() { return {NormPair{NormTag::l1_linf}, Dgf::entropy, Domain::simplex}; }

  const NormPair& norms() const { return norms_; }
  Dgf dgf() const { return dgf_; }
  Domain domain() const { return domain_; }
  bool is_euclidean() const { return dgf_ == Dgf::euclidean; }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, double tol = kSimplexTolerance) const {
    if (!x.allFinite()) return false;
    if (domain_ == Domain::full_space) return true;
    return (x.array() >= 0).all() && std::abs(static_cast<double>(x.sum()) - 1.0) <= tol;
  }

  template <typename Derived>
  void require_domain(const Eigen::MatrixBase<Derived>& x, const char* what) const {
    if (!contains(x)) throw Error(Errc::domain, std::string(what) + " is outside the geometry's domain");
  }

  // Center of the domain: the origin, or the uniform point of the simplex.
  Vec<double> center(Eigen::Index dim) const {
    if (domain_ == Domain::simplex) return Vec<double>::Constant(dim, 1.0 / static_cast<double>(dim));
    return Vec<double>::Zero(dim);
  }

  bool operator==(const Geometry& o) const {
    return norms_.tag == o.norms_.tag && dgf_ == o.dgf_ && domain_ == o.domain_;
  }

 private:
  NormPair norms_;
  Dgf dgf_;
  Domain domain_;
};

enum class CompositeKind { zero, l2_squared, l1 };

// h(x): 0, (lambda/2)||x||_2^2, or lambda*||x||_1.
struct CompositeTerm {
  CompositeKind kind = CompositeKind::zero;
  double lambda = 0.0;

  static CompositeTerm zero() { return {}; }
  static CompositeTerm l2_squared(double lambda) { return make(CompositeKind::l2_squared, lambda); }
  static CompositeTerm l1(double lambda) { return make(CompositeKind::l1, lambda); }

  template <typename Derived>
  typename Derived::Scalar value(const Eigen::MatrixBase<Derived>& x) const {
    using Scalar = typename Derived::Scalar;
    switch (kind) {
      case CompositeKind::zero: return Scalar(0);
      case CompositeKind::l2_squared: return Scalar(0.5 * lambda) * x.squaredNorm();
      case CompositeKind::l1: return Scalar(lambda) * x.template lpNorm<1>();
    }
    return Scalar(0);
  }

 private:
  static CompositeTerm make(CompositeKind k, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(Errc::invalid_argument, "composite weight must be a finite nonnegative number");
    }
    return {k, lambda};
  }
};

// V_d(x, y) = d(x) - d(y) - <grad d(y), x - y>.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar bregman(const Geometry& geom, const Eigen::MatrixBase<DerivedX>& x,
                                  const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw Error(Errc::dimension_mismatch, "bregman: length mismatch");
  geom.require_domain(x, "bregman: x");
  geom.require_domain(y, "bregman: y");
  if (geom.dgf() == Dgf::euclidean) return Scalar(0.5) * (x - y).squaredNorm();
  Scalar s(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) == Scalar(0)) continue;
    if (y(i) == Scalar(0)) {
      throw Error(Errc::infinite_divergence, "bregman: entropy divergence is infinite (y_i = 0 < x_i)");
    }
    s += x(i) * std::log(x(i) / y(i));
  }
  return s;
}

template <typename Derived>
typename Derived::Scalar dual_norm_sq(const Geometry& geom, const Eigen::MatrixBase<Derived>& v) {
  auto d = geom.norms().dual(v);
  return d * d;
}

// argmin_u { V_d(u, x) + <eta*g, u> + eta*h(u) }.
template <typename DerivedX, typename DerivedG>
Vec<typename DerivedX::Scalar> prox_step(const Geometry& geom, const CompositeTerm& h,
                                         const Eigen::MatrixBase<DerivedX>& x,
                                         typename DerivedX::Scalar eta,
                                         const Eigen::MatrixBase<DerivedG>& g) {
  using Scalar = typename DerivedX::Scalar;
  if (!(eta > Scalar(0))) throw Error(Errc::invalid_argument, "prox_step: step-size must be positive");
  if (x.size() != g.size()) throw Error(Errc::dimension_mismatch, "prox_step: length mismatch");

  if (geom.dgf() == Dgf::euclidean) {
    Vec<Scalar> u = x - eta * g;
    switch (h.kind) {
      case CompositeKind::zero: break;
      case CompositeKind::l2_squared: u /= (Scalar(1) + eta * Scalar(h.lambda)); break;
      case CompositeKind::l1: {
        const Scalar t = eta * Scalar(h.lambda);
        for (Eigen::Index i = 0; i < u.size(); ++i) {
          const Scalar a = std::abs(u(i)) - t;
          u(i) = a > Scalar(0) ? std::copysign(a, u(i)) : Scalar(0);
        }
        break;
      }
    }
    return u;
  }

  if (h.kind != CompositeKind::zero) {
    throw Error(Errc::unsupported, "prox_step: entropy geometry supports only h = 0");
  }
  geom.require_domain(x, "prox_step: x");
  // Multiplicative weights, shifted by min(g) so the exponent never overflows.
  const Scalar gmin = g.minCoeff();
  // A constant gradient is invariant on the simplex.
  if (g.maxCoeff() == gmin) return x;
  Vec<Scalar> u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) u(i) = x(i) * std::exp(-eta * (g(i) - gmin));
  const Scalar total = u.sum();
  if (!(total > Scalar(0)) || !std::isfinite(static_cast<double>(total))) {
    throw Error(Errc::domain, "prox_step: entropy update left the simplex");
  }
  u /= total;
  return u;
}

}  // namespace sagabb
