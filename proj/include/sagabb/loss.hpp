#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "sagabb/error.hpp"

namespace sagabb {

enum class LossKind { logistic, huber, ridge };

// Scalar loss psi(z, b) of a linear predictor z = <a, x>.
//   logistic: log(1 + exp(-b z))
//   huber:    huberized hinge on the margin m = 1 - b z with width delta
//   ridge:    (z - b)^2 / 2
struct Loss {
  LossKind kind = LossKind::logistic;
  double delta = 1.0;

  static Loss logistic() { return {LossKind::logistic, 1.0}; }
  static Loss ridge() { return {LossKind::ridge, 1.0}; }
  static Loss huber(double delta = 1.0) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
      throw Error(Errc::invalid_argument, "huber width must be positive");
    }
    return {LossKind::huber, delta};
  }

  bool is_classification() const { return kind != LossKind::ridge; }

  // Upper bound on psi'' over z (and b in {-1,+1}).
  double curvature_bound() const {
    switch (kind) {
      case LossKind::logistic: return 0.25;
      case LossKind::huber: return 1.0 / delta;
      case LossKind::ridge: return 1.0;
    }
    return 1.0;
  }

  bool operator==(const Loss&) const = default;
};

std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view s);

// log(1 + exp(t)) without overflow or cancellation.
template <typename Scalar>
Scalar softplus(Scalar t) {
  using std::exp;
  using std::log1p;
  return t > Scalar(0) ? t + log1p(exp(-t)) : log1p(exp(t));
}

template <typename Scalar>
Scalar psi_value(const Loss& loss, Scalar z, Scalar b) {
  switch (loss.kind) {
    case LossKind::logistic: return softplus(-b * z);
    case LossKind::huber: {
      const Scalar m = Scalar(1) - b * z;
      const Scalar delta(loss.delta);
      if (m <= Scalar(0)) return Scalar(0);
      if (m <= delta) return m * m / (Scalar(2) * delta);
      return m - delta / Scalar(2);
    }
    case LossKind::ridge: {
      const Scalar r = z - b;
      return Scalar(0.5) * r * r;
    }
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar psi_derivative(const Loss& loss, Scalar z, Scalar b) {
  using std::exp;
  switch (loss.kind) {
    case LossKind::logistic: {
      // -b / (1 + exp(b z)), branch chosen so exp never overflows.
      const Scalar t = b * z;
      if (t > Scalar(0)) {
        const Scalar e = exp(-t);
        return -b * e / (Scalar(1) + e);
      }
      return -b / (Scalar(1) + exp(t));
    }
    case LossKind::huber: {
      const Scalar m = Scalar(1) - b * z;
      const Scalar delta(loss.delta);
      if (m <= Scalar(0)) return Scalar(0);
      if (m <= delta) return -b * m / delta;
      return -b;
    }
    case LossKind::ridge: return z - b;
  }
  return Scalar(0);
}

// psi''(z); for huber this is the one-sided value at the kinks.
template <typename Scalar>
Scalar psi_second_derivative(const Loss& loss, Scalar z, Scalar b) {
  using std::exp;
  switch (loss.kind) {
    case LossKind::logistic: {
      const Scalar t = -std::abs(b * z);
      const Scalar e = exp(t);
      return e / ((Scalar(1) + e) * (Scalar(1) + e));
    }
    case LossKind::huber: {
      const Scalar m = Scalar(1) - b * z;
      return (m > Scalar(0) && m <= Scalar(loss.delta)) ? b * b / Scalar(loss.delta) : Scalar(0);
    }
    case LossKind::ridge: return Scalar(1);
  }
  return Scalar(0);
}

}  // namespace sagabb
