#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "sagabb/objective.hpp"
#include "test_support.hpp"

using namespace sagabb;
using sagabb::testing::random_problem_data;

namespace {

// Central difference of F along coordinate j.
Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST(Loss, SoftplusIsStable) {
  EXPECT_DOUBLE_EQ(softplus(800.0), 800.0);
  EXPECT_GT(softplus(-700.0), 0.0);
  EXPECT_NEAR(softplus(-700.0) / std::exp(-700.0), 1.0, 1e-12);
  EXPECT_EQ(softplus(-800.0), 0.0);  // exp(-800) is below the smallest subnormal
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(psi_derivative(Loss::logistic(), 1e4, -1.0)));
  EXPECT_TRUE(std::isfinite(psi_derivative(Loss::logistic(), -1e4, -1.0)));
}

TEST(Loss, DerivativesMatchFiniteDifferences) {
  for (auto loss : {Loss::logistic(), Loss::huber(1.0), Loss::huber(0.3), Loss::ridge()}) {
    for (double b : {-1.0, 1.0}) {
      for (double z = -4.0; z <= 4.0; z += 0.37) {
        const double h = 1e-6;
        const double fd = (psi_value(loss, z + h, b) - psi_value(loss, z - h, b)) / (2 * h);
        EXPECT_NEAR(psi_derivative(loss, z, b), fd, 1e-6) << to_string(loss.kind) << " z=" << z;
        EXPECT_LE(psi_second_derivative(loss, z, b), loss.curvature_bound() + 1e-15);
      }
    }
  }
}

TEST(Loss, HuberEndpoints) {
  const auto h = Loss::huber(1.0);
  EXPECT_EQ(psi_value(h, 2.0, 1.0), 0.0);     // margin -1
  EXPECT_EQ(psi_value(h, 0.5, 1.0), 0.125);   // m = 0.5: m^2 / 2
  EXPECT_EQ(psi_value(h, -2.0, 1.0), 2.5);    // m = 3: m - 1/2
  EXPECT_THROW(Loss::huber(0.0), Error);
}

TEST(Objective, TwoPointLogisticExample) {
  auto data = std::make_shared<SparseDataset>(parse_libsvm(std::string("1 1:1\n-1 1:1\n")));
  Problem p(data, Loss::logistic());
  Vector x = Vector::Zero(1);
  EXPECT_NEAR(objective_value(p, x), std::log(2.0), 1e-15);
  EXPECT_NEAR(full_gradient(p, x)(0), 0.0, 1e-15);
  EXPECT_NEAR(grad_component(p, 0, x)(0), -0.5, 1e-15);
}

TEST(Objective, RejectsBadProblems) {
  auto reg = std::make_shared<SparseDataset>(parse_libsvm(std::string("0.5 1:1\n2 1:1\n")));
  EXPECT_THROW(Problem(reg, Loss::logistic()), Error);
  EXPECT_NO_THROW(Problem(reg, Loss::ridge()));
  EXPECT_THROW(Problem(reg, Loss::ridge(), -1.0), Error);
  EXPECT_THROW(Problem(reg, Loss::ridge(), 0.1, CompositeTerm::l2_squared(0.1)), Error);
  Problem p(reg, Loss::ridge());
  EXPECT_THROW(grad_component(p, 2, Vector::Zero(1)), Error);
  EXPECT_THROW(full_gradient(p, Vector::Zero(3)), Error);
}

TEST(Objective, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (auto loss : {Loss::logistic(), Loss::huber(1.0), Loss::ridge()}) {
    auto data = random_problem_data(rng, 30, 6, 0.6);
    Problem p(data, loss, 0.05);
    for (int t = 0; t < 5; ++t) {
      Vector x(6);
      for (int j = 0; j < 6; ++j) x(j) = 0.5 * g(rng);
      auto F = [&](const Vector& y) { return objective_value(p, y); };
      EXPECT_LE((full_gradient(p, x) - numeric_gradient(F, x)).lpNorm<Eigen::Infinity>(), 1e-6);
      for (Index i = 0; i < 3; ++i) {
        auto fi = [&](const Vector& y) { return component_value(p, i, y); };
        EXPECT_LE((grad_component(p, i, x) - numeric_gradient(fi, x)).lpNorm<Eigen::Infinity>(), 1e-6);
      }
    }
  }
}

TEST(Objective, FullGradientIsMeanOfComponents) {
  std::mt19937_64 rng(29);
  auto data = random_problem_data(rng, 40, 8, 0.4);
  Problem p(data, Loss::logistic(), 0.1);
  Vector x = Vector::LinSpaced(8, -1.0, 1.0);
  Vector mean = Vector::Zero(8);
  for (Index i = 0; i < p.n(); ++i) mean += grad_component(p, i, x);
  mean /= static_cast<double>(p.n());
  EXPECT_LE((mean - full_gradient(p, x)).norm(), 1e-13);
}

TEST(Objective, CompositeValueIsAdded) {
  std::mt19937_64 rng(31);
  auto data = random_problem_data(rng, 10, 4, 0.8);
  Problem p(data, Loss::logistic(), 0.0, CompositeTerm::l1(0.25));
  Vector x(4);
  x << 1, -2, 0, 0.5;
  EXPECT_NEAR(objective_value(p, x), smooth_value(p, x) + 0.875, 1e-14);
}

TEST(Objective, MoveL2ToProxKeepsObjective) {
  std::mt19937_64 rng(37);
  auto data = random_problem_data(rng, 20, 5, 0.5);
  Problem p(data, Loss::logistic(), 0.3);
  Problem q = move_l2_to_prox(p);
  EXPECT_TRUE(q.is_pure_linear_predictor());
  EXPECT_EQ(q.composite().kind, CompositeKind::l2_squared);
  Vector x = Vector::LinSpaced(5, -2.0, 3.0);
  EXPECT_NEAR(objective_value(p, x), objective_value(q, x), 1e-13);
}

// Smoothness: ||grad f_i(x) - grad f_i(y)|| <= L ||x - y|| on random pairs.
TEST(Objective, EstimatedConstantsBoundObservedCurvature) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (auto loss : {Loss::logistic(), Loss::huber(1.0), Loss::ridge()}) {
    auto data = random_problem_data(rng, 25, 5, 0.7);
    Problem p(data, loss, 0.2);
    auto c = estimate_constants(p);
    ASSERT_TRUE(c);
    EXPECT_EQ(c->mu, 0.2);
    for (int t = 0; t < 200; ++t) {
      Vector x(5), y(5);
      for (int j = 0; j < 5; ++j) {
        x(j) = 2 * g(rng);
        y(j) = 2 * g(rng);
      }
      const Index i = t % p.n();
      const double lhs = (grad_component(p, i, x) - grad_component(p, i, y)).norm();
      EXPECT_LE(lhs, c->L * (x - y).norm() * (1 + 1e-12));
      // strong convexity of f_i with modulus mu
      const Vector gi = grad_component(p, i, y);
      EXPECT_GE(component_value(p, i, x) - component_value(p, i, y) - gi.dot(x - y),
                0.5 * c->mu * (x - y).squaredNorm() - 1e-10);
    }
  }
  auto data = random_problem_data(rng, 5, 3, 1.0);
  EXPECT_FALSE(estimate_constants(Problem(data, Loss::logistic(), 0.0, CompositeTerm::zero(),
                                          Geometry::entropy_simplex())));
}
