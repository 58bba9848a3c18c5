#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "graphnav/mlp.hpp"

using namespace graphnav;

TEST_CASE("param_count matches the closed form") {
  // sum over layers of (n_in + 1) * n_out.
  CHECK(Mlp::param_count({4, 8, 3}) == (4 + 1) * 8 + (8 + 1) * 3);
  CHECK(Mlp::param_count({10, 1}) == 11);
  const Mlp net({5, 7, 7, 2});
  CHECK(net.params().size() == Mlp::param_count({5, 7, 7, 2}));
}

TEST_CASE("single linear layer computes Wx + b exactly") {
  Mlp net({2, 2});
  net.weight(0)(0, 0) = 1.0;
  net.weight(0)(0, 1) = 2.0;
  net.weight(0)(1, 0) = -3.0;
  net.weight(0)(1, 1) = 0.5;
  net.bias(0)(0) = 0.25;
  net.bias(0)(1) = -1.0;
  Eigen::MatrixXd x(1, 2);
  x << 3.0, -1.0;
  const Eigen::MatrixXd y = net.forward(x);
  CHECK(y(0, 0) == doctest::Approx(1.0 * 3.0 + 2.0 * -1.0 + 0.25));
  CHECK(y(0, 1) == doctest::Approx(-3.0 * 3.0 + 0.5 * -1.0 - 1.0));
}

TEST_CASE("hidden layers apply ReLU, output stays linear") {
  Mlp net({1, 1, 1});
  net.weight(0)(0, 0) = 1.0;
  net.bias(0)(0) = 0.0;
  net.weight(1)(0, 0) = 1.0;
  net.bias(1)(0) = 0.0;
  Eigen::MatrixXd x(2, 1);
  x << 2.0, -2.0;
  const Eigen::MatrixXd y = net.forward(x);
  CHECK(y(0, 0) == doctest::Approx(2.0));
  CHECK(y(1, 0) == doctest::Approx(0.0));  // clipped by the hidden ReLU

  // An output-layer negative passes through untouched.
  net.weight(1)(0, 0) = -1.0;
  CHECK(net.forward(x)(0, 0) == doctest::Approx(-2.0));
}

TEST_CASE("glorot init respects the uniform bound and is seed-stable") {
  Mlp a({20, 30, 5});
  std::mt19937_64 rng1(99);
  a.init_glorot(rng1);
  const double bound0 = std::sqrt(6.0 / (20 + 30));
  for (int r = 0; r < 30; ++r)
    for (int c = 0; c < 20; ++c) {
      CHECK(std::abs(a.weight(0)(r, c)) <= bound0 + 1e-12);
    }
  for (int r = 0; r < 30; ++r) CHECK(a.bias(0)(r) == 0.0);

  Mlp b({20, 30, 5});
  std::mt19937_64 rng2(99);
  b.init_glorot(rng2);
  CHECK(a.params() == b.params());
}

TEST_CASE("backward matches central finite differences") {
  Mlp net({3, 6, 4, 2});
  std::mt19937_64 rng(7);
  net.init_glorot(rng);
  Eigen::MatrixXd x(2, 3);
  x << 0.3, -0.8, 1.2, 0.9, 0.1, -0.4;

  // Scalar loss: sum of squared outputs.
  Mlp::Cache cache;
  Eigen::MatrixXd y = net.forward_cached(x, cache);
  Eigen::VectorXd grad(net.params().size());
  grad.setZero();
  Eigen::MatrixXd dy = 2.0 * y;
  net.backward(cache, dy, grad);

  std::uniform_int_distribution<Eigen::Index> pick(0, net.params().size() - 1);
  const double h = 1e-6;
  for (int trial = 0; trial < 120; ++trial) {
    const Eigen::Index p = pick(rng);
    const double saved = net.params()(p);
    net.params()(p) = saved + h;
    const double lp = net.forward(x).squaredNorm();
    net.params()(p) = saved - h;
    const double lm = net.forward(x).squaredNorm();
    net.params()(p) = saved;
    const double fd = (lp - lm) / (2.0 * h);
    const double scale = std::max({1.0, std::abs(fd), std::abs(grad(p))});
    CHECK(std::abs(grad(p) - fd) / scale < 1e-5);
  }
}

TEST_CASE("backward accumulates into the provided gradient") {
  Mlp net({2, 3, 1});
  std::mt19937_64 rng(3);
  net.init_glorot(rng);
  Eigen::MatrixXd x(1, 2);
  x << 1.0, -0.5;
  Mlp::Cache cache;
  net.forward_cached(x, cache);
  Eigen::MatrixXd dy(1, 1);
  dy << 1.0;
  Eigen::VectorXd g1(net.params().size());
  g1.setZero();
  net.backward(cache, dy, g1);
  Eigen::VectorXd g2 = g1;
  net.backward(cache, dy, g2);  // second pass doubles
  CHECK((g2 - 2.0 * g1).norm() == doctest::Approx(0.0));
}

TEST_CASE("Adam matches a hand-rolled reference implementation") {
  const Eigen::Index n = 6;
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  AdamOptimizer opt(n, lr, b1, b2, eps);

  Eigen::VectorXd params(n), ref_params(n);
  params << 1.0, -2.0, 0.5, 3.0, -0.1, 0.0;
  ref_params = params;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 1; t <= 25; ++t) {
    Eigen::VectorXd grad(n);
    for (Eigen::Index i = 0; i < n; ++i) grad(i) = gauss(rng);

    opt.step(params, grad);

    // Reference update with explicit bias correction.
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad).eval();
    const Eigen::VectorXd mhat = m / (1.0 - std::pow(b1, t));
    const Eigen::VectorXd vhat = v / (1.0 - std::pow(b2, t));
    for (Eigen::Index i = 0; i < n; ++i)
      ref_params(i) -= lr * mhat(i) / (std::sqrt(vhat(i)) + eps);

    for (Eigen::Index i = 0; i < n; ++i)
      CHECK(params(i) == doctest::Approx(ref_params(i)).epsilon(1e-12));
  }
  CHECK(opt.steps() == 25);
}

TEST_CASE("Adam descends a simple quadratic") {
  AdamOptimizer opt(1, 0.05);
  Eigen::VectorXd p(1);
  p << 5.0;
  for (int t = 0; t < 2000; ++t) {
    Eigen::VectorXd g(1);
    g << 2.0 * p(0);  // d/dp of p^2
    opt.step(p, g);
  }
  CHECK(std::abs(p(0)) < 0.05);
}

TEST_CASE("network serialization round-trips bitwise") {
  Mlp net({4, 9, 3});
  std::mt19937_64 rng(21);
  net.init_glorot(rng);
  std::stringstream buf;
  net.save(buf);
  const Mlp back = Mlp::load(buf);
  CHECK(back.sizes() == net.sizes());
  CHECK(back.params() == net.params());  // exact doubles
}

TEST_CASE("optimizer serialization preserves moments and step count") {
  AdamOptimizer opt(4, 0.003);
  Eigen::VectorXd p = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd g(4);
  g << 0.1, -0.2, 0.3, -0.4;
  opt.step(p, g);
  opt.step(p, g);

  std::stringstream buf;
  opt.save(buf);
  AdamOptimizer back = AdamOptimizer::load(buf);
  CHECK(back.steps() == 2);
  CHECK(back.learning_rate() == opt.learning_rate());
  CHECK(back.first_moment() == opt.first_moment());
  CHECK(back.second_moment() == opt.second_moment());

  // Continuing from the restored state matches continuing the original.
  Eigen::VectorXd p2 = p;
  opt.step(p, g);
  back.step(p2, g);
  CHECK(p == p2);
}

TEST_CASE("min_abs_preactivation reports the nearest ReLU kink") {
  Mlp net({1, 2, 1});
  net.weight(0)(0, 0) = 1.0;
  net.bias(0)(0) = -0.5;  // unit 0 pre-activation: x - 0.5
  net.weight(0)(1, 0) = 2.0;
  net.bias(0)(1) = 0.0;   // unit 1 pre-activation: 2x
  Eigen::MatrixXd x(1, 1);
  x << 0.45;
  // Pre-activations: -0.05 and 0.9.
  CHECK(net.min_abs_preactivation(x) == doctest::Approx(0.05));
}
