#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <rlmh/mlp.hpp>

using namespace rlmh;

TEST_CASE("parameter count sums weights plus biases per layer") {
  CHECK(param_count({2, 32, 2}) == (2 + 1) * 32 + (32 + 1) * 2);  // 65d + 32 at d = 2
  CHECK(param_count({2, 32, 2}) == 65 * 2 + 32);
  CHECK(param_count({5, 32, 5}) == 65 * 5 + 32);
  CHECK(param_count({8, 8, 1}) == 32 * 2 + 17);  // critic at d = 2 has input 4d = 8
  CHECK(param_count({1, 1}) == 2);
}

TEST_CASE("make_mlp validates the shape") {
  CHECK_THROWS_AS(make_mlp({3}), std::invalid_argument);
  CHECK_THROWS_AS(make_mlp({3, 0, 1}), std::invalid_argument);
  const Mlp net = make_mlp({3, 4, 2});
  CHECK(net.theta.size() == param_count({3, 4, 2}));
  CHECK(net.input_dim() == 3);
  CHECK(net.output_dim() == 2);
  CHECK(net.layers() == 2);
  CHECK(net.theta.norm() == 0.0);
}

TEST_CASE("weight and bias views alias theta") {
  Mlp net = make_mlp({2, 3, 1});
  weight(net, 0)(1, 0) = 5.0;
  bias(net, 1)(0) = -2.0;
  // layer 0 block is 3x2 weights then 3 biases; entry (1,0) is the second scalar
  CHECK(net.theta(1) == 5.0);
  CHECK(net.theta(net.theta.size() - 1) == -2.0);
  const Mlp &cnet = net;
  CHECK(weight(cnet, 0)(1, 0) == 5.0);
  CHECK(bias(cnet, 1)(0) == -2.0);
}

TEST_CASE("forward pass of a hand-built network") {
  // One hidden layer, ReLU, then linear: y = W1 relu(W0 x + b0) + b1.
  Mlp net = make_mlp({2, 2, 1});
  weight(net, 0) << 1.0, -1.0, 2.0, 0.0;
  bias(net, 0) << 0.0, -1.0;
  weight(net, 1) << 1.0, 3.0;
  bias(net, 1) << 0.5;
  Vector x(2);
  x << 1.0, 2.0;
  // pre0 = (1*1 - 1*2, 2*1 - 1) = (-1, 1); relu = (0, 1); y = 0 + 3 + 0.5
  CHECK(mlp_forward(net, x)(0) == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("relu is inactive exactly at zero preactivation") {
  Mlp net = make_mlp({1, 1, 1});
  weight(net, 0) << 1.0;
  bias(net, 0) << 0.0;
  weight(net, 1) << 1.0;
  bias(net, 1) << 0.0;
  Vector zero(1);
  zero << 0.0;
  CHECK(mlp_forward(net, zero)(0) == 0.0);
  // subgradient at the kink is taken as 0: theta gradient of the first weight vanishes
  const MlpGradient g = mlp_grad(net, zero, Vector::Ones(1));
  CHECK(g.theta(0) == 0.0);
  CHECK(g.input(0) == 0.0);
}

TEST_CASE("batch forward matches per-column forward") {
  Rng rng(42);
  Mlp net = make_mlp({3, 5, 2});
  glorot_init(net, rng);
  Matrix xs(3, 7);
  for (int j = 0; j < 7; ++j) xs.col(j) = normal_vector(3, rng);
  const Matrix ys = mlp_forward_batch(net, xs);
  for (int j = 0; j < 7; ++j)
    CHECK((ys.col(j) - mlp_forward(net, xs.col(j))).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("theta gradient matches finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Mlp net = make_mlp({2, 4, 2});
    glorot_init(net, rng);
    const Vector x = normal_vector(2, rng);
    const Vector upstream = normal_vector(2, rng);
    const MlpGradient g = mlp_grad(net, x, upstream);
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < net.theta.size(); k += 3) {
      Mlp plus = net, minus = net;
      plus.theta(k) += h;
      minus.theta(k) -= h;
      const double fd =
          (upstream.dot(mlp_forward(plus, x)) - upstream.dot(mlp_forward(minus, x))) / (2.0 * h);
      CHECK(g.theta(k) == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("input gradient matches finite differences") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Mlp net = make_mlp({3, 4, 1});
    glorot_init(net, rng);
    const Vector x = normal_vector(3, rng);
    const MlpGradient g = mlp_grad(net, x, Vector::Ones(1));
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-6;
      Vector xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const double fd = (mlp_forward(net, xp)(0) - mlp_forward(net, xm)(0)) / (2.0 * h);
      CHECK(g.input(k) == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("batch gradient is the sum of per-sample gradients") {
  Rng rng(29);
  Mlp net = make_mlp({2, 3, 2});
  glorot_init(net, rng);
  Matrix xs(2, 5), ups(2, 5);
  for (int j = 0; j < 5; ++j) {
    xs.col(j) = normal_vector(2, rng);
    ups.col(j) = normal_vector(2, rng);
  }
  const Vector batch = mlp_grad_batch(net, xs, ups);
  Vector total = Vector::Zero(net.theta.size());
  for (int j = 0; j < 5; ++j) total += mlp_grad(net, xs.col(j), ups.col(j)).theta;
  CHECK((batch - total).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("glorot init is bounded and leaves biases at zero") {
  Rng rng(1);
  Mlp net = make_mlp({4, 8, 2});
  glorot_init(net, rng);
  const double bound0 = std::sqrt(6.0 / (4 + 8));
  const double bound1 = std::sqrt(6.0 / (8 + 2));
  CHECK(weight(net, 0).cwiseAbs().maxCoeff() <= bound0);
  CHECK(weight(net, 1).cwiseAbs().maxCoeff() <= bound1);
  CHECK(bias(net, 0).norm() == 0.0);
  CHECK(bias(net, 1).norm() == 0.0);
  CHECK(weight(net, 0).cwiseAbs().maxCoeff() > 0.0);

  // deterministic given the seed
  Rng rng2(1);
  Mlp net2 = make_mlp({4, 8, 2});
  glorot_init(net2, rng2);
  CHECK((net.theta - net2.theta).norm() == 0.0);
}

TEST_CASE("adam first step moves each coordinate by about the learning rate") {
  AdamState adam = make_adam(3, 0.01);
  Vector params = Vector::Zero(3);
  Vector grad(3);
  grad << 0.5, -2.0, 1e-3;
  adam_step(adam, params, grad);
  // bias-corrected m/sqrt(v) is sign(g) on the first step, up to eps
  CHECK(params(0) == doctest::Approx(-0.01).epsilon(1e-4));
  CHECK(params(1) == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(params(2) == doctest::Approx(-0.01).epsilon(1e-2));
  CHECK(adam.step == 1);
}

TEST_CASE("adam reduces a quadratic") {
  AdamState adam = make_adam(2, 0.05);
  Vector params(2);
  params << 3.0, -2.0;
  for (int i = 0; i < 500; ++i) {
    const Vector grad = 2.0 * params;
    adam_step(adam, params, grad);
  }
  CHECK(params.norm() < 0.05);
}

TEST_CASE("adam rejects mismatched dimensions") {
  AdamState adam = make_adam(2, 0.01);
  Vector params = Vector::Zero(3);
  CHECK_THROWS_AS(adam_step(adam, params, Vector::Zero(3)), std::invalid_argument);
}
