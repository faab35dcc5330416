#ifndef RLMH_MLP_HPP
#define RLMH_MLP_HPP

#include <vector>

#include <rlmh/types.hpp>

namespace rlmh {

/**
 * Fully connected network with ReLU hidden activations and identity output.
 *
 * All parameters live in one flat vector; per-layer weights and biases are
 * Eigen maps into that storage, so flat and structured access alias the same
 * memory. Layer l stores vec(W_l) column-major followed by b_l.
 */
struct Mlp {
  std::vector<int> widths;  // [input, hidden..., output], each >= 1
  Vector theta;             // flat parameters

  int input_dim() const { return widths.front(); }
  int output_dim() const { return widths.back(); }
  int layers() const { return static_cast<int>(widths.size()) - 1; }
};

/// Total parameter count: sum over layers of (in + 1) * out.
int param_count(const std::vector<int> &widths);

/// Zero-initialised network. Throws on fewer than two widths or widths < 1.
Mlp make_mlp(std::vector<int> widths);

/// Offset of layer l's block inside theta (weights first, then bias).
int layer_offset(const Mlp &net, int layer);

Eigen::Map<const Matrix> weight(const Mlp &net, int layer);
Eigen::Map<const Vector> bias(const Mlp &net, int layer);
Eigen::Map<Matrix> weight(Mlp &net, int layer);
Eigen::Map<Vector> bias(Mlp &net, int layer);

/// Weights uniform in +/- sqrt(6 / (fan_in + fan_out)), biases zero. Seeded.
void glorot_init(Mlp &net, Rng &rng);

/// Forward pass on a single input.
Vector mlp_forward(const Mlp &net, const Vector &x);

/// Forward pass on a batch stored column-wise (input_dim x m).
Matrix mlp_forward_batch(const Mlp &net, const Matrix &inputs);

struct MlpGradient {
  Vector theta;  // d(upstream . output)/dtheta, flat layout matching Mlp
  Vector input;  // d(upstream . output)/dx
};

/**
 * Reverse-mode gradient of upstream . mlp_forward(net, x) with respect to
 * both the flat parameters and the input. The ReLU subgradient at zero is
 * taken as zero.
 */
MlpGradient mlp_grad(const Mlp &net, const Vector &x, const Vector &upstream);

/**
 * Batched reverse mode: the sum over columns j of the parameter gradient of
 * upstreams.col(j) . mlp_forward(net, inputs.col(j)).
 */
Vector mlp_grad_batch(const Mlp &net, const Matrix &inputs, const Matrix &upstreams);

/**
 * ADAM accumulator for one flat parameter vector, with bias correction.
 * Defaults: lr 1e-3, beta1 0.9, beta2 0.999, eps 1e-8.
 */
struct AdamState {
  Vector m, v;
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(Eigen::Index dim, double lr = 1e-3);

/// One ADAM update of params in place given the loss gradient.
void adam_step(AdamState &state, Vector &params, const Vector &grad);

}  // namespace rlmh

#endif
