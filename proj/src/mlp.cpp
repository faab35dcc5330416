#include <rlmh/mlp.hpp>

#include <cmath>
#include <stdexcept>

namespace rlmh {

int param_count(const std::vector<int> &widths) {
  int p = 0;
  for (size_t l = 0; l + 1 < widths.size(); ++l)
    p += (widths[l] + 1) * widths[l + 1];
  return p;
}

Mlp make_mlp(std::vector<int> widths) {
  if (widths.size() < 2)
    throw std::invalid_argument("make_mlp: need at least input and output widths");
  for (int w : widths)
    if (w < 1) throw std::invalid_argument("make_mlp: widths must be >= 1");
  Mlp net;
  net.widths = std::move(widths);
  net.theta = Vector::Zero(param_count(net.widths));
  return net;
}

int layer_offset(const Mlp &net, int layer) {
  int off = 0;
  for (int l = 0; l < layer; ++l)
    off += (net.widths[l] + 1) * net.widths[l + 1];
  return off;
}

Eigen::Map<const Matrix> weight(const Mlp &net, int layer) {
  return {net.theta.data() + layer_offset(net, layer), net.widths[layer + 1],
          net.widths[layer]};
}

Eigen::Map<const Vector> bias(const Mlp &net, int layer) {
  const int off = layer_offset(net, layer) + net.widths[layer] * net.widths[layer + 1];
  return {net.theta.data() + off, net.widths[layer + 1]};
}

Eigen::Map<Matrix> weight(Mlp &net, int layer) {
  return {net.theta.data() + layer_offset(net, layer), net.widths[layer + 1],
          net.widths[layer]};
}

Eigen::Map<Vector> bias(Mlp &net, int layer) {
  const int off = layer_offset(net, layer) + net.widths[layer] * net.widths[layer + 1];
  return {net.theta.data() + off, net.widths[layer + 1]};
}

void glorot_init(Mlp &net, Rng &rng) {
  for (int l = 0; l < net.layers(); ++l) {
    const double bound = std::sqrt(6.0 / (net.widths[l] + net.widths[l + 1]));
    auto w = weight(net, l);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        w(i, j) = bound * (2.0 * uniform01(rng) - 1.0);
    bias(net, l).setZero();
  }
}

Vector mlp_forward(const Mlp &net, const Vector &x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  Vector a = x;
  for (int l = 0; l < net.layers(); ++l) {
    Vector z = weight(net, l) * a + bias(net, l);
    a = (l + 1 < net.layers()) ? z.cwiseMax(0.0) : std::move(z);
  }
  return a;
}

Matrix mlp_forward_batch(const Mlp &net, const Matrix &inputs) {
  if (inputs.rows() != net.input_dim())
    throw std::invalid_argument("mlp_forward_batch: input dimension mismatch");
  Matrix a = inputs;
  for (int l = 0; l < net.layers(); ++l) {
    Matrix z = (weight(net, l) * a).colwise() + bias(net, l);
    a = (l + 1 < net.layers()) ? z.cwiseMax(0.0) : std::move(z);
  }
  return a;
}

MlpGradient mlp_grad(const Mlp &net, const Vector &x, const Vector &upstream) {
  if (x.size() != net.input_dim() || upstream.size() != net.output_dim())
    throw std::invalid_argument("mlp_grad: dimension mismatch");
  const int L = net.layers();
  std::vector<Vector> acts(L + 1);  // acts[l] feeds layer l
  std::vector<Vector> pre(L);       // pre-activation of layer l
  acts[0] = x;
  for (int l = 0; l < L; ++l) {
    pre[l] = weight(net, l) * acts[l] + bias(net, l);
    acts[l + 1] = (l + 1 < L) ? pre[l].cwiseMax(0.0) : pre[l];
  }

  MlpGradient grad;
  grad.theta = Vector::Zero(net.theta.size());
  Vector delta = upstream;
  for (int l = L - 1; l >= 0; --l) {
    const int off = layer_offset(net, l);
    Eigen::Map<Matrix> gw(grad.theta.data() + off, net.widths[l + 1], net.widths[l]);
    Eigen::Map<Vector> gb(grad.theta.data() + off + net.widths[l] * net.widths[l + 1],
                          net.widths[l + 1]);
    gw = delta * acts[l].transpose();
    gb = delta;
    delta = weight(net, l).transpose() * delta;
    if (l > 0)
      delta = delta.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  grad.input = std::move(delta);
  return grad;
}

Vector mlp_grad_batch(const Mlp &net, const Matrix &inputs, const Matrix &upstreams) {
  if (inputs.rows() != net.input_dim() || upstreams.rows() != net.output_dim() ||
      inputs.cols() != upstreams.cols())
    throw std::invalid_argument("mlp_grad_batch: dimension mismatch");
  const int L = net.layers();
  std::vector<Matrix> acts(L + 1);
  std::vector<Matrix> pre(L);
  acts[0] = inputs;
  for (int l = 0; l < L; ++l) {
    pre[l] = (weight(net, l) * acts[l]).colwise() + bias(net, l);
    acts[l + 1] = (l + 1 < L) ? pre[l].cwiseMax(0.0) : pre[l];
  }

  Vector grad = Vector::Zero(net.theta.size());
  Matrix delta = upstreams;
  for (int l = L - 1; l >= 0; --l) {
    const int off = layer_offset(net, l);
    Eigen::Map<Matrix> gw(grad.data() + off, net.widths[l + 1], net.widths[l]);
    Eigen::Map<Vector> gb(grad.data() + off + net.widths[l] * net.widths[l + 1],
                          net.widths[l + 1]);
    gw = delta * acts[l].transpose();
    gb = delta.rowwise().sum();
    delta = weight(net, l).transpose() * delta;
    if (l > 0)
      delta = delta.cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return grad;
}

AdamState make_adam(Eigen::Index dim, double lr) {
  AdamState s;
  s.m = Vector::Zero(dim);
  s.v = Vector::Zero(dim);
  s.lr = lr;
  return s;
}

void adam_step(AdamState &state, Vector &params, const Vector &grad) {
  if (params.size() != state.m.size() || grad.size() != state.m.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params -= state.lr *
            (state.m / c1).cwiseQuotient(((state.v / c2).cwiseSqrt().array() + state.eps).matrix());
}

}  // namespace rlmh
