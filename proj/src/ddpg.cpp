#include <rlmh/ddpg.hpp>

#include <stdexcept>

namespace rlmh {

ReplayBuffer::ReplayBuffer(long capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
  if (size() < capacity_) {
    store_.push_back(std::move(t));
  } else {
    store_[write_] = std::move(t);  // overwrite the oldest entry
    write_ = (write_ + 1) % static_cast<size_t>(capacity_);
  }
  ++total_;
}

std::vector<Transition> ReplayBuffer::sample(int count, Rng &rng) const {
  if (store_.empty()) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::vector<Transition> out;
  out.reserve(count);
  const auto n = store_.size();
  for (int i = 0; i < count; ++i)
    out.push_back(store_[static_cast<size_t>(uniform01(rng) * static_cast<double>(n))]);
  return out;
}

Vector critic_input(const MdpState &state, const MdpAction &action) {
  const auto d = state.current.size();
  Vector in(4 * d);
  in << state.current, state.proposed, action.mean_current, action.mean_proposed;
  return in;
}

Mlp make_critic(int dim, int hidden, Rng &rng) {
  Mlp critic = make_mlp({4 * dim, hidden, 1});
  glorot_init(critic, rng);
  return critic;
}

double critic_value(const Mlp &critic, const MdpState &state, const MdpAction &action) {
  return mlp_forward(critic, critic_input(state, action))(0);
}

std::vector<double> bellman_targets(const std::vector<Transition> &batch,
                                    const Policy &target_actor, const Mlp &target_critic,
                                    double discount) {
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const Transition &t : batch) {
    MdpAction next_action{phi_map(target_actor, t.next.current),
                          phi_map(target_actor, t.next.proposed)};
    targets.push_back(t.reward +
                      discount * critic_value(target_critic, t.next, next_action));
  }
  return targets;
}

double critic_update(Mlp &critic, const std::vector<Transition> &batch,
                     const std::vector<double> &targets, double lr) {
  if (batch.empty() || batch.size() != targets.size())
    throw std::invalid_argument("critic_update: batch and targets must align and be non-empty");
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Vector grad = Vector::Zero(critic.theta.size());
  Vector upstream(1);
  for (size_t i = 0; i < batch.size(); ++i) {
    const Vector in = critic_input(batch[i].state, batch[i].action);
    const double err = mlp_forward(critic, in)(0) - targets[i];
    loss += err * err * inv_m;
    upstream(0) = 2.0 * err * inv_m;
    grad += mlp_grad(critic, in, upstream).theta;
  }
  critic.theta -= lr * grad;
  return loss;
}

Vector actor_gradient(const Policy &policy, const std::vector<Transition> &batch,
                      const Mlp &critic) {
  if (batch.empty()) throw std::invalid_argument("actor_gradient: empty batch");
  const auto d = policy.center.size();
  Vector grad = Vector::Zero(policy.net.theta.size());
  Vector upstream(1);
  upstream(0) = 1.0;
  for (const Transition &t : batch) {
    const MdpAction on_policy{phi_map(policy, t.state.current),
                              phi_map(policy, t.state.proposed)};
    const Vector in = critic_input(t.state, on_policy);
    const Vector dq_din = mlp_grad(critic, in, upstream).input;
    grad += phi_grad(policy, t.state.current, dq_din.segment(2 * d, d));
    grad += phi_grad(policy, t.state.proposed, dq_din.segment(3 * d, d));
  }
  return grad / static_cast<double>(batch.size());
}

void soft_update(Vector &target_params, const Vector &online_params, double tame) {
  if (target_params.size() != online_params.size())
    throw std::invalid_argument("soft_update: dimension mismatch");
  if (!(tame >= 0.0 && tame <= 1.0))
    throw std::invalid_argument("soft_update: tame must lie in [0, 1]");
  target_params = tame * online_params + (1.0 - tame) * target_params;
}

}  // namespace rlmh
