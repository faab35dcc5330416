#ifndef RLMH_DDPG_HPP
#define RLMH_DDPG_HPP

#include <vector>

#include <rlmh/mlp.hpp>
#include <rlmh/phi_mh.hpp>
#include <rlmh/policy.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

struct DdpgConfig {
  double discount = 0.99;   // Bellman discount
  int batch_size = 64;      // minibatch size M
  double critic_lr = 1e-3;  // plain gradient step size for the critic
  double tame = 1e-3;       // soft-update coefficient for target networks
  long capacity = 1000000;  // replay buffer capacity
  int critic_hidden = 8;    // critic hidden width
  bool critic_lr_cap = false;  // optionally cap critic lr at min(d/||Sigma||_F^2, 1e-5)
};

/**
 * Fixed-capacity FIFO experience store with uniform-with-replacement
 * sampling. total_pushed() keeps counting past capacity while size() tops
 * out at it.
 */
class ReplayBuffer {
 public:
  explicit ReplayBuffer(long capacity);

  void push(Transition t);
  std::vector<Transition> sample(int count, Rng &rng) const;
  long size() const { return static_cast<long>(store_.size()); }
  long total_pushed() const { return total_; }
  long capacity() const { return capacity_; }

 private:
  long capacity_;
  long total_ = 0;
  size_t write_ = 0;
  std::vector<Transition> store_;
};

/// Critic input: [state.current; state.proposed; mean_current; mean_proposed].
Vector critic_input(const MdpState &state, const MdpAction &action);

/// Critic network for dimension d: widths [4d, hidden, 1], Glorot-initialised.
Mlp make_critic(int dim, int hidden, Rng &rng);

/// Scalar critic value Q(s, a).
double critic_value(const Mlp &critic, const MdpState &state, const MdpAction &action);

/**
 * Bellman regression targets y_i = r_i + discount * Q'(s'_i, pi'(s'_i)),
 * where pi' applies the target actor's mean map to both components of the
 * next state and Q' is the target critic.
 */
std::vector<double> bellman_targets(const std::vector<Transition> &batch,
                                    const Policy &target_actor, const Mlp &target_critic,
                                    double discount);

/**
 * One gradient descent step on the minibatch mean squared Bellman error.
 * Returns the pre-step loss.
 */
double critic_update(Mlp &critic, const std::vector<Transition> &batch,
                     const std::vector<double> &targets, double lr);

/**
 * Deterministic policy-gradient ascent direction: the minibatch average of
 * d Q(s, a)/d a at a = pi(s), pulled back through the mean map at both state
 * components. Transitions whose states lie outside the trust ellipsoid
 * contribute zero (the map is the identity there).
 */
Vector actor_gradient(const Policy &policy, const std::vector<Transition> &batch,
                      const Mlp &critic);

/// Polyak soft update target <- tame * online + (1 - tame) * target.
void soft_update(Vector &target_params, const Vector &online_params, double tame);

}  // namespace rlmh

#endif
