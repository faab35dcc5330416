#ifndef RLMH_PHI_MH_HPP
#define RLMH_PHI_MH_HPP

#include <vector>

#include <rlmh/laplace.hpp>
#include <rlmh/policy.hpp>
#include <rlmh/target.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

/// Reward floor: log expected squared jump contributions are clamped here.
constexpr double kRewardFloor = -50.0;

/// Chain state as seen by the learner: current point and pending proposal.
struct MdpState {
  Vector current;
  Vector proposed;
};

/// Proposal means at both components of the state, in matching order.
struct MdpAction {
  Vector mean_current;   // proposal mean used from `current`
  Vector mean_proposed;  // proposal mean used from `proposed`
};

/// One environment interaction, as stored in the replay buffer.
struct Transition {
  MdpState state;
  MdpAction action;
  double reward = 0.0;
  MdpState next;
};

/**
 * Log acceptance probability of the mean-shifted proposal chain:
 *   min{0, log p(x*) - log p(x)
 *          + log q(x | mean_proposed) - log q(x* | mean_current)}.
 * Returns -inf when the proposed point has log density -inf. Requires a
 * finite log density at the current point.
 */
double acceptance_log_prob(const Target &target, const CovarianceFactor &factor,
                           const MdpState &state, const MdpAction &action);

/**
 * Per-step reward: the log squared jump discounted by acceptance,
 *   r = 2 log ||current - proposed|| + log alpha,
 * clamped below at kRewardFloor (so an immovable or rejected-with-certainty
 * pair yields the floor rather than -inf).
 */
double reward(const MdpState &state, double log_alpha);

struct StepResult {
  double reward = 0.0;
  double log_alpha = 0.0;
  bool accepted = false;
  MdpState next;
};

/**
 * One environment step: accept/reject the pending proposal with the action's
 * densities, then draw the next pending proposal from the mean the action
 * assigns to the new current point. The uniform accept draw consumes
 * randomness before the proposal draw.
 */
StepResult env_step(const Target &target, const CovarianceFactor &factor,
                    const MdpState &state, const MdpAction &action, Rng &rng);

/// Sample path of a (frozen-policy) chain run.
struct ChainResult {
  Matrix path;                     // (n_steps + 1) x d, first row is x0
  std::vector<int> accepts;        // n_steps flags
  std::vector<double> rewards;     // n_steps rewards
  std::vector<double> log_alphas;  // n_steps log acceptance probabilities
};

/**
 * Runs the chain for n_steps with a fixed policy, evaluating the proposal
 * mean map at every state. The proposal covariance is the policy's own
 * factor.
 */
ChainResult mh_chain(const Target &target, const Policy &policy, const Vector &x0,
                     long n_steps, Rng &rng);

}  // namespace rlmh

#endif
