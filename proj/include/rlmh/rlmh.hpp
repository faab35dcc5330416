#ifndef RLMH_RLMH_HPP
#define RLMH_RLMH_HPP

#include <vector>

#include <rlmh/arwmh.hpp>
#include <rlmh/ddpg.hpp>
#include <rlmh/phi_mh.hpp>
#include <rlmh/policy.hpp>
#include <rlmh/target.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

/**
 * Actor step-size schedule. Theory mode uses alpha_n = alpha0 / (n+1)^kappa
 * with kappa > 1, whose partial sums stay below alpha0 * kappa / (kappa - 1)
 * (summability is what the ergodicity argument needs). Practice mode uses
 * the constant alpha0.
 */
enum class ScheduleMode { theory, practice };

struct LearningRateSchedule {
  ScheduleMode mode = ScheduleMode::practice;
  double alpha0 = 1e-6;
  double kappa = 1.5;  // only read in theory mode; must be > 1
};

/// Step size at 0-based step n.
double learning_rate(const LearningRateSchedule &schedule, long n);

/**
 * Norm clipping: g when ||g|| <= tau, otherwise tau * g / ||g||. tau = 0
 * freezes the policy. Never increases the norm.
 */
Vector clip_gradient(const Vector &g, double tau);

struct RlmhConfig {
  int episodes = 100;
  int steps_per_episode = 500;
  double clip_tau = 0.0;  // <= 0 selects the default sqrt(parameter count)
  LearningRateSchedule schedule;
  DdpgConfig ddpg;
  long eval_steps = 5000;  // frozen-policy chain length after training
};

/// Everything a training run produces, before any file is written.
struct RlmhResult {
  Policy policy;                    // trained policy (frozen at the end)
  Matrix train_path;                // (N + 1) x d states visited while learning
  std::vector<int> accepts;         // per training step
  std::vector<double> rewards;      // per training step
  std::vector<double> log_alphas;   // per training step
  std::vector<double> step_norms;   // ||theta_{n+1} - theta_n|| per step
  std::vector<double> drift_norms;  // ||theta_n - theta_0|| after each step
  std::vector<double> episode_mean_reward;
  double clip_tau = 0.0;            // the threshold actually used
  ChainResult eval;                 // frozen-policy evaluation chain
};

/**
 * The full learning loop: at every step the chain advances by one
 * mean-shifted Metropolis step, the transition enters the replay buffer,
 * and once the buffer holds a minibatch the critic takes one regression step
 * toward its Bellman targets, the actor moves along the clipped
 * deterministic policy gradient scaled by the schedule, and both target
 * networks follow by soft update. Chain state and buffer persist across
 * episode boundaries; episodes only partition the reward trace. After
 * training the policy is frozen and evaluated for eval_steps.
 *
 * Throws std::runtime_error naming the step and coordinate if the policy
 * parameters ever leave the finite range.
 */
RlmhResult rlmh_run(const RlmhConfig &config, const Target &target,
                    const WarmStart &warm, const Policy &pretrained, Rng &rng);

}  // namespace rlmh

#endif
