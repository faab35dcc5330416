#include <rlmh/rlmh.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlmh {

double learning_rate(const LearningRateSchedule &schedule, long n) {
  if (n < 0) throw std::invalid_argument("learning_rate: step index must be >= 0");
  if (!(schedule.alpha0 >= 0.0))
    throw std::invalid_argument("learning_rate: alpha0 must be >= 0");
  if (schedule.mode == ScheduleMode::practice) return schedule.alpha0;
  if (!(schedule.kappa > 1.0))
    throw std::invalid_argument("learning_rate: theory mode needs kappa > 1");
  return schedule.alpha0 / std::pow(static_cast<double>(n + 1), schedule.kappa);
}

Vector clip_gradient(const Vector &g, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("clip_gradient: tau must be >= 0");
  const double norm = g.norm();
  if (norm <= tau) return g;
  if (norm == 0.0) return g;  // only reachable when tau == 0
  return (tau / norm) * g;
}

RlmhResult rlmh_run(const RlmhConfig &config, const Target &target,
                    const WarmStart &warm, const Policy &pretrained, Rng &rng) {
  if (config.episodes < 1 || config.steps_per_episode < 1)
    throw std::invalid_argument("rlmh_run: episodes and steps_per_episode must be >= 1");
  const long total_steps =
      static_cast<long>(config.episodes) * config.steps_per_episode;
  const int d = target.dim;

  RlmhResult result;
  result.policy = pretrained;
  Policy &policy = result.policy;
  const Vector theta0 = policy.net.theta;
  const auto p = policy.net.theta.size();
  result.clip_tau =
      config.clip_tau > 0.0 ? config.clip_tau : std::sqrt(static_cast<double>(p));

  Mlp critic = make_critic(d, config.ddpg.critic_hidden, rng);
  Policy target_actor = policy;
  Mlp target_critic = critic;
  double critic_lr = config.ddpg.critic_lr;
  if (config.ddpg.critic_lr_cap) {
    const double f2 = (policy.factor.L * policy.factor.L.transpose()).squaredNorm();
    critic_lr = std::min(static_cast<double>(d) / f2, 1e-5);
  }
  ReplayBuffer buffer(config.ddpg.capacity);

  result.train_path.resize(total_steps + 1, d);
  result.train_path.row(0) = warm.x0.transpose();
  result.accepts.reserve(total_steps);
  result.rewards.reserve(total_steps);
  result.log_alphas.reserve(total_steps);
  result.step_norms.reserve(total_steps);
  result.drift_norms.reserve(total_steps);

  MdpState s;
  MdpAction a;
  s.current = warm.x0;
  a.mean_current = phi_map(policy, s.current);
  s.proposed = proposal_sample(policy.factor, a.mean_current, rng);
  a.mean_proposed = phi_map(policy, s.proposed);

  for (long n = 0; n < total_steps; ++n) {
    const StepResult step = env_step(target, policy.factor, s, a, rng);
    buffer.push(Transition{s, a, step.reward, step.next});

    Vector g = Vector::Zero(p);
    if (buffer.size() >= config.ddpg.batch_size) {
      const auto batch = buffer.sample(config.ddpg.batch_size, rng);
      const auto targets =
          bellman_targets(batch, target_actor, target_critic, config.ddpg.discount);
      critic_update(critic, batch, targets, critic_lr);
      g = actor_gradient(policy, batch, critic);
    }
    g = clip_gradient(g, result.clip_tau);
    const double alpha_n = learning_rate(config.schedule, n);
    policy.net.theta += alpha_n * g;
    soft_update(target_actor.net.theta, policy.net.theta, config.ddpg.tame);
    soft_update(target_critic.theta, critic.theta, config.ddpg.tame);

    if (!policy.net.theta.allFinite()) {
      Eigen::Index bad = 0;
      for (Eigen::Index i = 0; i < p; ++i)
        if (!std::isfinite(policy.net.theta(i))) { bad = i; break; }
      throw std::runtime_error("rlmh_run: non-finite policy parameter " +
                               std::to_string(bad) + " at step " + std::to_string(n));
    }

    result.train_path.row(n + 1) = step.next.current.transpose();
    result.accepts.push_back(step.accepted ? 1 : 0);
    result.rewards.push_back(step.reward);
    result.log_alphas.push_back(step.log_alpha);
    result.step_norms.push_back(alpha_n * g.norm());
    result.drift_norms.push_back((policy.net.theta - theta0).norm());

    // On-policy action for the next step, evaluated under the new parameters.
    s = step.next;
    a.mean_current = phi_map(policy, s.current);
    a.mean_proposed = phi_map(policy, s.proposed);
  }

  result.episode_mean_reward.reserve(config.episodes);
  for (int e = 0; e < config.episodes; ++e) {
    double acc = 0.0;
    for (int k = 0; k < config.steps_per_episode; ++k)
      acc += result.rewards[static_cast<size_t>(e) * config.steps_per_episode + k];
    result.episode_mean_reward.push_back(acc / config.steps_per_episode);
  }

  if (config.eval_steps > 0)
    result.eval = mh_chain(target, policy, s.current, config.eval_steps, rng);
  return result;
}

}  // namespace rlmh
