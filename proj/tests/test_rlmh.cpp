#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <rlmh/rlmh.hpp>

using namespace rlmh;

namespace {

// Small but complete training setup on a 1-D gaussian.
struct Desk {
  Target target = make_gaussian(mean(), Matrix::Identity(1, 1));
  WarmStart warm;
  Policy policy;

  static Vector mean() {
    Vector m(1);
    m << 1.0;
    return m;
  }

  explicit Desk(unsigned long seed) : policy(make_policy(mean(), Matrix::Identity(1, 1), 8)) {
    Rng rng(seed);
    warm = warm_start(target, 300, 0.6, rng);
    policy = make_policy(warm.mean, warm.sigma, 8);
    PretrainConfig cfg;
    cfg.max_epochs = 200;
    pretrain(policy, warm.samples, cfg, rng);
  }
};

}  // namespace

TEST_CASE("learning rate schedules") {
  LearningRateSchedule practice;  // defaults
  CHECK(practice.mode == ScheduleMode::practice);
  CHECK(learning_rate(practice, 0) == doctest::Approx(1e-6).epsilon(1e-15));
  CHECK(learning_rate(practice, 1000000) == doctest::Approx(1e-6).epsilon(1e-15));

  LearningRateSchedule theory{ScheduleMode::theory, 0.5, 2.0};
  CHECK(learning_rate(theory, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(learning_rate(theory, 1) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(learning_rate(theory, 9) == doctest::Approx(0.005).epsilon(1e-15));

  CHECK_THROWS_AS(learning_rate(theory, -1), std::invalid_argument);
  LearningRateSchedule bad{ScheduleMode::theory, 1.0, 1.0};  // kappa must exceed 1
  CHECK_THROWS_AS(learning_rate(bad, 0), std::invalid_argument);
  LearningRateSchedule neg{ScheduleMode::practice, -1.0, 1.5};
  CHECK_THROWS_AS(learning_rate(neg, 0), std::invalid_argument);
}

TEST_CASE("theory schedule is summable") {
  LearningRateSchedule theory{ScheduleMode::theory, 1.0, 1.5};
  double partial = 0.0;
  for (long n = 0; n < 200000; ++n) partial += learning_rate(theory, n);
  // zeta(1.5) = 2.612...; the partial sum must stay under it
  CHECK(partial < 2.6124);
  CHECK(partial > 2.60);
}

TEST_CASE("gradient clipping") {
  Vector g(2);
  g << 3.0, 4.0;  // norm 5
  const Vector clipped = clip_gradient(g, 1.0);
  CHECK(clipped.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((clipped - 0.2 * g).norm() == doctest::Approx(0.0).epsilon(1e-14));
  // under the threshold the vector is untouched
  const Vector same = clip_gradient(g, 10.0);
  CHECK((same - g).norm() == 0.0);
  // exact threshold passes through
  CHECK((clip_gradient(g, 5.0) - g).norm() == 0.0);
  // tau 0 freezes, and a zero gradient is safe
  CHECK(clip_gradient(g, 0.0).norm() == 0.0);
  CHECK(clip_gradient(Vector::Zero(2), 0.0).norm() == 0.0);
  CHECK_THROWS_AS(clip_gradient(g, -1.0), std::invalid_argument);
}

TEST_CASE("run shapes and traces") {
  Desk desk(1);
  Rng rng(100);
  RlmhConfig cfg;
  cfg.episodes = 3;
  cfg.steps_per_episode = 40;
  cfg.eval_steps = 25;
  cfg.ddpg.batch_size = 16;
  const RlmhResult res = rlmh_run(cfg, desk.target, desk.warm, desk.policy, rng);
  CHECK(res.train_path.rows() == 121);
  CHECK(res.accepts.size() == 120);
  CHECK(res.rewards.size() == 120);
  CHECK(res.step_norms.size() == 120);
  CHECK(res.drift_norms.size() == 120);
  CHECK(res.episode_mean_reward.size() == 3);
  CHECK(res.eval.path.rows() == 26);
  CHECK((res.train_path.row(0).transpose() - desk.warm.x0).norm() == 0.0);
  CHECK(res.clip_tau == doctest::Approx(std::sqrt(double(desk.policy.net.theta.size()))));
  // episode means recompute from the reward trace
  double m0 = 0.0;
  for (int i = 0; i < 40; ++i) m0 += res.rewards[i];
  CHECK(res.episode_mean_reward[0] == doctest::Approx(m0 / 40.0).epsilon(1e-12));
}

TEST_CASE("diminishing adaptation and containment bounds hold exactly") {
  Desk desk(2);
  Rng rng(200);
  RlmhConfig cfg;
  cfg.episodes = 2;
  cfg.steps_per_episode = 60;
  cfg.eval_steps = 0;
  cfg.ddpg.batch_size = 8;
  cfg.clip_tau = 0.7;
  cfg.schedule = {ScheduleMode::theory, 0.05, 1.2};  // big enough to move
  const RlmhResult res = rlmh_run(cfg, desk.target, desk.warm, desk.policy, rng);
  double alpha_sum = 0.0;
  bool moved = false;
  for (size_t n = 0; n < res.step_norms.size(); ++n) {
    const double alpha = learning_rate(cfg.schedule, static_cast<long>(n));
    alpha_sum += alpha;
    CHECK(res.step_norms[n] <= alpha * cfg.clip_tau + 1e-12);
    CHECK(res.drift_norms[n] <= alpha_sum * cfg.clip_tau + 1e-12);
    moved = moved || res.step_norms[n] > 0.0;
  }
  CHECK(moved);
}

TEST_CASE("practice schedule keeps parameter drift microscopic") {
  Desk desk(3);
  Rng rng(300);
  RlmhConfig cfg;
  cfg.episodes = 2;
  cfg.steps_per_episode = 50;
  cfg.eval_steps = 0;
  cfg.ddpg.batch_size = 8;
  const RlmhResult res = rlmh_run(cfg, desk.target, desk.warm, desk.policy, rng);
  const double tau = res.clip_tau;
  CHECK(res.drift_norms.back() <= 100 * 1e-6 * tau + 1e-12);
}

TEST_CASE("training improves the frozen chain on a desk scale problem") {
  // With a deliberately mis-set pretrained map, a few thousand DDPG steps at a
  // larger learning rate should raise the mean reward; majority vote over
  // three seeds to keep flakiness down.
  int wins = 0;
  for (unsigned long seed : {11UL, 12UL, 13UL}) {
    Desk desk(seed);
    // sabotage: push the network toward a constant far-off proposal mean
    desk.policy.net.theta *= 0.0;
    bias(desk.policy.net, 1).setConstant(3.0);
    Rng rng(seed * 7);
    RlmhConfig cfg;
    cfg.episodes = 8;
    cfg.steps_per_episode = 250;
    cfg.eval_steps = 0;
    cfg.ddpg.batch_size = 32;
    cfg.schedule.alpha0 = 1e-2;
    const RlmhResult res = rlmh_run(cfg, desk.target, desk.warm, desk.policy, rng);
    const double first = res.episode_mean_reward.front();
    const double last = res.episode_mean_reward.back();
    if (last > first) ++wins;
  }
  CHECK(wins >= 2);
}

TEST_CASE("invalid configurations are rejected") {
  Desk desk(4);
  Rng rng(400);
  RlmhConfig cfg;
  cfg.episodes = 0;
  CHECK_THROWS_AS(rlmh_run(cfg, desk.target, desk.warm, desk.policy, rng),
                  std::invalid_argument);
}
