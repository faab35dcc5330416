#ifndef RLMH_ARWMH_HPP
#define RLMH_ARWMH_HPP

#include <vector>

#include <rlmh/target.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

/// Robbins-Monro gain gamma_n = 1 / (2 (n+1)^beta), n >= 0.
double adaptation_gain(long n, double beta);

/**
 * Adaptive random-walk chain state: current point, running mean and
 * covariance estimates, global log scale, and the 0-based step counter that
 * drives the gain schedule.
 */
struct ArwmhState {
  Vector x;
  Vector mu;
  Matrix sigma;
  double log_lambda = 0.0;
  long iter = 0;
};

/// Canonical start: x = 0, mu = 0, sigma = I, lambda = 1.
ArwmhState make_arwmh_state(int dim);

/**
 * One random-walk step with proposal N(x, lambda * sigma), symmetric
 * acceptance min(1, p(x*)/p(x)) evaluated in log space. When adapt is true
 * the scale, mean and covariance recursions run with the current gain (the
 * covariance recursion deliberately uses the pre-update mean) and the step
 * counter advances; when false the state only moves. The estimate is
 * jittered to positive definiteness before factorising. Returns whether the
 * proposal was accepted.
 */
bool arwmh_step(ArwmhState &state, const Target &target, double beta, bool adapt,
                Rng &rng);

struct ArwmhRun {
  Matrix path;  // (n_steps + 1) x d, first row is the starting point
  std::vector<int> accepts;
  ArwmhState final_state;
};

/**
 * Runs n_steps from `start` (or the canonical start when absent), adapting
 * unless adapt is false.
 */
ArwmhRun arwmh_run(const Target &target, long n_steps, double beta, Rng &rng,
                   const ArwmhState *start = nullptr, bool adapt = true);

/// Warm-start bundle consumed by pretraining and the learned-proposal chain.
struct WarmStart {
  Vector x0;       // final state of the warm chain
  Vector mean;     // mean of the final ceil(m/3) states
  Matrix sigma;    // jittered covariance of the final ceil(m/3) states
  Matrix samples;  // all m post-start states, one per row
};

/**
 * Runs an m-step adaptive random-walk chain and summarises it: mean and
 * covariance come from the final ceil(m/3) states, the covariance gains a
 * 1e-6 * mean(diag) jitter on the diagonal, and the chain's last state seeds
 * the follow-on sampler.
 */
WarmStart warm_start(const Target &target, long m, double beta, Rng &rng);

}  // namespace rlmh

#endif
