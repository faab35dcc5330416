#ifndef RLMH_AMALA_HPP
#define RLMH_AMALA_HPP

#include <vector>

#include <rlmh/laplace.hpp>
#include <rlmh/target.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

/**
 * One preconditioned Langevin step from x: drift nu(v) = v + eps * Sigma *
 * grad log p(v), Gaussian proposal with covariance 2 eps Sigma, and the
 * matching Metropolis correction. A non-finite gradient at the proposed
 * point rejects the step (the reverse drift is undefined there); a
 * non-finite gradient or log density at the current point is an error.
 * Returns whether the proposal was accepted, advancing x in place.
 */
bool mala_step(Vector &x, const Target &target, double epsilon,
               const CovarianceFactor &factor, Rng &rng);

/// Fixed-kernel Langevin run: n_steps from x0 with constant (epsilon, Sigma).
struct MalaRun {
  Matrix path;  // (n_steps + 1) x d
  std::vector<int> accepts;
};
MalaRun mala_run(const Target &target, double epsilon, const CovarianceFactor &factor,
                 const Vector &x0, long n_steps, Rng &rng);

struct AmalaConfig {
  double epsilon0 = 1.0;       // initial step scale
  double blend = 0.3;          // covariance mixing weight toward the old estimate
  int epochs = 10;             // total epochs, adaptation between them only
  long warm_epoch_len = 1000;  // length of every epoch but the last
  long final_epoch_len = 100000;
  double target_accept = 0.574;
};

struct AmalaRun {
  Matrix final_path;          // final-epoch sample path, (len + 1) x d
  std::vector<int> final_accepts;
  double final_epsilon = 0.0;
  Matrix final_sigma;         // preconditioner used in the final epoch
  Vector final_x;
  std::vector<double> epoch_accept_rates;  // moved-state fraction per epoch
};

/**
 * Epoch-adaptive Langevin sampler: within an epoch the kernel is fixed;
 * between epochs the step scale multiplies by exp(rho - target_accept) with
 * rho the epoch's moved-state fraction, and the preconditioner blends
 * blend * old + (1 - blend) * cov(epoch states), jittered to positive
 * definiteness. Starts at x0 (or the origin), epsilon0, identity
 * preconditioner; returns the final (longest) epoch's samples and the frozen
 * kernel parameters.
 */
AmalaRun amala_run(const AmalaConfig &config, const Target &target, Rng &rng,
                   const Vector *x0 = nullptr);

}  // namespace rlmh

#endif
