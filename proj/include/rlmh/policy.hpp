#ifndef RLMH_POLICY_HPP
#define RLMH_POLICY_HPP

#include <string>

#include <rlmh/laplace.hpp>
#include <rlmh/mlp.hpp>
#include <rlmh/types.hpp>

namespace rlmh {

/**
 * State-dependent proposal mean map.
 *
 * Inside the trust ellipsoid centred at the warm-start mean the map follows
 * the network suggestion psi(x) = center + L nu(x); outside it reverts to the
 * identity (a plain random walk), with a smooth blend in between:
 *   phi(x) = psi(x) + gamma(eta(x)) (x - psi(x)).
 * The same covariance factor drives the ellipsoid, the network target
 * whitening and the proposal distribution.
 */
struct Policy {
  Mlp net;                  // residual map nu_theta: R^d -> R^d
  Vector center;            // warm-start mean
  CovarianceFactor factor;  // warm-start covariance factor
  double radius = 10.0;     // ellipsoid scale
};

/**
 * Fresh policy for dimension d: width `hidden` ReLU network (zero params
 * until initialised or pretrained), given centre/covariance, ellipsoid
 * radius `radius`.
 */
Policy make_policy(const Vector &center, const Matrix &sigma, int hidden = 32,
                   double radius = 10.0);

/// Ellipsoid coordinate eta(x) = ||Sigma^{-1/2}(x - center)||^2 / radius^2.
double ellipsoid_eta(const Policy &policy, const Vector &x);

/**
 * Smooth blend between network regime and identity regime:
 * 0 on [0, 1/2], 1 on [1, inf), and the logistic-of-rational bridge
 * [1 + exp((4 eta - 3)/(4 eta^2 - 6 eta + 2))]^{-1} on (1/2, 1).
 * Continuous and increasing, with gamma(3/4) = 1/2.
 */
double transition_gamma(double eta);

/// Proposal mean phi(x). Returns x exactly (no network evaluation) once
/// eta(x) >= 1.
Vector phi_map(const Policy &policy, const Vector &x);

/**
 * Parameter gradient of upstream . phi(x): equals
 * (1 - gamma(eta(x))) * d(nu)/dtheta pulled back through L, and is
 * identically zero outside the ellipsoid. eta and gamma do not depend on
 * theta, so no other term appears.
 */
Vector phi_grad(const Policy &policy, const Vector &x, const Vector &upstream);

/**
 * Empirical bound max ||x - phi(x)||_{1,Sigma} over the probe rows plus a
 * +/- perturbed refinement pass around each probe. A lower bound on the true
 * supremum that can only grow as probes are added.
 */
double mean_shift_bound(const Policy &policy, const Matrix &probes);

struct PretrainConfig {
  int max_epochs = 2000;
  double val_threshold = 1.0;  // stop once validation loss falls below this
  double lr = 1e-3;            // ADAM learning rate
  double val_fraction = 0.3;   // trailing fraction of rows held out
};

struct PretrainResult {
  double best_val_loss = 0.0;
  double final_val_loss = 0.0;
  int epochs_run = 0;
};

/**
 * Fits nu_theta(x) ~ Sigma^{-1/2}(center - x) on the warm samples (rows) by
 * full-batch ADAM on the mean squared error, writing back the parameters with
 * the best validation loss seen. The fitted map approximates the
 * anti-correlated proposal mean phi(x) ~ 2 center - x inside the ellipsoid.
 * Requires at least 10 rows so both split parts are non-trivial.
 */
PretrainResult pretrain(Policy &policy, const Matrix &warm_samples,
                        const PretrainConfig &config, Rng &rng);

/**
 * Versioned JSON checkpoint holding layer widths, flat parameters, centre,
 * Cholesky factor and radius. Loading restores every double bit-exactly and
 * rejects unknown format versions.
 */
void save_policy(const Policy &policy, const std::string &path);
Policy load_policy(const std::string &path);

}  // namespace rlmh

#endif
