#ifndef RLMH_LAPLACE_HPP
#define RLMH_LAPLACE_HPP

#include <rlmh/types.hpp>

namespace rlmh {

/**
 * Cholesky handle for a fixed proposal covariance.
 *
 * Holds the lower factor L with Sigma = L L^T and log det(Sigma)^{1/2}, so
 * density evaluations and draws reuse one factorisation. L has a strictly
 * positive diagonal.
 */
struct CovarianceFactor {
  Matrix L;
  double log_det_half = 0.0;  // sum_i log L(i,i)

  int dim() const { return static_cast<int>(L.rows()); }
};

/**
 * Factorises a symmetric positive definite matrix.
 *
 * Throws std::invalid_argument naming the failing pivot index when a diagonal
 * pivot is not strictly positive, and when sigma is not square or is visibly
 * asymmetric.
 */
CovarianceFactor factorize(const Matrix &sigma);

/**
 * Sigma-scaled l1 norm ||v||_{1,Sigma} = ||Sigma^{-1/2} v||_1, computed by
 * forward substitution against the stored factor (no explicit inverse).
 */
double norm1_sigma(const CovarianceFactor &factor, const Vector &v);

/**
 * Normalised log density at y of the multivariate Laplace proposal centred at
 * mean: log q(y) = -||y - mean||_{1,Sigma} - d log 2 - log det(Sigma)^{1/2}.
 */
double proposal_log_density(const CovarianceFactor &factor, const Vector &mean,
                            const Vector &y);

/**
 * Draws y = mean + L z with z i.i.d. standard Laplace, each coordinate via
 * the inverse CDF of one uniform.
 */
Vector proposal_sample(const CovarianceFactor &factor, const Vector &mean,
                       Rng &rng);

/**
 * Positive-definiteness safeguard for estimated covariances: adds
 * 1e-6 * mean(diag) to the diagonal, falling back to 1e-6 when the diagonal
 * mean is not positive (degenerate estimate from identical samples).
 */
Matrix jittered_spd(const Matrix &sigma);

}  // namespace rlmh

#endif
