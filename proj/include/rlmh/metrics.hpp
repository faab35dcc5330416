#ifndef RLMH_METRICS_HPP
#define RLMH_METRICS_HPP

#include <vector>

#include <rlmh/types.hpp>

namespace rlmh {

/**
 * Expected squared jump distance of a sample path (rows are consecutive
 * states): the mean of ||x_i - x_{i-1}||^2 over the n-1 consecutive pairs.
 * Requires at least two rows.
 */
double esjd(const Matrix &path);

/**
 * Kernel lengthscale by the median heuristic: half the median of the
 * pairwise Euclidean distances over distinct pairs i < j (lower median for
 * even counts). Falls back to 1 when the median distance is zero.
 * Requires at least two points.
 */
double median_heuristic(const Matrix &points);

/// Gaussian kernel k(x, y) = exp(-||x - y||^2 / lengthscale^2).
double gaussian_kernel(const Vector &x, const Vector &y, double lengthscale);

/**
 * Maximum mean discrepancy between two sample sets (rows are points) under
 * the Gaussian kernel: the square root of the biased V-statistic
 *   (1/m^2) sum k(x,x') - (2/mn) sum k(x,y) + (1/n^2) sum k(y,y'),
 * with the square root taken after clamping at zero.
 */
double mmd(const Matrix &sample_p, const Matrix &sample_q, double lengthscale);

/// Fraction of accepted steps. Requires a non-empty flag vector.
double acceptance_rate(const std::vector<int> &accept_flags);

}  // namespace rlmh

#endif
