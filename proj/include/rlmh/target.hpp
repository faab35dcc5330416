#ifndef RLMH_TARGET_HPP
#define RLMH_TARGET_HPP

#include <functional>
#include <string>
#include <vector>

#include <rlmh/types.hpp>

namespace rlmh {

/**
 * Unnormalised (or normalised) target density in log space.
 *
 * log_density may return -inf outside the support but never NaN on finite
 * input. grad_log_density is empty when no closed form is wired in; use
 * grad_or_finite_difference for a uniform interface.
 */
struct Target {
  int dim = 0;
  std::string label;
  std::function<double(const Vector &)> log_density;
  std::function<Vector(const Vector &)> grad_log_density;
};

/// Multivariate normal. Throws if sigma is not symmetric positive definite.
Target make_gaussian(const Vector &mean, const Matrix &sigma);

/**
 * Finite mixture of given components (all the same dimension).
 * Weights must be positive; they are normalised to sum to one. The mixture
 * log density is combined by log-sum-exp, so it is finite whenever any
 * component is. Gradients combine by responsibility weights and are available
 * exactly when every component has one.
 */
Target make_mixture(const std::vector<double> &weights,
                    const std::vector<Target> &components);

/// Gaussian mixture; validates one covariance per mean and positive weights.
Target make_gaussian_mixture(const std::vector<double> &weights,
                             const std::vector<Vector> &means,
                             const std::vector<Matrix> &sigmas);

/**
 * One-dimensional skew-normal with location xi, scale omega > 0 and shape a:
 * log p(x) = log 2 - log omega + log phi(z) + log Phi(a z), z = (x-xi)/omega.
 * Both log Phi and its derivative are evaluated with asymptotic tails so the
 * density and gradient stay finite far into the thin tail.
 */
Target make_skew_normal(double location, double scale, double shape);

/// Mixture of one-dimensional skew-normals.
Target make_skew_normal_mixture(const std::vector<double> &weights,
                                const std::vector<double> &locations,
                                const std::vector<double> &scales,
                                const std::vector<double> &shapes);

/**
 * Gradient of the log density: the closed form when present, otherwise
 * central differences with per-coordinate step 1e-5 * (1 + |x_i|).
 * Throws if the log density is not finite at x.
 */
Vector grad_or_finite_difference(const Target &target, const Vector &x);

/// Numerically stable log Phi(t) for the standard normal CDF.
double log_normal_cdf(double t);

/// Hazard phi(t)/Phi(t) of the standard normal, stable for very negative t.
double normal_hazard(double t);

/**
 * Reference sample set loaded from CSV: one point per row, comma separated,
 * '.' decimal, optional single header row.
 */
struct ReferenceSample {
  Matrix points;       // rows are samples
  std::string source;  // file path the set was read from
};

/**
 * Parses a reference-sample CSV. Raises std::runtime_error with the 1-based
 * line number on ragged rows, non-numeric or non-finite cells, and on files
 * with no data rows.
 */
ReferenceSample load_reference_samples(const std::string &path);

}  // namespace rlmh

#endif
