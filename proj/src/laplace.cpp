#include <rlmh/laplace.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlmh {

CovarianceFactor factorize(const Matrix &sigma) {
  const auto n = sigma.rows();
  if (n == 0 || sigma.cols() != n)
    throw std::invalid_argument("factorize: covariance must be square and non-empty");
  const double scale = sigma.cwiseAbs().maxCoeff();
  if (!sigma.allFinite())
    throw std::invalid_argument("factorize: covariance has non-finite entries");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1.0))
    throw std::invalid_argument("factorize: covariance is not symmetric");

  // Unblocked Cholesky so a failure can name its pivot.
  Matrix L = Matrix::Zero(n, n);
  double log_det_half = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = sigma(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0))
      throw std::invalid_argument(
          "factorize: matrix is not positive definite (pivot " + std::to_string(j) + ")");
    L(j, j) = std::sqrt(d);
    log_det_half += std::log(L(j, j));
    for (Eigen::Index i = j + 1; i < n; ++i)
      L(i, j) = (sigma(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return CovarianceFactor{std::move(L), log_det_half};
}

double norm1_sigma(const CovarianceFactor &factor, const Vector &v) {
  if (v.size() != factor.dim())
    throw std::invalid_argument("norm1_sigma: dimension mismatch");
  return factor.L.triangularView<Eigen::Lower>().solve(v).lpNorm<1>();
}

double proposal_log_density(const CovarianceFactor &factor, const Vector &mean,
                            const Vector &y) {
  static const double log2 = std::log(2.0);
  return -norm1_sigma(factor, y - mean) - factor.dim() * log2 - factor.log_det_half;
}

Matrix jittered_spd(const Matrix &sigma) {
  const double mean_diag = sigma.diagonal().mean();
  const double jitter = 1e-6 * (mean_diag > 0.0 ? mean_diag : 1.0);
  return sigma + jitter * Matrix::Identity(sigma.rows(), sigma.cols());
}

Vector proposal_sample(const CovarianceFactor &factor, const Vector &mean,
                       Rng &rng) {
  const int d = factor.dim();
  if (mean.size() != d)
    throw std::invalid_argument("proposal_sample: dimension mismatch");
  Vector z(d);
  for (int i = 0; i < d; ++i) {
    // Standard Laplace by inverse CDF; uniform01 never returns 0 or 1.
    const double u = uniform01(rng);
    z(i) = u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
  }
  return mean + factor.L.triangularView<Eigen::Lower>() * z;
}

}  // namespace rlmh
