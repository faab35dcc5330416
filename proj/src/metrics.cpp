#include <rlmh/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rlmh {

double esjd(const Matrix &path) {
  const auto n = path.rows();
  if (n < 2) throw std::invalid_argument("esjd: need at least two states");
  double acc = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    acc += (path.row(i) - path.row(i - 1)).squaredNorm();
  return acc / static_cast<double>(n - 1);
}

double median_heuristic(const Matrix &points) {
  const auto m = points.rows();
  if (m < 2) throw std::invalid_argument("median_heuristic: need at least two points");
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(m) * (m - 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      dists.push_back((points.row(i) - points.row(j)).norm());
  // Lower median: element at index (k-1)/2 of the sorted distances.
  const size_t mid = (dists.size() - 1) / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  const double median = dists[mid];
  return median > 0.0 ? 0.5 * median : 1.0;
}

double gaussian_kernel(const Vector &x, const Vector &y, double lengthscale) {
  if (!(lengthscale > 0.0))
    throw std::invalid_argument("gaussian_kernel: lengthscale must be positive");
  return std::exp(-(x - y).squaredNorm() / (lengthscale * lengthscale));
}

double mmd(const Matrix &sample_p, const Matrix &sample_q, double lengthscale) {
  const auto m = sample_p.rows();
  const auto n = sample_q.rows();
  if (m == 0 || n == 0) throw std::invalid_argument("mmd: empty sample set");
  if (sample_p.cols() != sample_q.cols())
    throw std::invalid_argument("mmd: sample dimensions differ");
  if (!(lengthscale > 0.0)) throw std::invalid_argument("mmd: lengthscale must be positive");
  const double inv_ls2 = 1.0 / (lengthscale * lengthscale);

  // Row-blocked accumulation keeps memory O(max(m, n)) on large sets.
  auto self_sum = [inv_ls2](const Matrix &s) {
    double acc = static_cast<double>(s.rows());  // diagonal terms of the V-statistic
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      const auto diff = s.bottomRows(s.rows() - i - 1).rowwise() - s.row(i);
      acc += 2.0 * (-diff.rowwise().squaredNorm() * inv_ls2).array().exp().sum();
    }
    return acc;
  };
  double cross = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto diff = sample_q.rowwise() - sample_p.row(i);
    cross += (-diff.rowwise().squaredNorm() * inv_ls2).array().exp().sum();
  }
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  const double v = self_sum(sample_p) / (md * md) - 2.0 * cross / (md * nd) +
                   self_sum(sample_q) / (nd * nd);
  return std::sqrt(std::max(0.0, v));
}

double acceptance_rate(const std::vector<int> &accept_flags) {
  if (accept_flags.empty())
    throw std::invalid_argument("acceptance_rate: empty flag vector");
  double acc = 0.0;
  for (int f : accept_flags) acc += f ? 1.0 : 0.0;
  return acc / static_cast<double>(accept_flags.size());
}

}  // namespace rlmh
