#ifndef RLMH_TYPES_HPP
#define RLMH_TYPES_HPP

#include <Eigen/Dense>
#include <random>

namespace rlmh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/**
 * Uniform draw on the open interval (0, 1).
 *
 * Built directly from the engine's 64-bit output so that samplers depending
 * on it never see an exact 0 or 1 (log(u) and inverse CDFs stay finite).
 */
inline double uniform01(Rng &rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw.
inline double normal01(Rng &rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

/// Vector of i.i.d. standard normals.
inline Vector normal_vector(int dim, Rng &rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector z(dim);
  for (int i = 0; i < dim; ++i) z(i) = dist(rng);
  return z;
}

}  // namespace rlmh

#endif
