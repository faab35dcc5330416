#include <rlmh/amala.hpp>

#include <cmath>
#include <stdexcept>

namespace rlmh {

namespace {

Vector drift(const Vector &v, const Target &target, double epsilon,
             const CovarianceFactor &factor) {
  const Vector g = grad_or_finite_difference(target, v);
  return v + epsilon * (factor.L * (factor.L.transpose() * g));
}

}  // namespace

bool mala_step(Vector &x, const Target &target, double epsilon,
               const CovarianceFactor &factor, Rng &rng) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("mala_step: epsilon must be positive");
  const double lp_x = target.log_density(x);
  if (!std::isfinite(lp_x))
    throw std::invalid_argument("mala_step: log density at current point not finite");
  const Vector nu_x = drift(x, target, epsilon, factor);
  if (!nu_x.allFinite())
    throw std::invalid_argument("mala_step: drift at current point not finite");

  const Vector noise = factor.L.triangularView<Eigen::Lower>() * normal_vector(factor.dim(), rng);
  const Vector proposal = nu_x + std::sqrt(2.0 * epsilon) * noise;
  const double lp_prop = target.log_density(proposal);
  bool accepted = false;
  if (std::isfinite(lp_prop)) {
    Vector nu_prop;
    try {
      nu_prop = drift(proposal, target, epsilon, factor);
    } catch (const std::invalid_argument &) {
      nu_prop.resize(0);  // gradient unusable at the proposal: reject
    }
    if (nu_prop.size() > 0 && nu_prop.allFinite()) {
      auto whitened = [&factor](const Vector &v) {
        return factor.L.triangularView<Eigen::Lower>().solve(v).squaredNorm();
      };
      const double log_ratio = lp_prop - lp_x +
                               (-whitened(x - nu_prop) + whitened(proposal - nu_x)) /
                                   (4.0 * epsilon);
      accepted = std::log(uniform01(rng)) < std::min(0.0, log_ratio);
    }
  }
  if (accepted) x = proposal;
  return accepted;
}

MalaRun mala_run(const Target &target, double epsilon, const CovarianceFactor &factor,
                 const Vector &x0, long n_steps, Rng &rng) {
  if (n_steps < 1) throw std::invalid_argument("mala_run: need at least one step");
  MalaRun run;
  run.path.resize(n_steps + 1, x0.size());
  run.path.row(0) = x0.transpose();
  run.accepts.reserve(n_steps);
  Vector x = x0;
  for (long n = 0; n < n_steps; ++n) {
    run.accepts.push_back(mala_step(x, target, epsilon, factor, rng) ? 1 : 0);
    run.path.row(n + 1) = x.transpose();
  }
  return run;
}

AmalaRun amala_run(const AmalaConfig &config, const Target &target, Rng &rng,
                   const Vector *x0) {
  if (config.epochs < 1) throw std::invalid_argument("amala_run: need at least one epoch");
  if (config.warm_epoch_len < 1 || config.final_epoch_len < 1)
    throw std::invalid_argument("amala_run: epoch lengths must be positive");
  const int d = target.dim;

  AmalaRun out;
  Vector x = x0 ? *x0 : Vector::Zero(d);
  double epsilon = config.epsilon0;
  Matrix sigma = Matrix::Identity(d, d);

  for (int e = 0; e < config.epochs; ++e) {
    const bool last = (e + 1 == config.epochs);
    const long len = last ? config.final_epoch_len : config.warm_epoch_len;
    const CovarianceFactor factor = factorize(jittered_spd(sigma));
    const MalaRun epoch = mala_run(target, epsilon, factor, x, len, rng);
    x = epoch.path.row(len).transpose();

    // Moved-state fraction: with a continuous target this matches the accept
    // count, and it is the quantity the scale recursion tracks.
    long moved = 0;
    for (long n = 1; n <= len; ++n)
      if (epoch.path.row(n) != epoch.path.row(n - 1)) ++moved;
    const double rho = static_cast<double>(moved) / static_cast<double>(len);
    out.epoch_accept_rates.push_back(rho);

    if (last) {
      out.final_path = epoch.path;
      out.final_accepts = epoch.accepts;
      out.final_epsilon = epsilon;
      out.final_sigma = jittered_spd(sigma);
      out.final_x = x;
    } else {
      epsilon *= std::exp(rho - config.target_accept);
      if (len > 1) {
        const Matrix states = epoch.path.bottomRows(len);
        const Vector mean = states.colwise().mean().transpose();
        const Matrix centred = states.rowwise() - mean.transpose();
        const Matrix cov = centred.transpose() * centred / static_cast<double>(len - 1);
        sigma = config.blend * sigma + (1.0 - config.blend) * cov;
      }
    }
  }
  return out;
}

}  // namespace rlmh
