#include <rlmh/arwmh.hpp>

#include <cmath>
#include <stdexcept>

#include <rlmh/laplace.hpp>

namespace rlmh {

double adaptation_gain(long n, double beta) {
  return 0.5 / std::pow(static_cast<double>(n + 1), beta);
}

ArwmhState make_arwmh_state(int dim) {
  ArwmhState s;
  s.x = Vector::Zero(dim);
  s.mu = Vector::Zero(dim);
  s.sigma = Matrix::Identity(dim, dim);
  return s;
}

bool arwmh_step(ArwmhState &state, const Target &target, double beta, bool adapt,
                Rng &rng) {
  const double lp_x = target.log_density(state.x);
  if (!std::isfinite(lp_x))
    throw std::invalid_argument("arwmh_step: log density at current point not finite");

  const CovarianceFactor factor = factorize(jittered_spd(state.sigma));
  const double scale = std::exp(0.5 * state.log_lambda);
  const Vector step = factor.L.triangularView<Eigen::Lower>() * normal_vector(factor.dim(), rng);
  const Vector proposal = state.x + scale * step;

  const double lp_prop = target.log_density(proposal);
  const double log_alpha = std::min(0.0, lp_prop - lp_x);
  const bool accepted = std::log(uniform01(rng)) < log_alpha;
  if (accepted) state.x = proposal;

  if (adapt) {
    const double gain = adaptation_gain(state.iter, beta);
    const double alpha = std::exp(log_alpha);  // acceptance probability, not the flag
    state.log_lambda += gain * (alpha - 0.234);
    const Vector delta = state.x - state.mu;  // against the pre-update mean
    state.mu += gain * delta;
    state.sigma += gain * (delta * delta.transpose() - state.sigma);
    ++state.iter;
  }
  return accepted;
}

ArwmhRun arwmh_run(const Target &target, long n_steps, double beta, Rng &rng,
                   const ArwmhState *start, bool adapt) {
  if (n_steps < 1) throw std::invalid_argument("arwmh_run: need at least one step");
  ArwmhRun run;
  run.final_state = start ? *start : make_arwmh_state(target.dim);
  run.path.resize(n_steps + 1, target.dim);
  run.path.row(0) = run.final_state.x.transpose();
  run.accepts.reserve(n_steps);
  for (long n = 0; n < n_steps; ++n) {
    run.accepts.push_back(arwmh_step(run.final_state, target, beta, adapt, rng) ? 1 : 0);
    run.path.row(n + 1) = run.final_state.x.transpose();
  }
  return run;
}

WarmStart warm_start(const Target &target, long m, double beta, Rng &rng) {
  if (m < 3) throw std::invalid_argument("warm_start: need at least three steps");
  const ArwmhRun run = arwmh_run(target, m, beta, rng);

  const long k = (m + 2) / 3;  // ceil(m/3)
  const Matrix tail = run.path.bottomRows(k);
  WarmStart warm;
  warm.x0 = run.final_state.x;
  warm.mean = tail.colwise().mean().transpose();
  const Matrix centred = tail.rowwise() - warm.mean.transpose();
  warm.sigma = jittered_spd(centred.transpose() * centred / static_cast<double>(k - 1));
  factorize(warm.sigma);  // degenerate even after jitter -> propagate the error now
  warm.samples = run.path.bottomRows(m);  // every post-start state
  return warm;
}

}  // namespace rlmh
