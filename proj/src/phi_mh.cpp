#include <rlmh/phi_mh.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rlmh {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double acceptance_log_prob(const Target &target, const CovarianceFactor &factor,
                           const MdpState &state, const MdpAction &action) {
  const double lp_current = target.log_density(state.current);
  if (!std::isfinite(lp_current))
    throw std::invalid_argument("acceptance_log_prob: log density at current point not finite");
  const double lp_proposed = target.log_density(state.proposed);
  if (std::isnan(lp_proposed))
    throw std::invalid_argument("acceptance_log_prob: log density at proposed point is NaN");
  if (lp_proposed == kNegInf) return kNegInf;

  const double ratio = lp_proposed - lp_current +
                       proposal_log_density(factor, action.mean_proposed, state.current) -
                       proposal_log_density(factor, action.mean_current, state.proposed);
  return std::min(0.0, ratio);
}

double reward(const MdpState &state, double log_alpha) {
  const double jump = (state.current - state.proposed).norm();
  const double r = 2.0 * std::log(jump) + log_alpha;  // log(0) and -inf clamp below
  return std::max(kRewardFloor, r);
}

StepResult env_step(const Target &target, const CovarianceFactor &factor,
                    const MdpState &state, const MdpAction &action, Rng &rng) {
  StepResult out;
  out.log_alpha = acceptance_log_prob(target, factor, state, action);
  out.reward = reward(state, out.log_alpha);
  out.accepted = std::log(uniform01(rng)) < out.log_alpha;
  const Vector &x_next = out.accepted ? state.proposed : state.current;
  const Vector &mean_next = out.accepted ? action.mean_proposed : action.mean_current;
  out.next.current = x_next;
  out.next.proposed = proposal_sample(factor, mean_next, rng);
  return out;
}

ChainResult mh_chain(const Target &target, const Policy &policy, const Vector &x0,
                     long n_steps, Rng &rng) {
  if (n_steps < 1) throw std::invalid_argument("mh_chain: need at least one step");
  const int d = static_cast<int>(x0.size());
  ChainResult result;
  result.path.resize(n_steps + 1, d);
  result.accepts.reserve(n_steps);
  result.rewards.reserve(n_steps);
  result.log_alphas.reserve(n_steps);

  MdpState s;
  MdpAction a;
  s.current = x0;
  a.mean_current = phi_map(policy, x0);
  s.proposed = proposal_sample(policy.factor, a.mean_current, rng);
  a.mean_proposed = phi_map(policy, s.proposed);
  result.path.row(0) = x0.transpose();

  for (long n = 0; n < n_steps; ++n) {
    const StepResult step = env_step(target, policy.factor, s, a, rng);
    result.path.row(n + 1) = step.next.current.transpose();
    result.accepts.push_back(step.accepted ? 1 : 0);
    result.rewards.push_back(step.reward);
    result.log_alphas.push_back(step.log_alpha);
    // The policy is frozen, so the mean at the surviving component carries
    // over; only the fresh proposal needs a map evaluation.
    a.mean_current = step.accepted ? a.mean_proposed : a.mean_current;
    s = step.next;
    a.mean_proposed = phi_map(policy, s.proposed);
  }
  return result;
}

}  // namespace rlmh
