#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <rlmh/phi_mh.hpp>
#include <rlmh/policy.hpp>

using namespace rlmh;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}

// Random-walk action: both proposal means sit at the matching state, so the
// proposal-density terms cancel and acceptance reduces to the plain ratio.
MdpAction rw_action(const MdpState &s) { return {s.current, s.proposed}; }

}  // namespace

TEST_CASE("random walk acceptance on a standard gaussian") {
  const Target t = make_gaussian(vec1(0.0), Matrix::Identity(1, 1));
  const CovarianceFactor f = factorize(Matrix::Identity(1, 1));
  const MdpState s{vec1(0.0), vec1(1.0)};
  // log alpha = logp(1) - logp(0) = -1/2
  CHECK(acceptance_log_prob(t, f, s, rw_action(s)) == doctest::Approx(-0.5).epsilon(1e-14));
  // uphill move is accepted surely
  const MdpState down{vec1(1.0), vec1(0.0)};
  CHECK(acceptance_log_prob(t, f, down, rw_action(down)) == 0.0);
}

TEST_CASE("self transition is accepted surely") {
  const Target t = make_gaussian(vec1(0.3), Matrix::Identity(1, 1) * 2.0);
  const CovarianceFactor f = factorize(Matrix::Identity(1, 1));
  const MdpState s{vec1(0.7), vec1(0.7)};
  CHECK(acceptance_log_prob(t, f, s, rw_action(s)) == 0.0);
}

TEST_CASE("asymmetric proposal means shift the acceptance ratio") {
  const Target t = make_gaussian(vec1(0.0), Matrix::Identity(1, 1));
  const CovarianceFactor f = factorize(Matrix::Identity(1, 1));
  const MdpState s{vec1(0.0), vec1(1.0)};
  // log alpha = min(0, -1/2 - |cur - mean_prop| + |prop - mean_cur|)

  // both means at the current point: -1/2 - 0 + 1 caps at 0
  CHECK(acceptance_log_prob(t, f, s, {vec1(0.0), vec1(0.0)}) == 0.0);
  // both means at the proposed point: -1/2 - 1 + 0
  CHECK(acceptance_log_prob(t, f, s, {vec1(1.0), vec1(1.0)}) ==
        doctest::Approx(-1.5).epsilon(1e-14));
  // equidistant means: the proposal terms cancel
  CHECK(acceptance_log_prob(t, f, s, {vec1(0.5), vec1(0.5)}) ==
        doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("impossible proposals are never accepted and bad states throw") {
  Target t = make_gaussian(vec1(0.0), Matrix::Identity(1, 1));
  const CovarianceFactor f = factorize(Matrix::Identity(1, 1));
  Target truncated = t;
  truncated.log_density = [&](const Vector &x) {
    return x(0) < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
  };
  const MdpState s{vec1(1.0), vec1(-1.0)};
  CHECK(acceptance_log_prob(truncated, f, s, rw_action(s)) ==
        -std::numeric_limits<double>::infinity());
  const MdpState bad{vec1(-1.0), vec1(1.0)};
  CHECK_THROWS_AS(acceptance_log_prob(truncated, f, bad, rw_action(bad)),
                  std::invalid_argument);
}

TEST_CASE("reward is the log jump area plus log acceptance, floored") {
  const MdpState s{vec1(0.0), vec1(2.0)};
  // 2 log 2 + 0
  CHECK(reward(s, 0.0) == doctest::Approx(1.3862943611198906).epsilon(1e-14));
  CHECK(reward(s, -1.0) == doctest::Approx(1.3862943611198906 - 1.0).epsilon(1e-14));
  // zero jump or vanishing acceptance hits the floor
  const MdpState self{vec1(1.0), vec1(1.0)};
  CHECK(reward(self, 0.0) == kRewardFloor);
  CHECK(reward(s, -1e9) == kRewardFloor);
  CHECK(reward(s, -std::numeric_limits<double>::infinity()) == kRewardFloor);
}

TEST_CASE("environment step acceptance matches the nominal probability") {
  // Craft log alpha = log(0.30) exactly: uniform target ratio via linear logp.
  Target t;
  t.dim = 1;
  t.label = "synthetic";
  const double la = std::log(0.30);
  t.log_density = [la](const Vector &x) { return x(0) * la; };
  const CovarianceFactor f = factorize(Matrix::Identity(1, 1));
  Rng rng(77);
  int accepted = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const MdpState s{vec1(0.0), vec1(1.0)};  // ratio p(1)/p(0) = 0.30
    const StepResult r = env_step(t, f, s, rw_action(s), rng);
    CHECK(r.log_alpha == doctest::Approx(la).epsilon(1e-12));
    accepted += r.accepted ? 1 : 0;
    // the surviving point of the next state matches the accept flag
    CHECK(r.next.current(0) == (r.accepted ? 1.0 : 0.0));
  }
  CHECK(accepted / double(n) == doctest::Approx(0.30).epsilon(0.02));
}

TEST_CASE("environment draws the next proposal from the surviving mean") {
  const Target t = make_gaussian(vec1(0.0), Matrix::Identity(1, 1));
  const CovarianceFactor f = factorize(Matrix::Identity(1, 1) * 1e-12);
  // tiny proposal noise: the next proposal lands on the action mean. The
  // reverse density q(cur | mean_prop) is astronomically small, so the move
  // is rejected surely and the surviving point is the current one.
  const MdpState s{vec1(0.0), vec1(1.0)};
  const MdpAction a{vec1(1.0), vec1(5.0)};
  Rng rng(5);
  const StepResult r = env_step(t, f, s, a, rng);
  CHECK_FALSE(r.accepted);
  CHECK(r.next.current(0) == 0.0);
  CHECK(r.next.proposed(0) == doctest::Approx(1.0).epsilon(1e-5));

  // flip the means and the same move is accepted surely
  const MdpAction b{vec1(5.0), vec1(0.0)};
  const StepResult r2 = env_step(t, f, s, b, rng);
  CHECK(r2.accepted);
  CHECK(r2.next.current(0) == 1.0);
  CHECK(r2.next.proposed(0) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("detailed balance holds for the frozen kernel") {
  Rng rng(11);
  Matrix sigma(2, 2);
  sigma << 1.5, 0.4, 0.4, 1.0;
  const Target t = make_gaussian(Vector::Zero(2), sigma);
  Policy p = make_policy(Vector::Zero(2), sigma, 8);
  glorot_init(p.net, rng);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector x = 3.0 * normal_vector(2, rng);
    const Vector y = 3.0 * normal_vector(2, rng);
    const MdpState fwd{x, y};
    const MdpAction a_fwd{phi_map(p, x), phi_map(p, y)};
    const MdpState bwd{y, x};
    const MdpAction a_bwd{phi_map(p, y), phi_map(p, x)};
    const double lhs = t.log_density(x) +
                       proposal_log_density(p.factor, a_fwd.mean_current, y) +
                       acceptance_log_prob(t, p.factor, fwd, a_fwd);
    const double rhs = t.log_density(y) +
                       proposal_log_density(p.factor, a_bwd.mean_current, x) +
                       acceptance_log_prob(t, p.factor, bwd, a_bwd);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("frozen chain invariants") {
  Rng rng(21);
  const Target t = make_gaussian(Vector::Zero(2), Matrix::Identity(2, 2));
  Policy p = make_policy(Vector::Zero(2), Matrix::Identity(2, 2), 8);
  glorot_init(p.net, rng);
  const ChainResult run = mh_chain(t, p, Vector::Zero(2), 200, rng);
  REQUIRE(run.path.rows() == 201);
  REQUIRE(run.accepts.size() == 200);
  REQUIRE(run.rewards.size() == 200);
  REQUIRE(run.log_alphas.size() == 200);
  CHECK(run.path.row(0).norm() == 0.0);
  for (int i = 0; i < 200; ++i) {
    // rejected steps keep the state
    if (!run.accepts[i])
      CHECK((run.path.row(i + 1) - run.path.row(i)).norm() == 0.0);
    CHECK(run.log_alphas[i] <= 0.0);
    CHECK(run.rewards[i] >= kRewardFloor);
  }
  // a frozen chain on a unimodal target should move at least sometimes
  int moves = 0;
  for (int flag : run.accepts) moves += flag;
  CHECK(moves > 10);
}
