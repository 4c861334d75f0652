#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "polopt/mdp.hpp"
#include "polopt/measures.hpp"
#include "polopt/oracle.hpp"
#include "polopt/random_instances.hpp"

using namespace polopt;

namespace {

TabularMdp one_state_mdp(double reward) {
  std::vector<Eigen::MatrixXd> p = {Eigen::MatrixXd::Ones(1, 1)};
  Eigen::MatrixXd r(1, 1);
  r << reward;
  Eigen::VectorXd rho0 = Eigen::VectorXd::Ones(1);
  return TabularMdp(std::move(p), r, std::move(rho0));
}

// Deterministic 2-state cycle s0 -> s1 -> s0 with rewards (0, 2).
TabularMdp two_state_cycle() {
  Eigen::MatrixXd p(2, 2);
  p << 0, 1, 1, 0;
  std::vector<Eigen::MatrixXd> trans = {p};
  Eigen::MatrixXd r(2, 1);
  r << 0, 2;
  Eigen::VectorXd rho0(2);
  rho0 << 0.5, 0.5;
  return TabularMdp(std::move(trans), r, std::move(rho0));
}

Eigen::MatrixXd single_action_policy(int n) { return Eigen::MatrixXd::Ones(n, 1); }

}  // namespace

TEST_CASE("single-state value functions in both setups") {
  const TabularMdp mdp = one_state_mdp(1.0);
  const Eigen::MatrixXd pi = single_action_policy(1);

  const ValueBundle disc = value_functions(mdp, pi, Setup::discounted(0.9));
  CHECK(disc.objective == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(disc.v(0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(std::abs(disc.adv(0, 0)) < 1e-10);

  const ValueBundle avg = value_functions(mdp, pi, Setup::average());
  CHECK(avg.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(avg.v(0)) < 1e-10);
}

TEST_CASE("two-state cycle has average reward 1") {
  const TabularMdp mdp = two_state_cycle();
  CHECK(objective(mdp, single_action_policy(2), Setup::average()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discounted values match the truncated power series") {
  const TabularMdp mdp = random_mdp(0, 5, 3);
  const SoftmaxPolicy policy = random_softmax_policy(0, 5, 3);
  const Eigen::MatrixXd pi = policy.probs();
  const double gamma = 0.9;
  const ValueBundle bundle = value_functions(mdp, pi, Setup::discounted(gamma));

  const Eigen::MatrixXd p = induced_transition(mdp, pi);
  const Eigen::VectorXd r = induced_reward(mdp, pi);
  Eigen::VectorXd series = Eigen::VectorXd::Zero(5);
  Eigen::VectorXd term = r;
  double weight = 1.0;
  for (int k = 0; k < 10000; ++k) {
    series += weight * term;
    term = p * term;
    weight *= gamma;
  }
  CHECK((bundle.v - series).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("value bundle invariants hold on a random instance") {
  const TabularMdp mdp = random_mdp(7, 6, 3);
  const SoftmaxPolicy policy = random_softmax_policy(7, 6, 3);
  const Eigen::MatrixXd pi = policy.probs();
  const Eigen::MatrixXd p = induced_transition(mdp, pi);
  const Eigen::VectorXd r = induced_reward(mdp, pi);

  SUBCASE("discounted Bellman residual") {
    const ValueBundle b = value_functions(mdp, pi, Setup::discounted(0.9));
    CHECK((b.v - r - 0.9 * p * b.v).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((b.adv - (b.q.colwise() - b.v)).lpNorm<Eigen::Infinity>() == 0.0);
    for (int s = 0; s < 6; ++s) CHECK(std::abs(pi.row(s).dot(b.adv.row(s))) < 1e-10);
  }
  SUBCASE("average Bellman residual and bias normalization") {
    const ValueBundle b = value_functions(mdp, pi, Setup::average());
    CHECK((b.v.array() + b.objective - (r + p * b.v).array()).abs().maxCoeff() < 1e-10);
    const Eigen::VectorXd nu = stationary_distribution(p);
    CHECK(std::abs(nu.dot(b.v)) < 1e-10);
  }
}

TEST_CASE("softmax policy invariants") {
  const SoftmaxPolicy policy = random_softmax_policy(2, 4, 3);
  for (int s = 0; s < 4; ++s) {
    CHECK(policy.probs().row(s).sum() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::VectorXd mixture = Eigen::VectorXd::Zero(12);
    for (int a = 0; a < 3; ++a) mixture += policy.probs()(s, a) * grad_log_pi(policy, s, a);
    CHECK(mixture.lpNorm<Eigen::Infinity>() < 1e-10);
  }

  SUBCASE("uniform two-action score") {
    const SoftmaxPolicy uniform(Eigen::MatrixXd::Zero(1, 2));
    const Eigen::VectorXd score = grad_log_pi(uniform, 0, 0);
    CHECK(score(0) == doctest::Approx(0.5));
    CHECK(score(1) == doctest::Approx(-0.5));
  }

  SUBCASE("score matches finite differences of log pi") {
    const int s = 1, a = 2;
    const Eigen::VectorXd exact = grad_log_pi(policy, s, a);
    const Eigen::VectorXd fd = oracle::finite_difference(
        [&](const Eigen::VectorXd& theta) {
          return std::log(SoftmaxPolicy::from_theta(theta, 4, 3).probs()(s, a));
        },
        policy.theta(), 1e-6);
    CHECK((exact - fd).lpNorm<Eigen::Infinity>() < 1e-7);
  }
}

TEST_CASE("terminalize enables the total-reward setup") {
  // 3-state chain s0 -> s1 -> s2 with unit rewards; s2 terminal.
  Eigen::MatrixXd p(3, 3);
  p << 0, 1, 0, 0, 0, 1, 0, 0, 1;
  std::vector<Eigen::MatrixXd> trans = {p};
  Eigen::MatrixXd r = Eigen::MatrixXd::Ones(3, 1);
  Eigen::VectorXd rho0(3);
  rho0 << 1, 0, 0;
  const TabularMdp chain = terminalize(TabularMdp(std::move(trans), r, std::move(rho0)), 2);

  CHECK(chain.is_absorbing_zero_reward(2));
  CHECK(objective(chain, single_action_policy(3), Setup::discounted(1.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));

  SUBCASE("idempotent") {
    const TabularMdp twice = terminalize(chain, 2);
    CHECK((twice.reward() - chain.reward()).lpNorm<Eigen::Infinity>() == 0.0);
    for (int a = 0; a < chain.n_actions(); ++a)
      CHECK((twice.transition(a) - chain.transition(a)).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("gamma -> 1 continuity on a random episodic instance") {
    const TabularMdp episodic = random_episodic_mdp(3, 5, 2);
    const SoftmaxPolicy policy = random_softmax_policy(3, 5, 2);
    const double total = objective(episodic, policy, Setup::discounted(1.0));
    const double nearly = objective(episodic, policy, Setup::discounted(0.999999));
    CHECK(std::abs(total - nearly) < 1e-3 * std::max(1.0, std::abs(total)));
  }
}

TEST_CASE("ergodicity certificate") {
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(is_ergodic(swap));  // periodic but irreducible; the lazy chain mixes
  CHECK_FALSE(is_ergodic(Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("construction and setup validation") {
  std::vector<Eigen::MatrixXd> bad = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(TabularMdp(bad, r, Eigen::VectorXd::Ones(1)), ValidationError);
  CHECK_THROWS_AS(Setup::discounted(0.0), ValidationError);
  CHECK_THROWS_AS(Setup::discounted(1.5), ValidationError);

  // gamma = 1 without an absorbing zero-reward state is rejected.
  const TabularMdp mdp = one_state_mdp(1.0);
  CHECK_THROWS_AS(value_functions(mdp, single_action_policy(1), Setup::discounted(1.0)),
                  ValidationError);

  // Average setup on a reducible chain is rejected.
  Eigen::MatrixXd frozen = Eigen::MatrixXd::Identity(2, 2);
  std::vector<Eigen::MatrixXd> trans = {frozen};
  Eigen::VectorXd rho0(2);
  rho0 << 0.5, 0.5;
  const TabularMdp reducible(trans, Eigen::MatrixXd::Ones(2, 1), rho0);
  CHECK_THROWS_AS(value_functions(reducible, single_action_policy(2), Setup::average()),
                  NonErgodicChain);
}

TEST_CASE("scaled discounted objective converges to the average objective") {
  const TabularMdp mdp = random_mdp(1, 4, 2);
  const SoftmaxPolicy policy = random_softmax_policy(1, 4, 2);
  const double j_mu = objective(mdp, policy, Setup::average());

  double prev_gap = std::numeric_limits<double>::infinity();
  for (double gamma : {0.9, 0.99, 0.999, 0.9999}) {
    const double gap =
        std::abs((1.0 - gamma) * objective(mdp, policy, Setup::discounted(gamma)) - j_mu);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-3 * std::max(1.0, std::abs(j_mu)));

  SUBCASE("gamma = 0.99 coarse agreement") {
    const double j99 = (1.0 - 0.99) * objective(mdp, policy, Setup::discounted(0.99));
    CHECK(std::abs(j99 - j_mu) < 0.05 * std::abs(j_mu));
  }
}
