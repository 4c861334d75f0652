#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "polopt/measures.hpp"
#include "polopt/optimizers.hpp"
#include "polopt/oracle.hpp"
#include "polopt/random_instances.hpp"

using namespace polopt;

TEST_CASE("finite differences") {
  SUBCASE("linear functions are recovered exactly") {
    Eigen::VectorXd c(3);
    c << 1.0, -2.0, 0.5;
    const Eigen::VectorXd grad = oracle::finite_difference(
        [&](const Eigen::VectorXd& x) { return c.dot(x); }, Eigen::VectorXd::Zero(3));
    CHECK((grad - c).lpNorm<Eigen::Infinity>() < 1e-10);
  }
  SUBCASE("stationary point of a quadratic") {
    const Eigen::VectorXd grad = oracle::finite_difference(
        [](const Eigen::VectorXd& x) { return x.squaredNorm(); }, Eigen::VectorXd::Zero(4));
    CHECK(grad.lpNorm<Eigen::Infinity>() < 1e-10);
  }
  SUBCASE("central-difference error shrinks quadratically in h") {
    // Quadratics are exact under central differences, so probe a smooth
    // non-quadratic function instead.
    Eigen::VectorXd x(2);
    x << 0.3, -0.7;
    const auto f = [](const Eigen::VectorXd& v) { return std::sin(v(0)) + std::sin(2.0 * v(1)); };
    Eigen::VectorXd exact(2);
    exact << std::cos(x(0)), 2.0 * std::cos(2.0 * x(1));

    double prev = std::numeric_limits<double>::infinity();
    for (double h : {1e-1, 1e-2, 1e-3}) {
      const double err = (oracle::finite_difference(f, x, h) - exact).lpNorm<Eigen::Infinity>();
      CHECK(err < prev);
      // Each decade in h should buy roughly two decades of accuracy.
      if (std::isfinite(prev)) CHECK(err < 0.05 * prev);
      prev = err;
    }
  }
}

TEST_CASE("deterministic policy enumeration") {
  SUBCASE("bandit picks the dominant arm") {
    std::vector<Eigen::MatrixXd> trans = {Eigen::MatrixXd::Ones(1, 1),
                                          Eigen::MatrixXd::Ones(1, 1)};
    Eigen::MatrixXd r(1, 2);
    r << 1.0, 0.0;
    const TabularMdp bandit(trans, r, Eigen::VectorXd::Ones(1));
    const auto [policy, value] =
        oracle::enumerate_deterministic_optimum(bandit, Setup::discounted(0.9));
    CHECK(policy.action(0) == 0);
    CHECK(value == doctest::Approx(10.0).epsilon(1e-12));
  }

  SUBCASE("ties resolve to the lexicographically first policy") {
    const TabularMdp flat(
        std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Identity(2, 2).eval(),
                                     Eigen::MatrixXd::Identity(2, 2).eval()},
        Eigen::MatrixXd::Ones(2, 2), Eigen::VectorXd::Constant(2, 0.5));
    const auto [policy, value] =
        oracle::enumerate_deterministic_optimum(flat, Setup::discounted(0.5));
    CHECK(policy.action(0) == 0);
    CHECK(policy.action(1) == 0);
    CHECK(value == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("agrees with policy iteration on random instances") {
    for (std::uint64_t seed : {20u, 21u, 22u}) {
      const TabularMdp mdp = random_mdp(seed, 4, 3);
      for (const Setup& setup : {Setup::discounted(0.9), Setup::average()}) {
        const auto [policy, value] = oracle::enumerate_deterministic_optimum(mdp, setup);
        DeterministicTablePolicy current =
            policy_iteration_step(mdp, random_softmax_policy(seed, 4, 3), setup);
        for (int iter = 0; iter < 100; ++iter) {
          const DeterministicTablePolicy next = policy_iteration_step(mdp, current, setup);
          if (next.actions() == current.actions()) break;
          current = next;
        }
        const double reached = objective(mdp, action_probabilities(current), setup);
        CHECK(std::abs(reached - value) < 1e-9 * std::max(1.0, std::abs(value)));
      }
    }
  }

  SUBCASE("search-space guard") {
    const TabularMdp big = random_mdp(1, 12, 8);  // 8^12 policies
    CHECK_THROWS_AS(oracle::enumerate_deterministic_optimum(big, Setup::discounted(0.9)),
                    TooLarge);
  }
}

TEST_CASE("estimator bias study") {
  SUBCASE("single-state MDP leaves nothing to confuse") {
    std::vector<Eigen::MatrixXd> trans = {Eigen::MatrixXd::Ones(1, 1),
                                          Eigen::MatrixXd::Ones(1, 1)};
    Eigen::MatrixXd r(1, 2);
    r << 1.0, 0.0;
    const TabularMdp mdp(trans, r, Eigen::VectorXd::Ones(1));
    const SoftmaxPolicy policy(Eigen::MatrixXd::Zero(1, 2));
    const oracle::BiasStudy study = oracle::estimator_bias_study(mdp, policy, 0.7, 400, 2000, 3);
    CHECK(study.correct.verdict == oracle::BiasVerdict::MatchesExact);
    CHECK(study.correct.n_samples == 400);
  }

  SUBCASE("too few paths are rejected") {
    const TabularMdp mdp = random_mdp(15, 4, 2);
    const SoftmaxPolicy policy = random_softmax_policy(15, 4, 2);
    CHECK_THROWS_AS(oracle::estimator_bias_study(mdp, policy, 0.7, 50, 1000, 0), ValidationError);
  }

  SUBCASE("verdict strings") {
    CHECK(std::string(oracle::to_string(oracle::BiasVerdict::MatchesExact)) == "MatchesExact");
    CHECK(std::string(oracle::to_string(oracle::BiasVerdict::MatchesMixed)) == "MatchesMixed");
  }
}

TEST_CASE("Abel limit study") {
  const std::vector<double> grid = {0.9, 0.99, 0.999, 0.9999};

  SUBCASE("constant reward has identically zero gap") {
    std::vector<Eigen::MatrixXd> trans = {Eigen::MatrixXd::Ones(1, 1)};
    const TabularMdp mdp(trans, Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Ones(1));
    for (const oracle::AbelRow& row : oracle::abel_limit_study(mdp, Eigen::MatrixXd::Ones(1, 1), grid)) {
      CHECK(row.scaled_discounted == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(row.average == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(row.gap < 1e-10);
    }
  }

  SUBCASE("symmetric two-state cycle agrees at every gamma") {
    Eigen::MatrixXd p(2, 2);
    p << 0, 1, 1, 0;
    Eigen::MatrixXd r(2, 1);
    r << 0, 2;
    Eigen::VectorXd rho0 = Eigen::VectorXd::Constant(2, 0.5);
    const TabularMdp cycle(std::vector<Eigen::MatrixXd>{p}, r, rho0);
    for (const oracle::AbelRow& row :
         oracle::abel_limit_study(cycle, Eigen::MatrixXd::Ones(2, 1), grid)) {
      // Starting uniformly, the reward stream averages to 1 at every horizon.
      CHECK(row.scaled_discounted == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(row.gap < 1e-10);
    }
  }

  SUBCASE("random instance: gap is monotone and vanishes in the limit") {
    const TabularMdp mdp = random_mdp(22, 5, 3);
    const SoftmaxPolicy policy = random_softmax_policy(22, 5, 3);
    const std::vector<oracle::AbelRow> rows = oracle::abel_limit_study(mdp, policy, grid);
    REQUIRE(rows.size() == grid.size());
    double prev = std::numeric_limits<double>::infinity();
    for (const oracle::AbelRow& row : rows) {
      CHECK(row.gamma > 0.0);
      CHECK(row.gap < prev);
      prev = row.gap;
    }
    CHECK(rows.back().gap < 1e-3 * std::max(1.0, std::abs(rows.back().average)));
  }
}
