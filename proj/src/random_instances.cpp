#include "polopt/random_instances.hpp"

#include <cmath>
#include <vector>

#include "polopt/rng.hpp"

namespace polopt {

namespace {

Eigen::MatrixXd random_matrix(SplitMix64& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::VectorXd random_distribution(SplitMix64& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = 0.05 + rng.uniform();
  return v / v.sum();
}

}  // namespace

TabularMdp random_mdp(std::uint64_t seed, int n_states, int n_actions) {
  SplitMix64 rng(derive_stream(seed, 0));
  std::vector<Eigen::MatrixXd> transition(n_actions);
  for (int a = 0; a < n_actions; ++a) {
    transition[a].resize(n_states, n_states);
    for (int s = 0; s < n_states; ++s)
      transition[a].row(s) = random_distribution(rng, n_states).transpose();
  }
  Eigen::MatrixXd reward(n_states, n_actions);
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) reward(s, a) = 2.0 * rng.uniform() - 1.0;
  return TabularMdp(std::move(transition), std::move(reward), random_distribution(rng, n_states));
}

TabularMdp random_episodic_mdp(std::uint64_t seed, int n_states, int n_actions,
                               double exit_prob) {
  SplitMix64 rng(derive_stream(seed, 1));
  const int terminal = n_states - 1;
  std::vector<Eigen::MatrixXd> transition(n_actions);
  for (int a = 0; a < n_actions; ++a) {
    transition[a].resize(n_states, n_states);
    for (int s = 0; s < n_states; ++s) {
      Eigen::VectorXd row = (1.0 - exit_prob) * random_distribution(rng, n_states);
      row(terminal) += exit_prob;
      transition[a].row(s) = row.transpose();
    }
  }
  Eigen::MatrixXd reward(n_states, n_actions);
  for (int s = 0; s < n_states; ++s)
    for (int a = 0; a < n_actions; ++a) reward(s, a) = 2.0 * rng.uniform() - 1.0;
  Eigen::VectorXd rho0 = random_distribution(rng, n_states);
  // Do not start in the terminal state.
  rho0(terminal) = 0.0;
  rho0 /= rho0.sum();
  TabularMdp mdp(std::move(transition), std::move(reward), std::move(rho0));
  return terminalize(mdp, terminal);
}

SoftmaxPolicy random_softmax_policy(std::uint64_t seed, int n_states, int n_actions) {
  SplitMix64 rng(derive_stream(seed, 2));
  return SoftmaxPolicy(random_matrix(rng, n_states, n_actions));
}

lqr::LqrProblem benchmark_lqr_problem(double alpha) {
  Eigen::MatrixXd a(2, 2);
  a << 0.9, 0.1, 0.0, 1.1;
  a *= alpha;
  Eigen::MatrixXd b(2, 1);
  b << 0.0, 1.0;
  return lqr::LqrProblem(a, b, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2),
                         Eigen::MatrixXd::Identity(1, 1));
}

lqr::LqrProblem random_lqr_problem(std::uint64_t seed, int n, int m) {
  SplitMix64 rng(derive_stream(seed, 3));
  Eigen::MatrixXd a = random_matrix(rng, n, n);
  const double radius =
      Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 1e-12) a *= 0.9 / std::max(radius, 0.9);
  Eigen::MatrixXd b = random_matrix(rng, n, m);
  const auto random_spd = [&](int dim, double floor) {
    Eigen::MatrixXd root = random_matrix(rng, dim, dim);
    return (root * root.transpose() / dim + floor * Eigen::MatrixXd::Identity(dim, dim)).eval();
  };
  return lqr::LqrProblem(a, b, random_spd(n, 0.1), random_spd(n, 0.1), random_spd(m, 0.1));
}

lqr::LqrGains random_stable_gains(const lqr::LqrProblem& problem, const Setup& setup,
                                  std::uint64_t seed) {
  SplitMix64 rng(derive_stream(seed, 4));
  for (int attempt = 0; attempt < 200; ++attempt) {
    const double scale = 0.5 * std::pow(0.8, attempt / 10);
    lqr::LqrGains gains(scale * random_matrix(rng, problem.m(), problem.n()));
    if (lqr::is_stable(problem, gains, setup)) return gains;
  }
  // Problems from random_lqr_problem have rho(A) <= 0.9, so K = 0 works.
  lqr::LqrGains zero(Eigen::MatrixXd::Zero(problem.m(), problem.n()));
  if (!lqr::is_stable(problem, zero, setup))
    throw UnstableGains("random_stable_gains: could not find stable gains");
  return zero;
}

}  // namespace polopt
