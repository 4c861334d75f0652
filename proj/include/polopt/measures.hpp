#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

#include "polopt/errors.hpp"
#include "polopt/mdp.hpp"
#include "polopt/rng.hpp"

namespace polopt {

/// A nonnegative weight per state. Stationary measures sum to 1; discounted
/// occupancy measures sum to 1/(1 - gamma).
struct Measure {
  enum class Kind { Stationary, Discounted };

  Eigen::VectorXd weights;
  Kind kind = Kind::Stationary;
  double gamma = 1.0;        // Discounted only
  Eigen::VectorXd rho0;      // Discounted only: start distribution
};

/// Sampled path through an MDP: states has horizon + 1 entries, actions and
/// rewards have horizon entries.
struct Trajectory {
  std::vector<int> states;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::uint64_t seed = 0;
  int horizon = 0;
};

/// Invariant measure of the policy-induced chain.
Measure stationary_measure(const TabularMdp& mdp, const Eigen::MatrixXd& pi);
Measure stationary_measure(const TabularMdp& mdp, const SoftmaxPolicy& policy);
Measure stationary_measure(const TabularMdp& mdp, const DeterministicTablePolicy& policy);

/// Discounted occupancy measure: (I - gamma P^T) nu = rho0. gamma = 1 is
/// allowed on terminalized MDPs, with absorbing zero-reward states excluded
/// from mass accounting.
Measure discounted_measure(const TabularMdp& mdp, const Eigen::MatrixXd& pi, double gamma,
                           const Eigen::VectorXd& rho0);
Measure discounted_measure(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma,
                           const Eigen::VectorXd& rho0);
Measure discounted_measure(const TabularMdp& mdp, const DeterministicTablePolicy& policy,
                           double gamma, const Eigen::VectorXd& rho0);

/// The measure matching a setup: stationary for Average, occupancy (started
/// from the MDP's rho0) for Discounted.
Measure setup_measure(const TabularMdp& mdp, const Eigen::MatrixXd& pi, const Setup& setup);

/// sum_s nu(s) sum_a pi(a|s) f(s, a). Deterministic policies contribute
/// f(s, pi(s)) through their one-hot rows.
template <class F>
auto space_average(const Measure& measure, const Eigen::MatrixXd& pi, F&& f) {
  using R = std::decay_t<decltype(f(0, 0))>;
  std::optional<R> total;
  for (int s = 0; s < measure.weights.size(); ++s) {
    for (int a = 0; a < pi.cols(); ++a) {
      const double w = measure.weights(s) * pi(s, a);
      if (w == 0.0) continue;
      R term = w * f(s, a);
      if (total)
        *total += term;
      else
        total = std::move(term);
    }
  }
  if (!total) throw ValidationError("space_average: measure and policy have no joint support");
  return *total;
}

/// Seeded sample path. Deterministic given (mdp, pi, horizon, seed); s0 is
/// drawn from rho0.
Trajectory rollout(const TabularMdp& mdp, const Eigen::MatrixXd& pi, int horizon,
                   std::uint64_t seed);
Trajectory rollout(const TabularMdp& mdp, const SoftmaxPolicy& policy, int horizon,
                   std::uint64_t seed);
Trajectory rollout(const TabularMdp& mdp, const DeterministicTablePolicy& policy, int horizon,
                   std::uint64_t seed);

/// Batch of rollouts; trajectory i uses the stream derive_stream(seed, i).
std::vector<Trajectory> rollout_batch(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                                      int horizon, std::uint64_t seed, int n_trajectories);

/// Horizon making the discounted truncation bias at most eps * ||g||_inf:
/// T(gamma, eps) = ceil(log(eps (1 - gamma)) / log gamma).
int discounted_horizon(double gamma, double eps = 1e-8);

/// Time-based estimator over the sampled decision steps of each trajectory.
/// Discounted: mean of sum_k gamma^k g(s_k, a_k). Average: mean of
/// (1/H) sum_k g(s_k, a_k) with H the number of steps. Every time-based
/// estimator in the project routes through this aggregation; the known-wrong
/// hybrid estimators pass discounted-setup integrands with Average
/// aggregation.
template <class G>
auto time_estimate(const std::vector<Trajectory>& trajectories, G&& g, const Setup& setup) {
  using R = std::decay_t<decltype(g(0, 0))>;
  if (trajectories.empty()) throw EmptyBatch("time_estimate: empty trajectory batch");
  std::optional<R> total;
  for (const Trajectory& traj : trajectories) {
    const std::size_t steps = traj.actions.size();
    std::optional<R> path_sum;
    double weight = 1.0;
    for (std::size_t k = 0; k < steps; ++k) {
      R term = weight * g(traj.states[k], traj.actions[k]);
      if (path_sum)
        *path_sum += term;
      else
        path_sum = std::move(term);
      if (setup.is_discounted()) weight *= setup.gamma;
    }
    if (!path_sum) throw EmptyBatch("time_estimate: trajectory with zero steps");
    if (setup.is_average()) *path_sum *= 1.0 / static_cast<double>(steps);
    if (total)
      *total += *path_sum;
    else
      total = std::move(*path_sum);
  }
  *total *= 1.0 / static_cast<double>(trajectories.size());
  return *total;
}

/// CSV dump: columns k,s,a,r (single trajectory) or traj_id,k,s,a,r (batch).
std::string trajectory_csv(const Trajectory& trajectory);
std::string trajectory_csv(const std::vector<Trajectory>& trajectories);

}  // namespace polopt
