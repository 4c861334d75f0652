#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "polopt/errors.hpp"

namespace polopt {

/// Reward-aggregation setup. Total reward is represented as Discounted with
/// gamma = 1 on an MDP that has an absorbing zero-reward terminal state.
struct Setup {
  enum class Kind { Discounted, Average };

  Kind kind = Kind::Discounted;
  double gamma = 1.0;  // meaningful for Discounted only

  static Setup discounted(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw ValidationError("Setup: gamma must lie in (0, 1]");
    return Setup{Kind::Discounted, gamma};
  }
  static Setup average() { return Setup{Kind::Average, 1.0}; }

  bool is_discounted() const { return kind == Kind::Discounted; }
  bool is_average() const { return kind == Kind::Average; }
};

/// Finite MDP with dense transition kernel and tabular rewards.
/// Immutable after construction; the constructor validates all invariants.
class TabularMdp {
 public:
  /// transition[a] is the n_states x n_states row-stochastic matrix for
  /// action a; reward is n_states x n_actions; rho0 is the initial state
  /// distribution.
  TabularMdp(std::vector<Eigen::MatrixXd> transition, Eigen::MatrixXd reward,
             Eigen::VectorXd rho0);

  int n_states() const { return static_cast<int>(reward_.rows()); }
  int n_actions() const { return static_cast<int>(reward_.cols()); }

  const Eigen::MatrixXd& transition(int action) const { return transition_[action]; }
  double transition(int s, int a, int s_next) const { return transition_[a](s, s_next); }
  const std::vector<Eigen::MatrixXd>& transitions() const { return transition_; }
  const Eigen::MatrixXd& reward() const { return reward_; }
  const Eigen::VectorXd& rho0() const { return rho0_; }

  /// True if state s self-loops with probability 1 and zero reward under
  /// every action (the gamma = 1 total-reward gate).
  bool is_absorbing_zero_reward(int s) const;

 private:
  std::vector<Eigen::MatrixXd> transition_;
  Eigen::MatrixXd reward_;
  Eigen::VectorXd rho0_;
};

/// Tabular softmax policy parameterized by one logit per (state, action).
/// Theta coordinates are the logits flattened row-major (state-major).
class SoftmaxPolicy {
 public:
  explicit SoftmaxPolicy(Eigen::MatrixXd logits);

  int n_states() const { return static_cast<int>(logits_.rows()); }
  int n_actions() const { return static_cast<int>(logits_.cols()); }
  const Eigen::MatrixXd& logits() const { return logits_; }

  /// pi(a|s) as an n_states x n_actions matrix; rows sum to 1.
  const Eigen::MatrixXd& probs() const { return probs_; }

  /// Logits flattened row-major into a parameter vector.
  Eigen::VectorXd theta() const;
  static SoftmaxPolicy from_theta(const Eigen::VectorXd& theta, int n_states, int n_actions);

  /// Policy shifted by a row-major parameter increment.
  SoftmaxPolicy perturbed(const Eigen::VectorXd& delta) const;

 private:
  Eigen::MatrixXd logits_;
  Eigen::MatrixXd probs_;
};

/// Deterministic tabular policy: one action index per state.
class DeterministicTablePolicy {
 public:
  DeterministicTablePolicy(Eigen::VectorXi action_of, int n_actions);

  int n_states() const { return static_cast<int>(action_of_.size()); }
  int n_actions() const { return n_actions_; }
  int action(int s) const { return action_of_(s); }
  const Eigen::VectorXi& actions() const { return action_of_; }

 private:
  Eigen::VectorXi action_of_;
  int n_actions_;
};

/// V, Q, A and the scalar objective for one (policy, setup) pair.
struct ValueBundle {
  Eigen::VectorXd v;    // state values (discounted) or bias (average)
  Eigen::MatrixXd q;    // n_states x n_actions
  Eigen::MatrixXd adv;  // q - v, rowwise
  double objective = 0.0;
  Setup setup;
};

/// pi(a|s) matrices: the stochastic policy's rows, or one-hot rows for a
/// deterministic policy. All exact computations run off this representation.
Eigen::MatrixXd action_probabilities(const SoftmaxPolicy& policy);
Eigen::MatrixXd action_probabilities(const DeterministicTablePolicy& policy);

/// Policy-induced chain P^pi and per-state expected reward R^pi.
Eigen::MatrixXd induced_transition(const TabularMdp& mdp, const Eigen::MatrixXd& pi);
Eigen::VectorXd induced_reward(const TabularMdp& mdp, const Eigen::MatrixXd& pi);

/// Lazy-chain power positivity test: ((P + I)/2)^(4n) must be strictly
/// positive. Certifies irreducibility + aperiodicity without eigen-analysis.
bool is_ergodic(const Eigen::MatrixXd& chain);

/// Stationary distribution of an ergodic chain via the bordered linear
/// system [P^T - I; 1^T] nu = [0; 1].
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& chain);

/// Exact value functions via linear solves. Discounted: (I - gamma P) V = R.
/// Average: gain J = nu^T R and bias normalized so nu^T v = 0.
ValueBundle value_functions(const TabularMdp& mdp, const Eigen::MatrixXd& pi, const Setup& setup);
ValueBundle value_functions(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Setup& setup);
ValueBundle value_functions(const TabularMdp& mdp, const DeterministicTablePolicy& policy,
                            const Setup& setup);

/// rho0-weighted value (discounted) or the gain (average).
double objective(const TabularMdp& mdp, const Eigen::MatrixXd& pi, const Setup& setup);
double objective(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Setup& setup);
double objective(const TabularMdp& mdp, const DeterministicTablePolicy& policy, const Setup& setup);

/// Exact softmax score: d/dtheta[s',b] log pi(a|s) = 1{s'=s}(1{b=a} - pi(b|s)).
/// Returned flattened row-major over all theta coordinates.
Eigen::VectorXd grad_log_pi(const SoftmaxPolicy& policy, int s, int a);

/// Copy of the MDP where terminal_state absorbs with zero reward under all
/// actions, enabling the gamma = 1 total-reward setup.
TabularMdp terminalize(const TabularMdp& mdp, int terminal_state);

}  // namespace polopt
