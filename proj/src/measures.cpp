#include "polopt/measures.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace polopt {

namespace {

int sample_index(const Eigen::VectorXd& probs, double u) {
  double cum = 0.0;
  const int n = static_cast<int>(probs.size());
  for (int i = 0; i < n; ++i) {
    cum += probs(i);
    if (u < cum) return i;
  }
  return n - 1;  // guard against rounding at the top of the CDF
}

int sample_row(const Eigen::MatrixXd& m, int row, double u) {
  double cum = 0.0;
  const int n = static_cast<int>(m.cols());
  for (int i = 0; i < n; ++i) {
    cum += m(row, i);
    if (u < cum) return i;
  }
  return n - 1;
}

void append_double(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  out += buf;
}

}  // namespace

Measure stationary_measure(const TabularMdp& mdp, const Eigen::MatrixXd& pi) {
  const Eigen::MatrixXd p = induced_transition(mdp, pi);
  if (!is_ergodic(p))
    throw NonErgodicChain("stationary_measure: induced chain is not irreducible and aperiodic");
  Measure m;
  m.kind = Measure::Kind::Stationary;
  m.weights = stationary_distribution(p);
  return m;
}

Measure stationary_measure(const TabularMdp& mdp, const SoftmaxPolicy& policy) {
  return stationary_measure(mdp, action_probabilities(policy));
}

Measure stationary_measure(const TabularMdp& mdp, const DeterministicTablePolicy& policy) {
  return stationary_measure(mdp, action_probabilities(policy));
}

Measure discounted_measure(const TabularMdp& mdp, const Eigen::MatrixXd& pi, double gamma,
                           const Eigen::VectorXd& rho0) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ValidationError("discounted_measure: gamma must lie in (0, 1]");
  const int n = mdp.n_states();
  const Eigen::MatrixXd p = induced_transition(mdp, pi);

  Measure m;
  m.kind = Measure::Kind::Discounted;
  m.gamma = gamma;
  m.rho0 = rho0;
  m.weights.setZero(n);

  if (gamma < 1.0) {
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - gamma * p.transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    m.weights = lu.solve(rho0);
    if (!m.weights.allFinite() ||
        (system * m.weights - rho0).lpNorm<Eigen::Infinity>() > 1e-10)
      throw SingularSystem("discounted_measure: occupancy system is numerically singular");
  } else {
    // Total-reward occupancy on a terminalized MDP: the absorbing states
    // carry no mass, the transient block solves on its own.
    std::vector<int> transient;
    for (int s = 0; s < n; ++s)
      if (!mdp.is_absorbing_zero_reward(s)) transient.push_back(s);
    const int nt = static_cast<int>(transient.size());
    if (nt == n)
      throw ValidationError(
          "discounted_measure: gamma = 1 requires an absorbing zero-reward terminal state");
    if (nt > 0) {
      Eigen::MatrixXd ptt(nt, nt);
      Eigen::VectorXd rho_t(nt);
      for (int i = 0; i < nt; ++i) {
        rho_t(i) = rho0(transient[i]);
        for (int j = 0; j < nt; ++j) ptt(i, j) = p(transient[i], transient[j]);
      }
      Eigen::MatrixXd system = Eigen::MatrixXd::Identity(nt, nt) - ptt.transpose();
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
      Eigen::VectorXd nu_t = lu.solve(rho_t);
      if (!nu_t.allFinite() || (system * nu_t - rho_t).lpNorm<Eigen::Infinity>() > 1e-10)
        throw SingularSystem("discounted_measure: transient occupancy system is singular");
      for (int i = 0; i < nt; ++i) m.weights(transient[i]) = nu_t(i);
    }
  }
  return m;
}

Measure discounted_measure(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma,
                           const Eigen::VectorXd& rho0) {
  return discounted_measure(mdp, action_probabilities(policy), gamma, rho0);
}

Measure discounted_measure(const TabularMdp& mdp, const DeterministicTablePolicy& policy,
                           double gamma, const Eigen::VectorXd& rho0) {
  return discounted_measure(mdp, action_probabilities(policy), gamma, rho0);
}

Measure setup_measure(const TabularMdp& mdp, const Eigen::MatrixXd& pi, const Setup& setup) {
  return setup.is_discounted() ? discounted_measure(mdp, pi, setup.gamma, mdp.rho0())
                               : stationary_measure(mdp, pi);
}

Trajectory rollout(const TabularMdp& mdp, const Eigen::MatrixXd& pi, int horizon,
                   std::uint64_t seed) {
  if (horizon < 1) throw ValidationError("rollout: horizon must be >= 1");
  SplitMix64 rng(seed);
  Trajectory traj;
  traj.seed = seed;
  traj.horizon = horizon;
  traj.states.reserve(horizon + 1);
  traj.actions.reserve(horizon);
  traj.rewards.reserve(horizon);

  int s = sample_index(mdp.rho0(), rng.uniform());
  traj.states.push_back(s);
  for (int k = 0; k < horizon; ++k) {
    const int a = sample_row(pi, s, rng.uniform());
    traj.actions.push_back(a);
    traj.rewards.push_back(mdp.reward()(s, a));
    s = sample_row(mdp.transition(a), s, rng.uniform());
    traj.states.push_back(s);
  }
  return traj;
}

Trajectory rollout(const TabularMdp& mdp, const SoftmaxPolicy& policy, int horizon,
                   std::uint64_t seed) {
  return rollout(mdp, action_probabilities(policy), horizon, seed);
}

Trajectory rollout(const TabularMdp& mdp, const DeterministicTablePolicy& policy, int horizon,
                   std::uint64_t seed) {
  return rollout(mdp, action_probabilities(policy), horizon, seed);
}

std::vector<Trajectory> rollout_batch(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                                      int horizon, std::uint64_t seed, int n_trajectories) {
  std::vector<Trajectory> batch;
  batch.reserve(n_trajectories);
  for (int i = 0; i < n_trajectories; ++i)
    batch.push_back(rollout(mdp, pi, horizon, derive_stream(seed, i)));
  return batch;
}

int discounted_horizon(double gamma, double eps) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ValidationError("discounted_horizon: gamma must lie in (0, 1)");
  return static_cast<int>(std::ceil(std::log(eps * (1.0 - gamma)) / std::log(gamma)));
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "k,s,a,r\n";
  for (std::size_t k = 0; k < trajectory.actions.size(); ++k) {
    out += std::to_string(k) + ',' + std::to_string(trajectory.states[k]) + ',' +
           std::to_string(trajectory.actions[k]) + ',';
    append_double(out, trajectory.rewards[k]);
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const std::vector<Trajectory>& trajectories) {
  std::string out = "traj_id,k,s,a,r\n";
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& t = trajectories[i];
    for (std::size_t k = 0; k < t.actions.size(); ++k) {
      out += std::to_string(i) + ',' + std::to_string(k) + ',' + std::to_string(t.states[k]) +
             ',' + std::to_string(t.actions[k]) + ',';
      append_double(out, t.rewards[k]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace polopt
