#include "polopt/mdp.hpp"

#include <cmath>
#include <string>

namespace polopt {

namespace {

constexpr double kProbTol = 1e-12;

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

/// Solve Ax = b with a dense LU and reject numerically singular systems.
Eigen::VectorXd solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const char* context) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(b);
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if (!x.allFinite() || (a * x - b).lpNorm<Eigen::Infinity>() > 1e-8 * scale)
    throw SingularSystem(std::string(context) + ": linear system is numerically singular");
  return x;
}

}  // namespace

TabularMdp::TabularMdp(std::vector<Eigen::MatrixXd> transition, Eigen::MatrixXd reward,
                       Eigen::VectorXd rho0)
    : transition_(std::move(transition)), reward_(std::move(reward)), rho0_(std::move(rho0)) {
  const int n = static_cast<int>(reward_.rows());
  const int na = static_cast<int>(reward_.cols());
  if (n < 1 || na < 1) throw ValidationError("TabularMdp: need at least one state and action");
  if (static_cast<int>(transition_.size()) != na)
    throw ValidationError("TabularMdp: transition must have one matrix per action");
  check_finite(reward_, "reward");
  for (int a = 0; a < na; ++a) {
    const Eigen::MatrixXd& p = transition_[a];
    if (p.rows() != n || p.cols() != n)
      throw ValidationError("TabularMdp: transition matrix for action " + std::to_string(a) +
                            " has wrong shape");
    check_finite(p, "transition");
    for (int s = 0; s < n; ++s) {
      if (p.row(s).minCoeff() < 0.0)
        throw ValidationError("TabularMdp: negative transition probability at (s=" +
                              std::to_string(s) + ", a=" + std::to_string(a) + ")");
      if (std::abs(p.row(s).sum() - 1.0) > kProbTol)
        throw ValidationError("TabularMdp: transition row (s=" + std::to_string(s) +
                              ", a=" + std::to_string(a) + ") does not sum to 1");
    }
  }
  if (rho0_.size() != n) throw ValidationError("TabularMdp: rho0 has wrong length");
  if (rho0_.minCoeff() < 0.0) throw ValidationError("TabularMdp: rho0 has a negative entry");
  if (std::abs(rho0_.sum() - 1.0) > kProbTol)
    throw ValidationError("TabularMdp: rho0 does not sum to 1");
}

bool TabularMdp::is_absorbing_zero_reward(int s) const {
  for (int a = 0; a < n_actions(); ++a) {
    if (std::abs(transition_[a](s, s) - 1.0) > kProbTol) return false;
    if (std::abs(reward_(s, a)) > kProbTol) return false;
  }
  return true;
}

SoftmaxPolicy::SoftmaxPolicy(Eigen::MatrixXd logits) : logits_(std::move(logits)) {
  check_finite(logits_, "logits");
  probs_.resizeLike(logits_);
  for (int s = 0; s < logits_.rows(); ++s) {
    const Eigen::RowVectorXd shifted = logits_.row(s).array() - logits_.row(s).maxCoeff();
    const Eigen::RowVectorXd expd = shifted.array().exp();
    probs_.row(s) = expd / expd.sum();
  }
}

Eigen::VectorXd SoftmaxPolicy::theta() const {
  Eigen::VectorXd out(logits_.size());
  for (int s = 0; s < logits_.rows(); ++s)
    out.segment(s * logits_.cols(), logits_.cols()) = logits_.row(s);
  return out;
}

SoftmaxPolicy SoftmaxPolicy::from_theta(const Eigen::VectorXd& theta, int n_states,
                                        int n_actions) {
  if (theta.size() != static_cast<Eigen::Index>(n_states) * n_actions)
    throw ValidationError("SoftmaxPolicy: theta length does not match (n_states, n_actions)");
  Eigen::MatrixXd logits(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) logits.row(s) = theta.segment(s * n_actions, n_actions);
  return SoftmaxPolicy(std::move(logits));
}

SoftmaxPolicy SoftmaxPolicy::perturbed(const Eigen::VectorXd& delta) const {
  return from_theta(theta() + delta, n_states(), n_actions());
}

DeterministicTablePolicy::DeterministicTablePolicy(Eigen::VectorXi action_of, int n_actions)
    : action_of_(std::move(action_of)), n_actions_(n_actions) {
  for (int s = 0; s < action_of_.size(); ++s)
    if (action_of_(s) < 0 || action_of_(s) >= n_actions_)
      throw ValidationError("DeterministicTablePolicy: action index out of range at state " +
                            std::to_string(s));
}

Eigen::MatrixXd action_probabilities(const SoftmaxPolicy& policy) { return policy.probs(); }

Eigen::MatrixXd action_probabilities(const DeterministicTablePolicy& policy) {
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(policy.n_states(), policy.n_actions());
  for (int s = 0; s < policy.n_states(); ++s) pi(s, policy.action(s)) = 1.0;
  return pi;
}

Eigen::MatrixXd induced_transition(const TabularMdp& mdp, const Eigen::MatrixXd& pi) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mdp.n_states(), mdp.n_states());
  for (int a = 0; a < mdp.n_actions(); ++a)
    p += pi.col(a).asDiagonal() * mdp.transition(a);
  return p;
}

Eigen::VectorXd induced_reward(const TabularMdp& mdp, const Eigen::MatrixXd& pi) {
  return (pi.array() * mdp.reward().array()).rowwise().sum();
}

bool is_ergodic(const Eigen::MatrixXd& chain) {
  const int n = static_cast<int>(chain.rows());
  Eigen::MatrixXd lazy = 0.5 * (chain + Eigen::MatrixXd::Identity(n, n));
  // Square repeatedly until the exponent reaches at least 4n.
  int exponent = 1;
  Eigen::MatrixXd power = lazy;
  while (exponent < 4 * n) {
    power = power * power;
    exponent *= 2;
  }
  return power.minCoeff() > 1e-12;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& chain) {
  const int n = static_cast<int>(chain.rows());
  Eigen::MatrixXd bordered(n + 1, n);
  bordered.topRows(n) = chain.transpose() - Eigen::MatrixXd::Identity(n, n);
  bordered.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd nu = bordered.colPivHouseholderQr().solve(rhs);
  if (!nu.allFinite() ||
      (chain.transpose() * nu - nu).lpNorm<Eigen::Infinity>() > 1e-10 ||
      std::abs(nu.sum() - 1.0) > 1e-10)
    throw SingularSystem("stationary_distribution: bordered system did not yield a fixed point");
  return nu;
}

namespace {

ValueBundle discounted_values(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                              const Setup& setup) {
  const int n = mdp.n_states();
  const double gamma = setup.gamma;
  const Eigen::MatrixXd p = induced_transition(mdp, pi);
  const Eigen::VectorXd r = induced_reward(mdp, pi);
  Eigen::VectorXd v(n);

  if (gamma < 1.0) {
    v = solve_checked(Eigen::MatrixXd::Identity(n, n) - gamma * p, r, "value_functions");
  } else {
    // Total-reward setup: absorbing zero-reward states pin V = 0 and the
    // transient block is solved on its own.
    std::vector<int> transient;
    bool has_terminal = false;
    for (int s = 0; s < n; ++s) {
      if (mdp.is_absorbing_zero_reward(s))
        has_terminal = true;
      else
        transient.push_back(s);
    }
    if (!has_terminal)
      throw ValidationError(
          "value_functions: gamma = 1 requires an absorbing zero-reward terminal state");
    const int nt = static_cast<int>(transient.size());
    Eigen::MatrixXd ptt(nt, nt);
    Eigen::VectorXd rt(nt);
    for (int i = 0; i < nt; ++i) {
      rt(i) = r(transient[i]);
      for (int j = 0; j < nt; ++j) ptt(i, j) = p(transient[i], transient[j]);
    }
    v.setZero();
    if (nt > 0) {
      const Eigen::VectorXd vt =
          solve_checked(Eigen::MatrixXd::Identity(nt, nt) - ptt, rt, "value_functions(gamma=1)");
      for (int i = 0; i < nt; ++i) v(transient[i]) = vt(i);
    }
  }

  ValueBundle bundle;
  bundle.setup = setup;
  bundle.v = v;
  bundle.q.resize(n, mdp.n_actions());
  for (int a = 0; a < mdp.n_actions(); ++a)
    bundle.q.col(a) = mdp.reward().col(a) + gamma * (mdp.transition(a) * v);
  bundle.adv = bundle.q.colwise() - v;
  bundle.objective = mdp.rho0().dot(v);
  return bundle;
}

ValueBundle average_values(const TabularMdp& mdp, const Eigen::MatrixXd& pi, const Setup& setup) {
  const int n = mdp.n_states();
  const Eigen::MatrixXd p = induced_transition(mdp, pi);
  if (!is_ergodic(p))
    throw NonErgodicChain("value_functions: induced chain is not irreducible and aperiodic");
  const Eigen::VectorXd r = induced_reward(mdp, pi);
  const Eigen::VectorXd nu = stationary_distribution(p);
  const double gain = nu.dot(r);

  // (I - P + 1 nu^T) v = r - J 1 gives the unique bias with nu^T v = 0.
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - p;
  system.noalias() += Eigen::VectorXd::Ones(n) * nu.transpose();
  const Eigen::VectorXd v =
      solve_checked(system, r - gain * Eigen::VectorXd::Ones(n), "value_functions(average)");

  ValueBundle bundle;
  bundle.setup = setup;
  bundle.v = v;
  bundle.q.resize(n, mdp.n_actions());
  for (int a = 0; a < mdp.n_actions(); ++a)
    bundle.q.col(a) = mdp.reward().col(a).array() - gain + (mdp.transition(a) * v).array();
  bundle.adv = bundle.q.colwise() - v;
  bundle.objective = gain;
  return bundle;
}

}  // namespace

ValueBundle value_functions(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                            const Setup& setup) {
  return setup.is_discounted() ? discounted_values(mdp, pi, setup)
                               : average_values(mdp, pi, setup);
}

ValueBundle value_functions(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                            const Setup& setup) {
  return value_functions(mdp, action_probabilities(policy), setup);
}

ValueBundle value_functions(const TabularMdp& mdp, const DeterministicTablePolicy& policy,
                            const Setup& setup) {
  return value_functions(mdp, action_probabilities(policy), setup);
}

double objective(const TabularMdp& mdp, const Eigen::MatrixXd& pi, const Setup& setup) {
  return value_functions(mdp, pi, setup).objective;
}

double objective(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Setup& setup) {
  return objective(mdp, action_probabilities(policy), setup);
}

double objective(const TabularMdp& mdp, const DeterministicTablePolicy& policy,
                 const Setup& setup) {
  return objective(mdp, action_probabilities(policy), setup);
}

Eigen::VectorXd grad_log_pi(const SoftmaxPolicy& policy, int s, int a) {
  const int na = policy.n_actions();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.n_states() * na);
  grad.segment(s * na, na) = -policy.probs().row(s);
  grad(s * na + a) += 1.0;
  return grad;
}

TabularMdp terminalize(const TabularMdp& mdp, int terminal_state) {
  if (terminal_state < 0 || terminal_state >= mdp.n_states())
    throw ValidationError("terminalize: terminal_state out of range");
  std::vector<Eigen::MatrixXd> transition = mdp.transitions();
  Eigen::MatrixXd reward = mdp.reward();
  for (int a = 0; a < mdp.n_actions(); ++a) {
    transition[a].row(terminal_state).setZero();
    transition[a](terminal_state, terminal_state) = 1.0;
    reward(terminal_state, a) = 0.0;
  }
  return TabularMdp(std::move(transition), std::move(reward), mdp.rho0());
}

}  // namespace polopt
