#include "polopt/oracle.hpp"

#include <cmath>

#include "polopt/measures.hpp"
#include "polopt/optimizers.hpp"

namespace polopt::oracle {

namespace {

BiasVerdict classify(const Eigen::VectorXd& mean, const Eigen::VectorXd& exact,
                     const Eigen::VectorXd& mixed, const Eigen::VectorXd& se) {
  const auto within = [&](const Eigen::VectorXd& target, double sigmas) {
    return ((mean - target).cwiseAbs().array() <= sigmas * se.array() + 1e-12).all();
  };
  const bool far_from_exact =
      ((mean - exact).cwiseAbs().array() > 5.0 * se.array()).any();
  if (within(exact, 3.0)) return BiasVerdict::MatchesExact;
  if (within(mixed, 3.0) && far_from_exact) return BiasVerdict::MatchesMixed;
  return BiasVerdict::Inconclusive;
}

BiasReport make_report(const std::vector<Eigen::VectorXd>& samples,
                       const Eigen::VectorXd& exact, const Eigen::VectorXd& mixed) {
  const int n = static_cast<int>(samples.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(exact.size());
  for (const Eigen::VectorXd& s : samples) mean += s;
  mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(exact.size());
  for (const Eigen::VectorXd& s : samples) var += (s - mean).cwiseAbs2();
  var /= std::max(1, n - 1);

  BiasReport report;
  report.estimator_mean = mean;
  report.exact_target = exact;
  report.mixed_target = mixed;
  report.standard_error = (var / n).cwiseSqrt();
  report.n_samples = n;
  report.verdict = classify(mean, exact, mixed, report.standard_error);
  return report;
}

}  // namespace

std::pair<DeterministicTablePolicy, double> enumerate_deterministic_optimum(
    const TabularMdp& mdp, const Setup& setup) {
  const int n = mdp.n_states();
  const int na = mdp.n_actions();
  double count = std::pow(static_cast<double>(na), n);
  if (count > 4096.0)
    throw TooLarge("enumerate_deterministic_optimum: more than 4096 deterministic policies");

  Eigen::VectorXi actions = Eigen::VectorXi::Zero(n);
  std::optional<std::pair<DeterministicTablePolicy, double>> best;
  const long total = static_cast<long>(count);
  for (long index = 0; index < total; ++index) {
    try {
      DeterministicTablePolicy policy(actions, na);
      const double value = objective(mdp, policy, setup);
      if (!best || value > best->second + 1e-12)  // strict: keeps lexicographic first on ties
        best = {policy, value};
    } catch (const NonErgodicChain&) {
      // Policy violates the setup's precondition; not a candidate.
    }
    // Lexicographic increment: last state's action varies fastest.
    for (int s = n - 1; s >= 0; --s) {
      if (++actions(s) < na) break;
      actions(s) = 0;
    }
  }
  if (!best)
    throw NonErgodicChain("enumerate_deterministic_optimum: no policy satisfies the setup");
  return *best;
}

BiasStudy estimator_bias_study(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma,
                               int n_paths, int horizon, std::uint64_t seed) {
  if (n_paths < 100) throw ValidationError("estimator_bias_study: n_paths must be >= 100");
  const Eigen::MatrixXd pi = policy.probs();
  const Setup discounted = Setup::discounted(gamma);
  const ValueBundle values = value_functions(mdp, pi, discounted);

  const Eigen::VectorXd exact = policy_gradient(mdp, policy, discounted).grad;
  const Eigen::VectorXd mixed = incorrect::mixed_measure_gradient(mdp, policy, gamma);

  // Common random numbers: both estimators consume the same trajectories.
  const int correct_horizon = std::min(horizon, discounted_horizon(gamma));
  const auto integrand = [&](int s, int a) -> Eigen::VectorXd {
    return grad_log_pi(policy, s, a) * values.q(s, a);
  };

  std::vector<Eigen::VectorXd> correct_samples, hybrid_samples;
  correct_samples.reserve(n_paths);
  hybrid_samples.reserve(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    const Trajectory traj = rollout(mdp, pi, horizon, derive_stream(seed, i));
    Eigen::VectorXd discounted_sum = Eigen::VectorXd::Zero(exact.size());
    Eigen::VectorXd plain_sum = Eigen::VectorXd::Zero(exact.size());
    double weight = 1.0;
    for (int k = 0; k < horizon; ++k) {
      const Eigen::VectorXd term = integrand(traj.states[k], traj.actions[k]);
      if (k < correct_horizon) discounted_sum += weight * term;
      plain_sum += term;
      weight *= gamma;
    }
    correct_samples.push_back(discounted_sum);
    hybrid_samples.push_back(plain_sum / horizon);
  }

  BiasStudy study;
  study.correct = make_report(correct_samples, exact, mixed);
  study.hybrid = make_report(hybrid_samples, exact, mixed);
  return study;
}

std::vector<AbelRow> abel_limit_study(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                                      const std::vector<double>& gamma_grid) {
  const double j_mu = objective(mdp, pi, Setup::average());
  std::vector<AbelRow> rows;
  rows.reserve(gamma_grid.size());
  for (double gamma : gamma_grid) {
    AbelRow row;
    row.gamma = gamma;
    row.scaled_discounted = (1.0 - gamma) * objective(mdp, pi, Setup::discounted(gamma));
    row.average = j_mu;
    row.gap = std::abs(row.scaled_discounted - j_mu);
    rows.push_back(row);
  }
  return rows;
}

std::vector<AbelRow> abel_limit_study(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                      const std::vector<double>& gamma_grid) {
  return abel_limit_study(mdp, action_probabilities(policy), gamma_grid);
}

const char* to_string(BiasVerdict verdict) {
  switch (verdict) {
    case BiasVerdict::MatchesExact: return "MatchesExact";
    case BiasVerdict::MatchesMixed: return "MatchesMixed";
    default: return "Inconclusive";
  }
}

}  // namespace polopt::oracle
