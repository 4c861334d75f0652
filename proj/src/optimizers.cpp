#include "polopt/optimizers.hpp"

#include <algorithm>
#include <cmath>

namespace polopt {

namespace {

/// Moore-Penrose pseudo-inverse applied to a vector for a symmetric PSD
/// matrix: eigenvalues below cutoff * max are treated as exactly zero.
Eigen::VectorXd psd_pinv_apply(const Eigen::MatrixXd& w, const Eigen::VectorXd& g,
                               double cutoff = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w);
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const double threshold = cutoff * std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd coeffs = eig.eigenvectors().transpose() * g;
  for (int i = 0; i < coeffs.size(); ++i)
    coeffs(i) = (vals(i) > threshold) ? coeffs(i) / vals(i) : 0.0;
  return eig.eigenvectors() * coeffs;
}

}  // namespace

double performance_difference(const TabularMdp& mdp, const Eigen::MatrixXd& pi_new,
                              const Eigen::MatrixXd& pi_old, const Setup& setup) {
  const ValueBundle old_values = value_functions(mdp, pi_old, setup);
  const Measure nu_new = setup_measure(mdp, pi_new, setup);
  return space_average(nu_new, pi_new,
                       [&](int s, int a) { return old_values.adv(s, a); });
}

double performance_difference(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                              const SoftmaxPolicy& pi_old, const Setup& setup) {
  return performance_difference(mdp, action_probabilities(pi_new),
                                action_probabilities(pi_old), setup);
}

DeterministicTablePolicy policy_iteration_step(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                                               const Setup& setup) {
  const ValueBundle values = value_functions(mdp, pi, setup);
  Eigen::VectorXi greedy(mdp.n_states());
  for (int s = 0; s < mdp.n_states(); ++s) {
    int best = 0;
    for (int a = 1; a < mdp.n_actions(); ++a)
      if (values.adv(s, a) > values.adv(s, best)) best = a;  // strict: lowest index wins ties
    greedy(s) = best;
  }
  return DeterministicTablePolicy(greedy, mdp.n_actions());
}

DeterministicTablePolicy policy_iteration_step(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                               const Setup& setup) {
  return policy_iteration_step(mdp, action_probabilities(policy), setup);
}

DeterministicTablePolicy policy_iteration_step(const TabularMdp& mdp,
                                               const DeterministicTablePolicy& policy,
                                               const Setup& setup) {
  return policy_iteration_step(mdp, action_probabilities(policy), setup);
}

GradientReport policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const Setup& setup) {
  const Eigen::MatrixXd pi = policy.probs();
  const ValueBundle values = value_functions(mdp, pi, setup);
  const Measure nu = setup_measure(mdp, pi, setup);
  const int na = policy.n_actions();

  // Per state s: nu(s) sum_a pi(a|s) (e_a - pi_row) Q(s,a)
  //            = nu(s) * pi_row .* (Q_row - pi_row . Q_row), i.e. pi .* A.
  GradientReport report;
  report.setup = setup;
  report.method = "Exact";
  report.grad.setZero(policy.n_states() * na);
  for (int s = 0; s < policy.n_states(); ++s) {
    const double v_bar = pi.row(s).dot(values.q.row(s));
    report.grad.segment(s * na, na) =
        nu.weights(s) * (pi.row(s).array() * (values.q.row(s).array() - v_bar)).matrix();
  }
  return report;
}

GradientReport policy_curvature(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                const Setup& setup) {
  const Eigen::MatrixXd pi = policy.probs();
  const Measure nu = setup_measure(mdp, pi, setup);
  const int na = policy.n_actions();
  const int dim = policy.n_states() * na;

  GradientReport report = policy_gradient(mdp, policy, setup);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, dim);
  for (int s = 0; s < policy.n_states(); ++s) {
    // sum_a pi_a (e_a - pi)(e_a - pi)^T = diag(pi) - pi pi^T, block per state.
    const Eigen::VectorXd row = pi.row(s).transpose();
    w.block(s * na, s * na, na, na) =
        nu.weights(s) * (Eigen::MatrixXd(row.asDiagonal()) - row * row.transpose());
  }
  report.curvature = 0.5 * (w + w.transpose());
  return report;
}

double kl_metric(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                 const SoftmaxPolicy& pi_old, const Setup& setup) {
  const Eigen::MatrixXd& p_new = pi_new.probs();
  const Eigen::MatrixXd& p_old = pi_old.probs();
  const Measure nu = setup_measure(mdp, p_old.matrix(), setup);
  double metric = 0.0;
  for (int s = 0; s < p_new.rows(); ++s) {
    double kl = 0.0;
    for (int a = 0; a < p_new.cols(); ++a) {
      if (p_new(s, a) == 0.0) continue;
      if (p_old(s, a) == 0.0)
        throw UnsupportedAction("kl_metric: pi_old has zero mass where pi_new is supported");
      kl += p_new(s, a) * std::log(p_new(s, a) / p_old(s, a));
    }
    metric += nu.weights(s) * kl;
  }
  return metric;
}

Eigen::VectorXd natural_gradient_step(const GradientReport& report,
                                      const TrustRegionConfig& config) {
  if (!report.curvature) throw ValidationError("natural_gradient_step: curvature missing");
  Eigen::MatrixXd w = *report.curvature;
  w.diagonal().array() += config.damping;
  return config.eta * psd_pinv_apply(w, report.grad);
}

Eigen::VectorXd trust_region_step(const GradientReport& report, const TrustRegionConfig& config) {
  if (!report.curvature) throw ValidationError("trust_region_step: curvature missing");
  Eigen::MatrixXd w = *report.curvature;
  w.diagonal().array() += config.damping;
  const Eigen::VectorXd direction = psd_pinv_apply(w, report.grad);
  const double quad = report.grad.dot(direction);
  if (quad <= 1e-14)
    throw DegenerateGradient("trust_region_step: g^T W^+ g vanishes");
  const Eigen::VectorXd step = std::sqrt(2.0 * config.rho / quad) * direction;
  if (step.dot(*report.curvature * step) > 2.0 * config.rho * (1.0 + 1e-6))
    throw Error("trust_region_step: metric constraint violated after the KKT step");
  return step;
}

double ppo_clip_surrogate(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                          const SoftmaxPolicy& pi_old, const Setup& setup, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ValidationError("ppo_clip_surrogate: epsilon must lie in (0, 1)");
  const Eigen::MatrixXd& p_new = pi_new.probs();
  const Eigen::MatrixXd& p_old = pi_old.probs();
  const ValueBundle values = value_functions(mdp, p_old.matrix(), setup);
  const Measure nu = setup_measure(mdp, p_old.matrix(), setup);

  double total = 0.0;
  for (int s = 0; s < p_new.rows(); ++s) {
    double inner = 0.0;
    for (int a = 0; a < p_new.cols(); ++a) {
      const double ratio = p_new(s, a) / p_old(s, a);
      const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
      const double adv = values.adv(s, a);
      inner += p_old(s, a) * std::min(ratio * adv, clipped * adv);
    }
    total += nu.weights(s) * inner;
  }
  return total;
}

Eigen::VectorXd ppo_clip_surrogate_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                                            const SoftmaxPolicy& pi_old, const Setup& setup,
                                            double epsilon) {
  const Eigen::MatrixXd& p_new = pi_new.probs();
  const Eigen::MatrixXd& p_old = pi_old.probs();
  const ValueBundle values = value_functions(mdp, p_old.matrix(), setup);
  const Measure nu = setup_measure(mdp, p_old.matrix(), setup);
  const int na = pi_new.n_actions();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(pi_new.n_states() * na);
  for (int s = 0; s < p_new.rows(); ++s) {
    for (int a = 0; a < na; ++a) {
      const double ratio = p_new(s, a) / p_old(s, a);
      const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
      const double adv = values.adv(s, a);
      // The clipped branch is flat in theta'; only the ratio branch moves.
      if (ratio * adv > clipped * adv) continue;
      const double weight = nu.weights(s) * adv * p_new(s, a);
      grad.segment(s * na, na) -= weight * p_new.row(s).transpose();
      grad(s * na + a) += weight;
    }
  }
  return grad;
}

SoftmaxPolicy ppo_clip_iterate(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const Setup& setup, double epsilon, int inner_steps,
                               double learning_rate) {
  SoftmaxPolicy current = policy;
  for (int step = 0; step < inner_steps; ++step) {
    const Eigen::VectorXd grad =
        ppo_clip_surrogate_gradient(mdp, current, policy, setup, epsilon);
    current = current.perturbed(learning_rate * grad);
  }
  return current;
}

namespace incorrect {

GradientReport hybrid_gradient(const std::vector<Trajectory>& trajectories,
                               const SoftmaxPolicy& policy, const ValueBundle& values_gamma) {
  if (!values_gamma.setup.is_discounted())
    throw ValidationError("hybrid_gradient: values must come from the discounted setup");
  GradientReport report;
  report.setup = values_gamma.setup;
  report.method = "MonteCarloHybrid";
  // Average-style aggregation of a discounted integrand: exactly the
  // measure-mixing bug being demonstrated.
  report.grad = time_estimate(
      trajectories,
      [&](int s, int a) -> Eigen::VectorXd {
        return grad_log_pi(policy, s, a) * values_gamma.q(s, a);
      },
      Setup::average());
  return report;
}

Eigen::VectorXd mixed_measure_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       double gamma) {
  const Eigen::MatrixXd pi = policy.probs();
  const ValueBundle values = value_functions(mdp, pi, Setup::discounted(gamma));
  const Measure nu_mu = stationary_measure(mdp, pi);
  const int na = policy.n_actions();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.n_states() * na);
  for (int s = 0; s < policy.n_states(); ++s) {
    const double v_bar = pi.row(s).dot(values.q.row(s));
    grad.segment(s * na, na) =
        nu_mu.weights(s) * (pi.row(s).array() * (values.q.row(s).array() - v_bar)).matrix();
  }
  return grad;
}

Eigen::VectorXd hybrid_natural_gradient(const Eigen::VectorXd& grad, const TabularMdp& mdp,
                                        const SoftmaxPolicy& policy) {
  const GradientReport report = policy_curvature(mdp, policy, Setup::average());
  return psd_pinv_apply(*report.curvature, grad);
}

}  // namespace incorrect

}  // namespace polopt
