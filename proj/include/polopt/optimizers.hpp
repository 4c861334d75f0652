#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "polopt/mdp.hpp"
#include "polopt/measures.hpp"

namespace polopt {

/// Gradient (and optionally curvature) of an objective in theta coordinates,
/// flattened row-major over (state, action).
struct GradientReport {
  Eigen::VectorXd grad;
  std::optional<Eigen::MatrixXd> curvature;
  Setup setup;
  std::string method;
};

struct TrustRegionConfig {
  double rho = 1e-3;      // trust-region radius, squared-metric units
  double damping = 1e-8;  // regularizer added to W before pseudo-inversion
  double eta = 0.1;       // fixed stepsize for the natural gradient
};

/// sum_s nu^{pi_new}(s) sum_a pi_new(a|s) A^{pi_old}(s, a). Equals
/// objective(pi_new) - objective(pi_old) for both setups.
double performance_difference(const TabularMdp& mdp, const Eigen::MatrixXd& pi_new,
                              const Eigen::MatrixXd& pi_old, const Setup& setup);
double performance_difference(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                              const SoftmaxPolicy& pi_old, const Setup& setup);

/// Greedy advantage maximization per state; ties go to the lowest action
/// index. Never decreases the objective.
DeterministicTablePolicy policy_iteration_step(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                                               const Setup& setup);
DeterministicTablePolicy policy_iteration_step(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                               const Setup& setup);
DeterministicTablePolicy policy_iteration_step(const TabularMdp& mdp,
                                               const DeterministicTablePolicy& policy,
                                               const Setup& setup);

/// Exact policy gradient sum_s nu(s) sum_a pi(a|s) grad_log_pi(s,a) Q(s,a),
/// with the measure kind matching the Q subscript.
GradientReport policy_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const Setup& setup);

/// Exact Fisher-style curvature W = sum_s nu(s) sum_a pi(a|s) score score^T.
/// Symmetric PSD, block diagonal per state.
GradientReport policy_curvature(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                const Setup& setup);

/// nu^{pi_old}-weighted KL divergence sum_s nu(s) KL(pi_new(.|s) || pi_old(.|s)).
double kl_metric(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                 const SoftmaxPolicy& pi_old, const Setup& setup);

/// eta (W + damping I)^+ g, pseudo-inverse with singular values below
/// 1e-10 sigma_max treated as zero.
Eigen::VectorXd natural_gradient_step(const GradientReport& report,
                                      const TrustRegionConfig& config);

/// Closed-form KKT step sqrt(2 rho / g^T W^+ g) W^+ g for the quadratic
/// trust-region model; the metric constraint step^T W step <= 2 rho is active.
Eigen::VectorXd trust_region_step(const GradientReport& report, const TrustRegionConfig& config);

/// Clipped-ratio surrogate of the approximate performance difference,
/// weighted by nu^{pi_old}.
double ppo_clip_surrogate(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                          const SoftmaxPolicy& pi_old, const Setup& setup, double epsilon);

/// Gradient of the clipped surrogate in pi_new's theta coordinates (clipped
/// terms contribute zero).
Eigen::VectorXd ppo_clip_surrogate_gradient(const TabularMdp& mdp, const SoftmaxPolicy& pi_new,
                                            const SoftmaxPolicy& pi_old, const Setup& setup,
                                            double epsilon);

/// One outer PPO-Clip iteration: full-batch gradient ascent on the exact
/// surrogate anchored at `policy`, fixed inner step count and learning rate.
SoftmaxPolicy ppo_clip_iterate(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                               const Setup& setup, double epsilon, int inner_steps = 20,
                               double learning_rate = 0.1);

/// Deliberately wrong estimators from the implementation-bug catalog. They
/// mix the stationary measure with discounted quantities and are quarantined
/// here so the correct-path API never reaches them.
namespace incorrect {

/// Path sum of score * Q_gamma with NO gamma^k weighting, normalized by the
/// step count; converges to sum_s nu_mu(s) sum_a pi grad_log_pi Q_gamma
/// rather than to the discounted gradient.
GradientReport hybrid_gradient(const std::vector<Trajectory>& trajectories,
                               const SoftmaxPolicy& policy, const ValueBundle& values_gamma);

/// Exact mixed-measure limit of hybrid_gradient.
Eigen::VectorXd mixed_measure_gradient(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                       double gamma);

/// W_mu^+ grad: the stationary-measure curvature applied to a (possibly
/// discounted) gradient.
Eigen::VectorXd hybrid_natural_gradient(const Eigen::VectorXd& grad, const TabularMdp& mdp,
                                        const SoftmaxPolicy& policy);

}  // namespace incorrect

}  // namespace polopt
