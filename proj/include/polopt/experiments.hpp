#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polopt/lqr.hpp"
#include "polopt/mdp.hpp"

namespace polopt::experiments {

/// Update rules compared in the vector-field and optimality-gap studies.
/// The hybrid_* entries are the known-wrong discounted rules that mix in the
/// stationary measure; they are included to demonstrate the bias, not to use.
inline const std::vector<std::string>& vector_field_methods() {
  static const std::vector<std::string> methods = {
      "policy_iteration_direction", "grad_J_mu",       "npg_mu",
      "grad_J_gamma",               "npg_gamma",       "hybrid_gradient",
      "hybrid_npg",                 "hybrid_npg_hybrid_grad"};
  return methods;
}

/// Raw update direction (cost-descent K increment, unnormalized) of one
/// method at the given gains. Empty optional when the required Lyapunov
/// solves are unstable at this point.
std::optional<Eigen::MatrixXd> method_direction(const lqr::LqrProblem& problem,
                                                const lqr::LqrGains& gains,
                                                const std::string& method, double gamma);

struct VectorFieldConfig {
  double gamma = 0.7;
  double k0_min = -1.0, k0_max = 1.0;
  double k1_min = -0.5, k1_max = 1.5;
  int steps = 15;
};

struct VectorFieldRow {
  std::string method;
  double k0 = 0.0, k1 = 0.0;
  double dk0 = 0.0, dk1 = 0.0;          // unit-normalized for plotting
  double raw_dk0 = 0.0, raw_dk1 = 0.0;  // magnitudes preserved
  bool stable = false;                  // NaN direction entries when false
};

/// Grid of update directions for every method; rows ordered by
/// (method, grid index) so output bytes never depend on evaluation order.
std::vector<VectorFieldRow> vector_field(const lqr::LqrProblem& problem,
                                         const VectorFieldConfig& config);

struct GapConfig {
  double gamma = 0.7;
  Eigen::MatrixXd k0;  // empty selects the benchmark default (0, 0.5)
  int max_iters = 5000;
  std::vector<double> step_sizes = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1};
};

struct GapSeries {
  std::string method;
  std::string setup;             // "discounted" or "average"
  double step_size = 0.0;        // tuned choice
  std::vector<double> gaps;      // J(K_t) - J*
  bool diverged = false;         // gap grew past 10x its initial value
  double optimal_cost = 0.0;     // J*
};

/// Optimality-gap trajectories for the correct gradient/NPG rules and the
/// three hybrid rules, per setup, with per-method step-size tuning (fastest
/// non-divergent candidate wins).
std::vector<GapSeries> optimality_gap(const lqr::LqrProblem& problem, const GapConfig& config);

struct SweepCell {
  double alpha = 0.0;
  double gamma = 0.0;
  double mean_cosine = 0.0;  // cos between grad_J_gamma and grad_J_mu directions
  int n_stable = 0;
};

/// Mean direction agreement between the discounted and average gradients
/// over the stable part of the K grid, per (alpha, gamma) cell.
std::vector<SweepCell> gamma_alpha_sweep(const std::vector<double>& alphas,
                                         const std::vector<double>& gammas,
                                         const VectorFieldConfig& grid);

struct MdpDemoSeries {
  std::string method;
  std::string setup;
  std::vector<double> objectives;  // per outer iteration, starting value first
};

/// Objective trajectories of the correct tabular optimizers (policy
/// iteration, PG, NPG, trust region, PPO-clip) on one MDP, both setups.
std::vector<MdpDemoSeries> mdp_demo(const TabularMdp& mdp, double gamma,
                                    const std::vector<std::string>& methods, int iterations,
                                    std::uint64_t seed);

inline const std::vector<std::string>& mdp_demo_methods() {
  static const std::vector<std::string> methods = {
      "policy_iteration", "policy_gradient", "natural_policy_gradient", "trust_region",
      "ppo_clip"};
  return methods;
}

/// The bundled showcase MDP used by the demo command and its tests.
TabularMdp bundled_demo_mdp();

}  // namespace polopt::experiments
