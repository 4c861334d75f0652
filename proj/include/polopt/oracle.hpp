#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "polopt/errors.hpp"
#include "polopt/mdp.hpp"

namespace polopt::oracle {

/// Central finite differences: (f(x + h e_i) - f(x - h e_i)) / (2h).
/// h <= 0 selects the default 1e-5 * max(1, ||x||_inf).
template <class F>
Eigen::VectorXd finite_difference(F&& f, const Eigen::VectorXd& x, double h = -1.0) {
  if (h <= 0.0) h = 1e-5 * std::max(1.0, x.size() ? x.lpNorm<Eigen::Infinity>() : 1.0);
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NonFiniteValue("finite_difference: function evaluation is not finite");
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

/// Matrix-parameter variant (used for LQR gains); perturbs entry by entry.
template <class F>
Eigen::MatrixXd finite_difference_matrix(F&& f, const Eigen::MatrixXd& x, double h = -1.0) {
  if (h <= 0.0) h = 1e-5 * std::max(1.0, x.size() ? x.lpNorm<Eigen::Infinity>() : 1.0);
  Eigen::MatrixXd grad(x.rows(), x.cols());
  Eigen::MatrixXd probe = x;
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      probe(i, j) = x(i, j) + h;
      const double up = f(probe);
      probe(i, j) = x(i, j) - h;
      const double down = f(probe);
      probe(i, j) = x(i, j);
      if (!std::isfinite(up) || !std::isfinite(down))
        throw NonFiniteValue("finite_difference_matrix: function evaluation is not finite");
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

/// Exhaustive search over all n_actions^n_states deterministic policies in
/// lexicographic order (last state's action varies fastest); strict
/// improvement keeps the lexicographically first optimum. Policies whose
/// induced chain fails the setup's preconditions are skipped.
std::pair<DeterministicTablePolicy, double> enumerate_deterministic_optimum(const TabularMdp& mdp,
                                                                            const Setup& setup);

enum class BiasVerdict { MatchesExact, MatchesMixed, Inconclusive };

/// Componentwise comparison of one estimator's mean against the exact target
/// and the mixed-measure (wrong) target.
struct BiasReport {
  Eigen::VectorXd estimator_mean;
  Eigen::VectorXd exact_target;
  Eigen::VectorXd mixed_target;
  Eigen::VectorXd standard_error;
  int n_samples = 0;
  BiasVerdict verdict = BiasVerdict::Inconclusive;
};

struct BiasStudy {
  BiasReport correct;  // gamma^k-weighted estimator
  BiasReport hybrid;   // unweighted path average of the discounted integrand
};

/// Runs the correct discounted estimator and the hybrid estimator on common
/// trajectories and classifies each against exact closed forms.
BiasStudy estimator_bias_study(const TabularMdp& mdp, const SoftmaxPolicy& policy, double gamma,
                               int n_paths, int horizon, std::uint64_t seed);

struct AbelRow {
  double gamma = 0.0;
  double scaled_discounted = 0.0;  // (1 - gamma) J_gamma
  double average = 0.0;            // J_mu
  double gap = 0.0;                // |scaled_discounted - average|
};

/// (1 - gamma) J_gamma versus J_mu along a gamma grid.
std::vector<AbelRow> abel_limit_study(const TabularMdp& mdp, const Eigen::MatrixXd& pi,
                                      const std::vector<double>& gamma_grid);
std::vector<AbelRow> abel_limit_study(const TabularMdp& mdp, const SoftmaxPolicy& policy,
                                      const std::vector<double>& gamma_grid);

const char* to_string(BiasVerdict verdict);

}  // namespace polopt::oracle
