#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "polopt/errors.hpp"
#include "polopt/mdp.hpp"  // Setup

namespace polopt::lqr {

/// Discrete-time stochastic LQR: x' = A x + B a + w, w ~ N(0, W),
/// cost x^T Q x + a^T R a, x0 ~ N(0, W).
struct LqrProblem {
  Eigen::MatrixXd a;  // n x n system matrix
  Eigen::MatrixXd b;  // n x m input matrix
  Eigen::MatrixXd w;  // n x n process-noise covariance, symmetric PSD
  Eigen::MatrixXd q;  // n x n state cost, symmetric PSD
  Eigen::MatrixXd r;  // m x m action cost, symmetric PD

  LqrProblem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd w, Eigen::MatrixXd q,
             Eigen::MatrixXd r);

  int n() const { return static_cast<int>(a.rows()); }
  int m() const { return static_cast<int>(b.cols()); }

  /// Closed-loop matrix A - B K.
  Eigen::MatrixXd closed_loop(const Eigen::MatrixXd& k) const { return a - b * k; }
};

/// Linear controller a = -K x.
struct LqrGains {
  Eigen::MatrixXd k;  // m x n

  explicit LqrGains(Eigen::MatrixXd k_mat);
};

/// Lyapunov solutions and derived matrices for one (problem, gains, setup).
struct LqrSolution {
  Eigen::MatrixXd p;  // cost-to-go: P = Q + K^T R K + gamma A_K^T P A_K
  Eigen::MatrixXd s;  // Lyapunov moment: S = W + gamma A_K S A_K^T
  Eigen::MatrixXd u;  // R + gamma B^T P B
  Eigen::MatrixXd g;  // U K - gamma B^T P A; zero exactly at the optimum
  double objective = 0.0;
  Setup setup;

  /// Second moment of the state under the setup's averaging measure with
  /// x0 ~ N(0, W): S / (1 - gamma) in the discounted setup (the occupancy
  /// measure re-injects noise at every step), S itself in the average setup.
  /// Gradient, curvature and the performance difference all weight by this.
  Eigen::MatrixXd measure_moment() const;
};

struct LqrPerformanceDifference {
  double linear = 0.0;     // 2 tr(delta^T G S^{K'})
  double quadratic = 0.0;  // tr(delta^T U delta S^{K'})
  double total = 0.0;
};

/// Continuous-state trajectory; column k of states/actions is step k.
struct LqrTrajectory {
  Eigen::MatrixXd states;   // n x (horizon + 1)
  Eigen::MatrixXd actions;  // m x horizon
  Eigen::VectorXd costs;    // horizon
};

/// Solve X = C + scale * A X A^T. Direct Kronecker-vectorized solve for
/// n <= 30, fixed-point iteration above.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c, double scale);

/// Discounted: spectral radius of sqrt(gamma) A_K below 1; Average: spectral
/// radius of A_K below 1. Either way both Lyapunov equations contract.
bool is_stable(const LqrProblem& problem, const LqrGains& gains, const Setup& setup);

LqrSolution solve(const LqrProblem& problem, const LqrGains& gains, const Setup& setup);

namespace detail {
/// As solve(), but optionally dropping the gamma factors from U and G. Only
/// the corrected form satisfies the performance-difference identity for
/// gamma < 1; the uncorrected one exists for the mutation check.
LqrSolution solve_with_gain_convention(const LqrProblem& problem, const LqrGains& gains,
                                       const Setup& setup, bool gamma_corrected);
}  // namespace detail

/// dJ/dK = 2 G S.
Eigen::MatrixXd gradient(const LqrProblem& problem, const LqrGains& gains, const Setup& setup);

/// Policy curvature of the Euclidean action metric: exactly S.
Eigen::MatrixXd curvature(const LqrProblem& problem, const LqrGains& gains, const Setup& setup);

/// gradient . S^{-1} = 2 G. Requires S nonsingular.
Eigen::MatrixXd natural_gradient(const LqrProblem& problem, const LqrGains& gains,
                                 const Setup& setup);

/// Policy iteration for LQR: K <- U^{-1} gamma B^T P A until convergence.
/// Cost is non-increasing along iterates; the fixed point has G = 0.
LqrGains riccati_fixed_point(const LqrProblem& problem, const Setup& setup, const LqrGains& k0,
                             double tol = 1e-12, int max_iters = 10000);

/// Closed-form trust-region step in the Euclidean action metric: the cost
/// decreases and the constraint tr(delta S delta^T) = 2 rho is active.
LqrGains deterministic_trust_region_step(const LqrProblem& problem, const LqrGains& gains,
                                         const Setup& setup, double rho);

/// Exact two-term expansion of J(k_new) - J(k_old), with the state moment S
/// evaluated at the NEW gains.
LqrPerformanceDifference performance_difference_lqr(const LqrProblem& problem,
                                                    const LqrGains& k_old, const LqrGains& k_new,
                                                    const Setup& setup);
namespace detail {
LqrPerformanceDifference performance_difference_with_convention(const LqrProblem& problem,
                                                                const LqrGains& k_old,
                                                                const LqrGains& k_new,
                                                                const Setup& setup,
                                                                bool gamma_corrected);
}  // namespace detail

/// Gaussian closed-loop simulation, deterministic given seed.
LqrTrajectory simulate(const LqrProblem& problem, const LqrGains& gains, int horizon,
                       std::uint64_t seed);

}  // namespace polopt::lqr
