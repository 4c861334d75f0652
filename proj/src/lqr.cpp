#include "polopt/lqr.hpp"

#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "polopt/rng.hpp"

namespace polopt::lqr {

namespace {

constexpr double kSymTol = 1e-10;

void require_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if ((m - m.transpose()).lpNorm<Eigen::Infinity>() > kSymTol)
    throw ValidationError(std::string("LqrProblem: ") + name + " is not symmetric");
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, /*computeEigenvectors=*/false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

/// Effective discount in the Lyapunov equations: gamma when discounted, 1 in
/// the average setup.
double lyapunov_scale(const Setup& setup) { return setup.is_discounted() ? setup.gamma : 1.0; }

/// PSD square root for sampling: W^(1/2) via the spectral decomposition,
/// tolerant of zero eigenvalues.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

LqrProblem::LqrProblem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in, Eigen::MatrixXd w_in,
                       Eigen::MatrixXd q_in, Eigen::MatrixXd r_in)
    : a(std::move(a_in)), b(std::move(b_in)), w(std::move(w_in)), q(std::move(q_in)),
      r(std::move(r_in)) {
  const int nn = static_cast<int>(a.rows());
  const int mm = static_cast<int>(b.cols());
  if (a.cols() != nn || b.rows() != nn || w.rows() != nn || w.cols() != nn || q.rows() != nn ||
      q.cols() != nn || r.rows() != mm || r.cols() != mm)
    throw ValidationError("LqrProblem: inconsistent matrix dimensions");
  require_symmetric(w, "W");
  require_symmetric(q, "Q");
  require_symmetric(r, "R");
  if (min_eigenvalue(w) < -kSymTol) throw ValidationError("LqrProblem: W is not PSD");
  if (min_eigenvalue(q) < -kSymTol) throw ValidationError("LqrProblem: Q is not PSD");
  if (min_eigenvalue(r) <= 1e-12) throw ValidationError("LqrProblem: R is not PD");
}

LqrGains::LqrGains(Eigen::MatrixXd k_mat) : k(std::move(k_mat)) {
  if (!k.allFinite()) throw ValidationError("LqrGains: non-finite entries");
}

Eigen::MatrixXd LqrSolution::measure_moment() const {
  return setup.is_discounted() ? (s / (1.0 - setup.gamma)).eval() : s;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c, double scale) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd x;
  if (n <= 30) {
    // vec(A X A^T) = (A (x) A) vec(X), column-major vec.
    const Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(n * n, n * n) - scale * Eigen::kroneckerProduct(a, a);
    const Eigen::VectorXd vec_c = Eigen::Map<const Eigen::VectorXd>(c.data(), n * n);
    Eigen::VectorXd vec_x = system.partialPivLu().solve(vec_c);
    if (!vec_x.allFinite())
      throw SingularSystem("solve_lyapunov: Kronecker system is singular");
    x = Eigen::Map<Eigen::MatrixXd>(vec_x.data(), n, n);
  } else {
    x = c;
    for (int iter = 0; iter < 1000000; ++iter) {
      const Eigen::MatrixXd next = c + scale * a * x * a.transpose();
      if ((next - x).lpNorm<Eigen::Infinity>() <= 1e-12) {
        x = next;
        break;
      }
      x = next;
    }
  }
  const double residual = (x - c - scale * a * x * a.transpose()).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-8 * std::max(1.0, c.lpNorm<Eigen::Infinity>())))
    throw SingularSystem("solve_lyapunov: residual did not converge");
  return 0.5 * (x + x.transpose());
}

bool is_stable(const LqrProblem& problem, const LqrGains& gains, const Setup& setup) {
  const double radius = spectral_radius(problem.closed_loop(gains.k));
  return std::sqrt(lyapunov_scale(setup)) * radius < 1.0 - 1e-10;
}

namespace detail {

LqrSolution solve_with_gain_convention(const LqrProblem& problem, const LqrGains& gains,
                                       const Setup& setup, bool gamma_corrected) {
  if (!is_stable(problem, gains, setup))
    throw UnstableGains("lqr::solve: closed loop is not contractive for this setup");
  const double scale = lyapunov_scale(setup);
  const Eigen::MatrixXd a_k = problem.closed_loop(gains.k);

  LqrSolution sol;
  sol.setup = setup;
  sol.p = solve_lyapunov(a_k.transpose(),
                         problem.q + gains.k.transpose() * problem.r * gains.k, scale);
  sol.s = solve_lyapunov(a_k, problem.w, scale);

  const double gain_scale = gamma_corrected ? scale : 1.0;
  sol.u = problem.r + gain_scale * problem.b.transpose() * sol.p * problem.b;
  sol.g = sol.u * gains.k - gain_scale * problem.b.transpose() * sol.p * problem.a;

  if (setup.is_average()) {
    sol.objective = (sol.p * problem.w).trace();
  } else {
    // x0 ~ N(0, W), so E V(x0) = tr(P W); the noise adds gamma/(1-gamma) tr(P W)
    // (gamma = 1 only with W = 0 closed loops is outside desk scope; guard).
    const double gamma = setup.gamma;
    if (gamma >= 1.0)
      throw ValidationError("lqr::solve: discounted objective requires gamma < 1");
    sol.objective = (sol.p * problem.w).trace() * (1.0 + gamma / (1.0 - gamma));
  }
  return sol;
}

LqrPerformanceDifference performance_difference_with_convention(const LqrProblem& problem,
                                                                const LqrGains& k_old,
                                                                const LqrGains& k_new,
                                                                const Setup& setup,
                                                                bool gamma_corrected) {
  const LqrSolution old_sol =
      solve_with_gain_convention(problem, k_old, setup, gamma_corrected);
  const LqrSolution new_sol =
      solve_with_gain_convention(problem, k_new, setup, gamma_corrected);
  const Eigen::MatrixXd delta = k_new.k - k_old.k;

  const Eigen::MatrixXd new_moment = new_sol.measure_moment();
  LqrPerformanceDifference diff;
  diff.linear = 2.0 * (delta.transpose() * old_sol.g * new_moment).trace();
  diff.quadratic = (delta.transpose() * old_sol.u * delta * new_moment).trace();
  diff.total = diff.linear + diff.quadratic;
  return diff;
}

}  // namespace detail

LqrSolution solve(const LqrProblem& problem, const LqrGains& gains, const Setup& setup) {
  return detail::solve_with_gain_convention(problem, gains, setup, /*gamma_corrected=*/true);
}

Eigen::MatrixXd gradient(const LqrProblem& problem, const LqrGains& gains, const Setup& setup) {
  const LqrSolution sol = solve(problem, gains, setup);
  return 2.0 * sol.g * sol.measure_moment();
}

Eigen::MatrixXd curvature(const LqrProblem& problem, const LqrGains& gains, const Setup& setup) {
  return solve(problem, gains, setup).measure_moment();
}

Eigen::MatrixXd natural_gradient(const LqrProblem& problem, const LqrGains& gains,
                                 const Setup& setup) {
  const LqrSolution sol = solve(problem, gains, setup);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sol.s);
  if (!lu.isInvertible())
    throw SingularCovariance("lqr::natural_gradient: state covariance is singular");
  return 2.0 * sol.g;
}

LqrGains riccati_fixed_point(const LqrProblem& problem, const Setup& setup, const LqrGains& k0,
                             double tol, int max_iters) {
  const double scale = lyapunov_scale(setup);
  LqrGains gains = k0;
  for (int iter = 0; iter < max_iters; ++iter) {
    LqrSolution sol;
    try {
      sol = solve(problem, gains, setup);
    } catch (const UnstableGains&) {
      throw UnstableGains("riccati_fixed_point: iterate " + std::to_string(iter) +
                          " left the stable region");
    }
    // Advantage minimizer: the K' with G(K') computed at the current P, i.e.
    // U^{-1} gamma B^T P A.
    const Eigen::MatrixXd next =
        sol.u.ldlt().solve(scale * problem.b.transpose() * sol.p * problem.a);
    if ((next - gains.k).lpNorm<Eigen::Infinity>() < tol) return LqrGains(next);
    gains = LqrGains(next);
  }
  return gains;
}

LqrGains deterministic_trust_region_step(const LqrProblem& problem, const LqrGains& gains,
                                         const Setup& setup, double rho) {
  if (!(rho > 0.0)) throw ValidationError("deterministic_trust_region_step: rho must be > 0");
  const LqrSolution sol = solve(problem, gains, setup);
  const Eigen::MatrixXd moment = sol.measure_moment();
  const double denom = 4.0 * (sol.g.transpose() * sol.g * moment).trace();
  if (denom <= 1e-14)
    throw DegenerateGradient("deterministic_trust_region_step: G vanishes");
  // Cost-descent step along -G with the metric constraint active.
  const double lambda = std::sqrt(2.0 * rho / denom);
  const Eigen::MatrixXd delta = -lambda * 2.0 * sol.g;
  const double metric = (delta * moment * delta.transpose()).trace();
  if (std::abs(metric - 2.0 * rho) > 1e-8 * std::max(1.0, 2.0 * rho))
    throw Error("deterministic_trust_region_step: metric constraint not active");
  return LqrGains(gains.k + delta);
}

LqrPerformanceDifference performance_difference_lqr(const LqrProblem& problem,
                                                    const LqrGains& k_old, const LqrGains& k_new,
                                                    const Setup& setup) {
  return detail::performance_difference_with_convention(problem, k_old, k_new, setup,
                                                        /*gamma_corrected=*/true);
}

LqrTrajectory simulate(const LqrProblem& problem, const LqrGains& gains, int horizon,
                       std::uint64_t seed) {
  if (horizon < 1) throw ValidationError("lqr::simulate: horizon must be >= 1");
  const int n = problem.n();
  const int m = problem.m();
  const Eigen::MatrixXd noise_sqrt = psd_sqrt(problem.w);
  SplitMix64 rng(seed);
  const auto draw_noise = [&]() {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    return (noise_sqrt * z).eval();
  };

  LqrTrajectory traj;
  traj.states.resize(n, horizon + 1);
  traj.actions.resize(m, horizon);
  traj.costs.resize(horizon);

  Eigen::VectorXd x = draw_noise();  // x0 ~ N(0, W)
  traj.states.col(0) = x;
  for (int k = 0; k < horizon; ++k) {
    const Eigen::VectorXd a = -gains.k * x;
    traj.actions.col(k) = a;
    traj.costs(k) = x.dot(problem.q * x) + a.dot(problem.r * a);
    x = problem.a * x + problem.b * a + draw_noise();
    traj.states.col(k + 1) = x;
  }
  return traj;
}

}  // namespace polopt::lqr
