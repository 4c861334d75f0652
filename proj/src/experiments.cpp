#include "polopt/experiments.hpp"

#include <cmath>
#include <limits>

#include "polopt/errors.hpp"
#include "polopt/measures.hpp"
#include "polopt/optimizers.hpp"
#include "polopt/random_instances.hpp"
#include "polopt/rng.hpp"

namespace polopt::experiments {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::optional<lqr::LqrSolution> try_solve(const lqr::LqrProblem& problem,
                                          const lqr::LqrGains& gains, const Setup& setup) {
  if (!lqr::is_stable(problem, gains, setup)) return std::nullopt;
  return lqr::solve(problem, gains, setup);
}

/// Right-multiply by the inverse of a symmetric PD moment matrix.
Eigen::MatrixXd apply_inverse_moment(const Eigen::MatrixXd& m, const Eigen::MatrixXd& moment) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(moment);
  if (ldlt.info() != Eigen::Success)
    throw SingularCovariance("experiments: state moment is not invertible");
  return ldlt.solve(m.transpose()).transpose();
}

}  // namespace

std::optional<Eigen::MatrixXd> method_direction(const lqr::LqrProblem& problem,
                                                const lqr::LqrGains& gains,
                                                const std::string& method, double gamma) {
  const Setup avg = Setup::average();
  const Setup disc = Setup::discounted(gamma);

  if (method == "policy_iteration_direction") {
    const auto sol = try_solve(problem, gains, avg);
    if (!sol) return std::nullopt;
    const Eigen::MatrixXd next =
        sol->u.ldlt().solve(problem.b.transpose() * sol->p * problem.a);
    return (next - gains.k).eval();
  }
  if (method == "grad_J_mu") {
    const auto sol = try_solve(problem, gains, avg);
    if (!sol) return std::nullopt;
    return (-2.0 * sol->g * sol->measure_moment()).eval();
  }
  if (method == "npg_mu") {
    const auto sol = try_solve(problem, gains, avg);
    if (!sol) return std::nullopt;
    return (-2.0 * sol->g).eval();
  }
  if (method == "grad_J_gamma") {
    const auto sol = try_solve(problem, gains, disc);
    if (!sol) return std::nullopt;
    return (-2.0 * sol->g * sol->measure_moment()).eval();
  }
  if (method == "npg_gamma") {
    const auto sol = try_solve(problem, gains, disc);
    if (!sol) return std::nullopt;
    return (-2.0 * sol->g).eval();
  }

  // The three mismatched-measure rules need both solves: discounted gain
  // matrices mixed with the stationary state moment.
  const auto sol_mu = try_solve(problem, gains, avg);
  const auto sol_gamma = try_solve(problem, gains, disc);
  if (!sol_mu || !sol_gamma) return std::nullopt;
  const Eigen::MatrixXd s_mu = sol_mu->measure_moment();

  if (method == "hybrid_gradient") return (-2.0 * sol_gamma->g * s_mu).eval();
  if (method == "hybrid_npg") {
    const Eigen::MatrixXd grad_gamma = 2.0 * sol_gamma->g * sol_gamma->measure_moment();
    return (-apply_inverse_moment(grad_gamma, s_mu)).eval();
  }
  if (method == "hybrid_npg_hybrid_grad") {
    const Eigen::MatrixXd hybrid_grad = 2.0 * sol_gamma->g * s_mu;
    return (-apply_inverse_moment(hybrid_grad, s_mu)).eval();
  }
  throw ValidationError("method_direction: unknown method '" + method + "'");
}

std::vector<VectorFieldRow> vector_field(const lqr::LqrProblem& problem,
                                         const VectorFieldConfig& config) {
  if (problem.m() != 1 || problem.n() != 2)
    throw ValidationError("vector_field: needs a single-input two-state problem");
  if (config.steps < 2) throw ValidationError("vector_field: grid needs at least 2 steps");

  std::vector<VectorFieldRow> rows;
  rows.reserve(vector_field_methods().size() * config.steps * config.steps);
  for (const std::string& method : vector_field_methods()) {
    for (int i = 0; i < config.steps; ++i) {
      const double k0 =
          config.k0_min + (config.k0_max - config.k0_min) * i / (config.steps - 1);
      for (int j = 0; j < config.steps; ++j) {
        const double k1 =
            config.k1_min + (config.k1_max - config.k1_min) * j / (config.steps - 1);
        VectorFieldRow row;
        row.method = method;
        row.k0 = k0;
        row.k1 = k1;
        Eigen::MatrixXd k(1, 2);
        k << k0, k1;
        const auto dir = method_direction(problem, lqr::LqrGains(k), method, config.gamma);
        if (dir) {
          row.stable = true;
          row.raw_dk0 = (*dir)(0, 0);
          row.raw_dk1 = (*dir)(0, 1);
          const double norm = std::hypot(row.raw_dk0, row.raw_dk1);
          row.dk0 = norm > 1e-300 ? row.raw_dk0 / norm : 0.0;
          row.dk1 = norm > 1e-300 ? row.raw_dk1 / norm : 0.0;
        } else {
          row.stable = false;
          row.dk0 = row.dk1 = row.raw_dk0 = row.raw_dk1 = kNan;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

namespace {

/// Cost-descent increment of one gap-study method, or nullopt off the stable
/// region. The hybrid rules are gamma-based no matter which setup is being
/// benchmarked; that mismatch is the point of the study.
std::optional<Eigen::MatrixXd> gap_direction(const lqr::LqrProblem& problem,
                                             const lqr::LqrGains& gains,
                                             const std::string& method, const Setup& setup,
                                             double gamma) {
  if (method == "grad") {
    const auto sol = try_solve(problem, gains, setup);
    if (!sol) return std::nullopt;
    return (-2.0 * sol->g * sol->measure_moment()).eval();
  }
  if (method == "npg") {
    const auto sol = try_solve(problem, gains, setup);
    if (!sol) return std::nullopt;
    return (-2.0 * sol->g).eval();
  }
  return method_direction(problem, gains, method, gamma);
}

struct GapRun {
  std::vector<double> gaps;
  bool diverged = false;
  int reached_at = -1;  // first index with gap <= 1e-10
};

GapRun run_gap_descent(const lqr::LqrProblem& problem, const Eigen::MatrixXd& k0,
                       const std::string& method, const Setup& setup, double gamma,
                       double step, int max_iters, double optimal_cost) {
  GapRun run;
  Eigen::MatrixXd k = k0;
  for (int t = 0; t <= max_iters; ++t) {
    const auto eval_sol = try_solve(problem, lqr::LqrGains(k), setup);
    if (!eval_sol) {
      run.diverged = true;
      break;
    }
    const double gap = eval_sol->objective - optimal_cost;
    run.gaps.push_back(gap);
    if (!std::isfinite(gap) || gap > 1e9) {
      run.diverged = true;
      break;
    }
    if (run.reached_at < 0 && gap <= 1e-10) run.reached_at = t;
    if (gap <= 1e-13 || t == max_iters) break;
    const auto dir = gap_direction(problem, lqr::LqrGains(k), method, setup, gamma);
    if (!dir) {
      run.diverged = true;
      break;
    }
    k += step * *dir;
    if (!k.allFinite()) {
      run.diverged = true;
      break;
    }
  }
  return run;
}

}  // namespace

std::vector<GapSeries> optimality_gap(const lqr::LqrProblem& problem, const GapConfig& config) {
  Eigen::MatrixXd k0 = config.k0;
  if (k0.size() == 0) {
    k0.resize(problem.m(), problem.n());
    k0.setZero();
    if (problem.m() == 1 && problem.n() == 2) k0 << 0.0, 0.5;
  }

  const std::vector<std::string> methods = {"grad", "npg", "hybrid_gradient", "hybrid_npg",
                                            "hybrid_npg_hybrid_grad"};
  const std::vector<std::pair<std::string, Setup>> setups = {
      {"discounted", Setup::discounted(config.gamma)}, {"average", Setup::average()}};

  std::vector<GapSeries> out;
  for (const auto& [setup_name, setup] : setups) {
    const lqr::LqrGains k_star =
        lqr::riccati_fixed_point(problem, setup, lqr::LqrGains(k0));
    const double optimal_cost = lqr::solve(problem, k_star, setup).objective;

    for (const std::string& method : methods) {
      GapRun best;
      double best_step = 0.0;
      bool have_best = false;
      for (double step : config.step_sizes) {
        GapRun run = run_gap_descent(problem, k0, method, setup, config.gamma, step,
                                     config.max_iters, optimal_cost);
        if (run.gaps.empty()) continue;
        const auto better = [](const GapRun& a, const GapRun& b) {
          if (a.diverged != b.diverged) return !a.diverged;
          const int ra = a.reached_at < 0 ? INT32_MAX : a.reached_at;
          const int rb = b.reached_at < 0 ? INT32_MAX : b.reached_at;
          if (ra != rb) return ra < rb;
          return a.gaps.back() < b.gaps.back();
        };
        if (!have_best || better(run, best)) {
          best = std::move(run);
          best_step = step;
          have_best = true;
        }
      }
      GapSeries series;
      series.method = method;
      series.setup = setup_name;
      series.step_size = best_step;
      series.gaps = std::move(best.gaps);
      series.diverged = best.diverged;
      series.optimal_cost = optimal_cost;
      out.push_back(std::move(series));
    }
  }
  return out;
}

std::vector<SweepCell> gamma_alpha_sweep(const std::vector<double>& alphas,
                                         const std::vector<double>& gammas,
                                         const VectorFieldConfig& grid) {
  std::vector<SweepCell> cells;
  for (double alpha : alphas) {
    const lqr::LqrProblem problem = benchmark_lqr_problem(alpha);
    for (double gamma : gammas) {
      SweepCell cell;
      cell.alpha = alpha;
      cell.gamma = gamma;
      double cosine_sum = 0.0;
      for (int i = 0; i < grid.steps; ++i) {
        const double k0 = grid.k0_min + (grid.k0_max - grid.k0_min) * i / (grid.steps - 1);
        for (int j = 0; j < grid.steps; ++j) {
          const double k1 = grid.k1_min + (grid.k1_max - grid.k1_min) * j / (grid.steps - 1);
          Eigen::MatrixXd k(1, 2);
          k << k0, k1;
          const lqr::LqrGains gains(k);
          if (!lqr::is_stable(problem, gains, Setup::average())) continue;
          const Eigen::MatrixXd g_gamma =
              lqr::gradient(problem, gains, Setup::discounted(gamma));
          const Eigen::MatrixXd g_mu = lqr::gradient(problem, gains, Setup::average());
          const double n1 = g_gamma.norm();
          const double n2 = g_mu.norm();
          if (n1 < 1e-12 || n2 < 1e-12) continue;
          cosine_sum += (g_gamma.array() * g_mu.array()).sum() / (n1 * n2);
          ++cell.n_stable;
        }
      }
      cell.mean_cosine = cell.n_stable > 0 ? cosine_sum / cell.n_stable : kNan;
      cells.push_back(cell);
    }
  }
  return cells;
}

namespace {

/// Gradient-direction ascent with halving line search so every recorded
/// objective step is non-decreasing.
SoftmaxPolicy ascend(const TabularMdp& mdp, const SoftmaxPolicy& policy, const Setup& setup,
                     const Eigen::VectorXd& direction, double eta0, double* objective_out) {
  const double base = objective(mdp, policy, setup);
  double eta = eta0;
  for (int i = 0; i < 40; ++i) {
    const SoftmaxPolicy candidate = policy.perturbed(eta * direction);
    const double value = objective(mdp, candidate, setup);
    if (value >= base) {
      *objective_out = value;
      return candidate;
    }
    eta *= 0.5;
  }
  *objective_out = base;
  return policy;
}

std::vector<double> run_policy_iteration(const TabularMdp& mdp, const SoftmaxPolicy& start,
                                         const Setup& setup, int iterations) {
  std::vector<double> objectives = {objective(mdp, start, setup)};
  DeterministicTablePolicy current = policy_iteration_step(mdp, start, setup);
  objectives.push_back(objective(mdp, current, setup));
  for (int t = 1; t < iterations; ++t) {
    DeterministicTablePolicy next = policy_iteration_step(mdp, current, setup);
    objectives.push_back(objective(mdp, next, setup));
    if (next.actions() == current.actions()) break;
    current = std::move(next);
  }
  return objectives;
}

}  // namespace

std::vector<MdpDemoSeries> mdp_demo(const TabularMdp& mdp, double gamma,
                                    const std::vector<std::string>& methods, int iterations,
                                    std::uint64_t seed) {
  if (iterations < 1) throw ValidationError("mdp_demo: iterations must be >= 1");
  const SoftmaxPolicy start =
      random_softmax_policy(derive_stream(seed, 17), mdp.n_states(), mdp.n_actions());
  const std::vector<std::pair<std::string, Setup>> setups = {
      {"discounted", Setup::discounted(gamma)}, {"average", Setup::average()}};

  std::vector<MdpDemoSeries> out;
  for (const std::string& method : methods) {
    for (const auto& [setup_name, setup] : setups) {
      MdpDemoSeries series;
      series.method = method;
      series.setup = setup_name;

      if (method == "policy_iteration") {
        series.objectives = run_policy_iteration(mdp, start, setup, iterations);
      } else {
        TrustRegionConfig config;
        SoftmaxPolicy policy = start;
        series.objectives.push_back(objective(mdp, policy, setup));
        for (int t = 0; t < iterations; ++t) {
          double value = series.objectives.back();
          if (method == "policy_gradient") {
            const GradientReport report = policy_gradient(mdp, policy, setup);
            policy = ascend(mdp, policy, setup, report.grad, 0.5, &value);
          } else if (method == "natural_policy_gradient") {
            const GradientReport report = policy_curvature(mdp, policy, setup);
            const Eigen::VectorXd step = natural_gradient_step(report, config);
            policy = ascend(mdp, policy, setup, step, 1.0, &value);
          } else if (method == "trust_region") {
            GradientReport report = policy_curvature(mdp, policy, setup);
            try {
              const Eigen::VectorXd step = trust_region_step(report, config);
              policy = ascend(mdp, policy, setup, step, 1.0, &value);
            } catch (const DegenerateGradient&) {
              // At a stationary point; hold position.
            }
          } else if (method == "ppo_clip") {
            const SoftmaxPolicy next = ppo_clip_iterate(mdp, policy, setup, 0.2);
            const double next_value = objective(mdp, next, setup);
            if (next_value >= value - 1e-12) {
              policy = next;
              value = next_value;
            }
          } else {
            throw ValidationError("mdp_demo: unknown method '" + method + "'");
          }
          series.objectives.push_back(value);
        }
      }
      out.push_back(std::move(series));
    }
  }
  return out;
}

TabularMdp bundled_demo_mdp() { return random_mdp(42, 5, 3); }

}  // namespace polopt::experiments
