#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <vector>

#include "polopt/experiments.hpp"
#include "polopt/io.hpp"
#include "polopt/measures.hpp"
#include "polopt/oracle.hpp"
#include "polopt/random_instances.hpp"

using namespace polopt;
namespace ex = polopt::experiments;

TEST_CASE("method directions") {
  const lqr::LqrProblem problem = benchmark_lqr_problem();
  Eigen::MatrixXd k(1, 2);
  k << 0.0, 0.5;
  const lqr::LqrGains gains(k);

  SUBCASE("every advertised method yields a finite direction at a stable point") {
    for (const std::string& method : ex::vector_field_methods()) {
      const auto dir = ex::method_direction(problem, gains, method, 0.7);
      REQUIRE(dir.has_value());
      CHECK(dir->allFinite());
    }
  }

  SUBCASE("unknown methods are rejected") {
    CHECK_THROWS_AS(ex::method_direction(problem, gains, "gradient_descent", 0.7),
                    ValidationError);
  }

  SUBCASE("average-unstable points drop the average-setup rules") {
    const lqr::LqrGains open_loop(Eigen::MatrixXd::Zero(1, 2));  // rho(A) = 1.1
    CHECK_FALSE(ex::method_direction(problem, open_loop, "grad_J_mu", 0.7).has_value());
    CHECK(ex::method_direction(problem, open_loop, "grad_J_gamma", 0.7).has_value());
  }

  SUBCASE("the double-hybrid direction collapses to the discounted NPG ray") {
    const auto both = ex::method_direction(problem, gains, "hybrid_npg_hybrid_grad", 0.7);
    const auto npg = ex::method_direction(problem, gains, "npg_gamma", 0.7);
    REQUIRE(both.has_value());
    REQUIRE(npg.has_value());
    const double cosine =
        (both->array() * npg->array()).sum() / (both->norm() * npg->norm());
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("vector field grid") {
  const lqr::LqrProblem problem = benchmark_lqr_problem();
  ex::VectorFieldConfig config;
  config.steps = 5;
  const std::vector<ex::VectorFieldRow> rows = ex::vector_field(problem, config);

  const std::size_t per_method = 25;
  REQUIRE(rows.size() == per_method * ex::vector_field_methods().size());

  std::set<std::pair<double, double>> points;
  for (const ex::VectorFieldRow& row : rows) {
    points.emplace(row.k0, row.k1);
    if (row.stable) {
      const double norm = std::hypot(row.dk0, row.dk1);
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
    } else {
      CHECK(std::isnan(row.dk0));
      CHECK(std::isnan(row.raw_dk0));
    }
  }
  CHECK(points.size() == per_method);
}

TEST_CASE("optimality gap runs") {
  const lqr::LqrProblem problem = benchmark_lqr_problem();
  ex::GapConfig config;
  config.max_iters = 300;
  config.step_sizes = {1e-2, 3e-2};
  const std::vector<ex::GapSeries> runs = ex::optimality_gap(problem, config);
  REQUIRE(!runs.empty());

  for (const ex::GapSeries& run : runs) {
    REQUIRE(!run.gaps.empty());
    CHECK(run.optimal_cost > 0.0);
    // Gap sequences start from the common initial gains, so the first entry
    // agrees across every run in the same setup.
    CHECK(run.gaps.front() >= 0.0);
    if (!run.diverged)
      for (double gap : run.gaps) CHECK(std::isfinite(gap));
  }

  const auto is_correct = [](const ex::GapSeries& run) {
    return run.method == "grad" || run.method == "npg";
  };
  for (const ex::GapSeries& run : runs)
    if (is_correct(run)) CHECK(run.gaps.back() < run.gaps.front());
}

TEST_CASE("gamma-alpha sweep") {
  ex::VectorFieldConfig grid;
  grid.steps = 7;
  const std::vector<ex::SweepCell> cells = ex::gamma_alpha_sweep({0.3}, {0.7, 0.99}, grid);
  REQUIRE(cells.size() == 2);
  for (const ex::SweepCell& cell : cells) {
    CHECK(cell.alpha == doctest::Approx(0.3));
    CHECK(cell.n_stable > 0);
    CHECK(cell.mean_cosine <= 1.0 + 1e-12);
  }
  // Agreement improves as gamma approaches 1.
  CHECK(cells[1].mean_cosine >= cells[0].mean_cosine - 1e-9);
}

TEST_CASE("tabular demo trajectories") {
  const TabularMdp mdp = ex::bundled_demo_mdp();

  SUBCASE("all methods are monotone in both setups") {
    const std::vector<ex::MdpDemoSeries> report =
        ex::mdp_demo(mdp, 0.9, ex::mdp_demo_methods(), 40, 0);
    REQUIRE(report.size() == 2 * ex::mdp_demo_methods().size());
    for (const ex::MdpDemoSeries& series : report) {
      REQUIRE(!series.objectives.empty());
      for (std::size_t i = 1; i < series.objectives.size(); ++i)
        CHECK(series.objectives[i] >= series.objectives[i - 1] - 1e-9);
    }
  }

  SUBCASE("policy iteration reaches the enumerated optimum") {
    const std::vector<ex::MdpDemoSeries> report =
        ex::mdp_demo(mdp, 0.9, {"policy_iteration"}, 40, 0);
    for (const ex::MdpDemoSeries& series : report) {
      const Setup setup =
          series.setup == "average" ? Setup::average() : Setup::discounted(0.9);
      const auto [policy, value] = oracle::enumerate_deterministic_optimum(mdp, setup);
      CHECK(series.objectives.back() == doctest::Approx(value).epsilon(1e-10));
    }
  }

  SUBCASE("empty method list yields an empty report") {
    CHECK(ex::mdp_demo(mdp, 0.9, {}, 10, 0).empty());
  }

  SUBCASE("unknown method is rejected") {
    CHECK_THROWS_AS(ex::mdp_demo(mdp, 0.9, {"q_learning"}, 10, 0), ValidationError);
  }
}

TEST_CASE("bundled demo MDP matches the shipped JSON") {
  const TabularMdp bundled = ex::bundled_demo_mdp();
  const TabularMdp shipped = io::load_mdp_json(io::read_file(std::string(POLOPT_DATA_DIR) +
                                                             "/demo_mdp.json"));
  CHECK(shipped.n_states() == bundled.n_states());
  CHECK(shipped.n_actions() == bundled.n_actions());
  CHECK((shipped.reward() - bundled.reward()).lpNorm<Eigen::Infinity>() == 0.0);
  for (int a = 0; a < bundled.n_actions(); ++a)
    CHECK((shipped.transition(a) - bundled.transition(a)).lpNorm<Eigen::Infinity>() == 0.0);
}
