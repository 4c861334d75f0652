#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "polopt/io.hpp"
#include "polopt/random_instances.hpp"

using namespace polopt;

TEST_CASE("MDP JSON round trip") {
  const TabularMdp mdp = random_mdp(5, 4, 3);
  const TabularMdp back = io::load_mdp_json(io::dump_mdp_json(mdp));

  CHECK(back.n_states() == mdp.n_states());
  CHECK(back.n_actions() == mdp.n_actions());
  CHECK((back.reward() - mdp.reward()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.rho0() - mdp.rho0()).lpNorm<Eigen::Infinity>() == 0.0);
  for (int a = 0; a < mdp.n_actions(); ++a)
    CHECK((back.transition(a) - mdp.transition(a)).lpNorm<Eigen::Infinity>() == 0.0);

  SUBCASE("serialization is deterministic") {
    CHECK(io::dump_mdp_json(mdp) == io::dump_mdp_json(back));
  }
}

TEST_CASE("MDP JSON loader reports the first violated invariant") {
  CHECK_THROWS_AS(io::load_mdp_json("not json"), ValidationError);
  CHECK_THROWS_AS(io::load_mdp_json("{}"), ValidationError);

  SUBCASE("wrong outer transition length") {
    const std::string text = R"({"n_states": 2, "n_actions": 1,
      "transition": [[[1.0, 0.0]]],
      "reward": [[0.0], [0.0]], "rho0": [0.5, 0.5]})";
    CHECK_THROWS_WITH_AS(io::load_mdp_json(text),
                         "load_mdp_json: 'transition' must have n_states outer entries",
                         ValidationError);
  }

  SUBCASE("ragged transition row") {
    const std::string text = R"({"n_states": 2, "n_actions": 1,
      "transition": [[[1.0, 0.0]], [[1.0]]],
      "reward": [[0.0], [0.0]], "rho0": [0.5, 0.5]})";
    CHECK_THROWS_WITH_AS(io::load_mdp_json(text),
                         "load_mdp_json: transition[1][0] must have n_states entries",
                         ValidationError);
  }

  SUBCASE("reward shape mismatch") {
    const std::string text = R"({"n_states": 2, "n_actions": 1,
      "transition": [[[0.5, 0.5]], [[0.5, 0.5]]],
      "reward": [[0.0]], "rho0": [0.5, 0.5]})";
    CHECK_THROWS_WITH_AS(io::load_mdp_json(text),
                         "load_mdp_json: 'reward' must be n_states x n_actions",
                         ValidationError);
  }

  SUBCASE("semantic validation still applies after parsing") {
    // Transition rows that do not sum to one are caught by the MDP itself.
    const std::string text = R"({"n_states": 1, "n_actions": 1,
      "transition": [[[0.5]]], "reward": [[0.0]], "rho0": [1.0]})";
    CHECK_THROWS_AS(io::load_mdp_json(text), ValidationError);
  }
}

TEST_CASE("LQR problem JSON round trip") {
  const lqr::LqrProblem problem = random_lqr_problem(9, 3, 2);
  const lqr::LqrProblem back = io::load_lqr_problem_json(io::dump_lqr_problem_json(problem));
  CHECK((back.a - problem.a).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.b - problem.b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.w - problem.w).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.q - problem.q).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((back.r - problem.r).lpNorm<Eigen::Infinity>() == 0.0);

  SUBCASE("scalar fields are rejected") {
    CHECK_THROWS_AS(
        io::load_lqr_problem_json(R"({"a": 1.0, "b": [[1]], "w": [[1]], "q": [[1]], "r": [[1]]})"),
        ValidationError);
  }
}

TEST_CASE("gradient report JSON round trip") {
  GradientReport report;
  report.method = "ExactDiscounted";
  report.setup = Setup::discounted(0.7);
  report.grad = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);

  SUBCASE("without curvature") {
    const GradientReport back = io::load_gradient_report_json(io::dump_gradient_report_json(report));
    CHECK(back.method == report.method);
    CHECK(back.setup.is_discounted());
    CHECK(back.setup.gamma == doctest::Approx(0.7).epsilon(1e-15));
    CHECK((back.grad - report.grad).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK_FALSE(back.curvature.has_value());
  }

  SUBCASE("with curvature, average setup") {
    report.setup = Setup::average();
    Eigen::MatrixXd w(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) w(i, j) = 0.1 * i - j;
    report.curvature = w;
    const GradientReport back = io::load_gradient_report_json(io::dump_gradient_report_json(report));
    CHECK(back.setup.is_average());
    REQUIRE(back.curvature.has_value());
    CHECK((*back.curvature - w).lpNorm<Eigen::Infinity>() == 0.0);
  }

  SUBCASE("curvature size mismatch is rejected") {
    const std::string text = R"({"method": "x", "setup": {"kind": "average"},
      "grad": [1.0, 2.0], "curvature": [1.0, 2.0, 3.0]})";
    CHECK_THROWS_WITH_AS(io::load_gradient_report_json(text),
                         "load_gradient_report_json: curvature size mismatch", ValidationError);
  }

  SUBCASE("unknown setup kind is rejected") {
    const std::string text = R"({"method": "x", "setup": {"kind": "episodic"}, "grad": [1.0]})";
    CHECK_THROWS_AS(io::load_gradient_report_json(text), ValidationError);
  }
}

TEST_CASE("CSV formatting") {
  CHECK(io::format_cell(std::nan("")) == "nan");
  CHECK(io::format_cell(0.0) == "0");
  CHECK(io::format_cell(1.5) == "1.5");
  CHECK(io::format_cell(-0.25) == "-0.25");
  CHECK(io::format_cell(1e-12) == "1e-12");

  SUBCASE("tables join headers and format rows") {
    const std::string csv =
        io::csv_table({"x", "y"}, {{1.0, 2.5}, {std::nan(""), -3.0}});
    CHECK(csv == "x,y\n1,2.5\nnan,-3\n");
  }

  SUBCASE("row width must match the header") {
    CHECK_THROWS_AS(io::csv_table({"x", "y"}, {{1.0}}), ValidationError);
  }
}

TEST_CASE("file round trip") {
  const std::string path = "io_test_scratch.txt";
  io::write_file(path, "line\n");
  CHECK(io::read_file(path) == "line\n");
  CHECK_THROWS_AS(io::read_file("definitely/missing/file.txt"), ValidationError);
}
