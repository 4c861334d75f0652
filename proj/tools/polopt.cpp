#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polopt/experiments.hpp"
#include "polopt/io.hpp"
#include "polopt/random_instances.hpp"
#include "polopt/svg.hpp"
#include "polopt/verify.hpp"

namespace {

std::uint64_t base_seed() {
  const char* env = std::getenv("POLOPT_SEED");
  if (!env || !*env) return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw polopt::ValidationError("POLOPT_SEED must be a nonnegative integer");
  }
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw polopt::ValidationError(what + ": cannot parse '" + token + "' as a number");
    }
  }
  if (values.empty()) throw polopt::ValidationError(what + ": empty list");
  return values;
}

polopt::lqr::LqrProblem load_problem_or_default(const std::string& path) {
  if (path.empty()) return polopt::benchmark_lqr_problem();
  return polopt::io::load_lqr_problem_json(polopt::io::read_file(path));
}

const std::map<std::string, std::string>& method_colors() {
  static const std::map<std::string, std::string> colors = {
      {"policy_iteration_direction", "#1f77b4"}, {"grad_J_mu", "#2ca02c"},
      {"npg_mu", "#17becf"},                     {"grad_J_gamma", "#ff7f0e"},
      {"npg_gamma", "#bcbd22"},                  {"hybrid_gradient", "#d62728"},
      {"hybrid_npg", "#9467bd"},                 {"hybrid_npg_hybrid_grad", "#8c564b"},
      {"grad", "#2ca02c"},                       {"npg", "#17becf"}};
  return colors;
}

std::string color_of(const std::string& method) {
  const auto it = method_colors().find(method);
  return it == method_colors().end() ? "#7f7f7f" : it->second;
}

std::string svg_path_for(const std::string& csv_path) {
  const std::size_t dot = csv_path.rfind('.');
  return (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + ".svg";
}

int run_verify(const std::string& filter, bool gamma_correction) {
  polopt::verify::Options options;
  options.filter = filter;
  options.seed = base_seed();
  options.lqr_gamma_correction = gamma_correction;
  const auto results = polopt::verify::run_all(options);
  std::cout << polopt::verify::format_table(results);
  if (results.empty()) {
    std::cerr << "verify: no check matches filter '" << filter << "'\n";
    return 2;
  }
  return polopt::verify::all_passed(results) ? 0 : 1;
}

int run_vector_field(const std::string& problem_path, double gamma, const std::string& grid,
                     const std::string& out_path, bool emit_svg) {
  const polopt::lqr::LqrProblem problem = load_problem_or_default(problem_path);
  polopt::experiments::VectorFieldConfig config;
  config.gamma = gamma;
  if (!grid.empty()) {
    const std::vector<double> g = parse_list(grid, "--grid");
    if (g.size() != 5)
      throw polopt::ValidationError("--grid expects K0MIN,K0MAX,K1MIN,K1MAX,N");
    config.k0_min = g[0];
    config.k0_max = g[1];
    config.k1_min = g[2];
    config.k1_max = g[3];
    config.steps = static_cast<int>(g[4]);
  }
  const auto rows = polopt::experiments::vector_field(problem, config);

  std::string csv = "method,k0,k1,dk0,dk1,raw_dk0,raw_dk1,stable\n";
  for (const auto& r : rows) {
    csv += r.method + ',' + polopt::io::format_cell(r.k0) + ',' +
           polopt::io::format_cell(r.k1) + ',' + polopt::io::format_cell(r.dk0) + ',' +
           polopt::io::format_cell(r.dk1) + ',' + polopt::io::format_cell(r.raw_dk0) + ',' +
           polopt::io::format_cell(r.raw_dk1) + ',' + (r.stable ? "1" : "0") + '\n';
  }
  polopt::io::write_file(out_path, csv);

  if (emit_svg) {
    std::vector<polopt::svg::Arrow> arrows;
    for (const auto& r : rows) {
      if (!r.stable) continue;
      arrows.push_back({r.k0, r.k1, r.dk0, r.dk1, color_of(r.method)});
    }
    polopt::io::write_file(svg_path_for(out_path),
                           polopt::svg::vector_field_svg(arrows, config.k0_min, config.k0_max,
                                                         config.k1_min, config.k1_max,
                                                         "update directions"));
  }
  return 0;
}

int run_gap(const std::string& problem_path, double gamma, int max_iters,
            const std::string& out_path, bool emit_svg) {
  const polopt::lqr::LqrProblem problem = load_problem_or_default(problem_path);
  polopt::experiments::GapConfig config;
  config.gamma = gamma;
  config.max_iters = max_iters;
  const auto all_series = polopt::experiments::optimality_gap(problem, config);

  std::string csv = "method,setup,step_size,iteration,gap,event\n";
  for (const auto& s : all_series) {
    for (std::size_t t = 0; t < s.gaps.size(); ++t) {
      const bool last = t + 1 == s.gaps.size();
      csv += s.method + ',' + s.setup + ',' + polopt::io::format_cell(s.step_size) + ',' +
             std::to_string(t) + ',' + polopt::io::format_cell(s.gaps[t]) + ',' +
             (last && s.diverged ? "diverged" : "") + '\n';
    }
  }
  polopt::io::write_file(out_path, csv);

  if (emit_svg) {
    std::vector<polopt::svg::Series> lines;
    for (const auto& s : all_series) {
      polopt::svg::Series line;
      line.label = s.method + " (" + s.setup + ")";
      line.color = color_of(s.method);
      for (std::size_t t = 0; t < s.gaps.size(); ++t) {
        line.x.push_back(static_cast<double>(t));
        line.y.push_back(s.gaps[t]);
      }
      lines.push_back(std::move(line));
    }
    polopt::io::write_file(svg_path_for(out_path),
                           polopt::svg::line_chart_svg(lines, "optimality gap"));
  }
  return 0;
}

int run_sweep(const std::string& alphas, const std::string& gammas,
              const std::string& out_path) {
  const polopt::experiments::VectorFieldConfig grid;
  const auto cells = polopt::experiments::gamma_alpha_sweep(
      parse_list(alphas, "--alphas"), parse_list(gammas, "--gammas"), grid);
  std::vector<std::vector<double>> rows;
  for (const auto& c : cells)
    rows.push_back({c.alpha, c.gamma, c.mean_cosine, static_cast<double>(c.n_stable)});
  polopt::io::write_file(out_path,
                         polopt::io::csv_table({"alpha", "gamma", "mean_cosine", "n_stable"},
                                               rows));
  return 0;
}

int run_mdp_demo(const std::string& mdp_path, double gamma, int iterations,
                 const std::vector<std::string>& methods, const std::string& out_path) {
  const polopt::TabularMdp mdp = polopt::io::load_mdp_json(polopt::io::read_file(mdp_path));
  const auto series =
      polopt::experiments::mdp_demo(mdp, gamma, methods, iterations, base_seed());

  nlohmann::json report;
  report["methods"] = nlohmann::json::array();
  for (const auto& s : series) {
    nlohmann::json entry;
    entry["method"] = s.method;
    entry["setup"] = s.setup;
    entry["objectives"] = s.objectives;
    report["methods"].push_back(entry);
  }
  polopt::io::write_file(out_path, report.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"policy-optimization toolkit: exact tabular/LQR solvers, "
               "deliberately wrong estimators, and the studies comparing them"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  std::string filter;
  bool gamma_correction = true;
  verify->add_option("--filter", filter, "run only checks whose name contains this substring");
  verify
      ->add_flag("!--no-lqr-gamma-correction", gamma_correction,
                 "drop the gamma factors from the LQR gain matrices (fault injection; "
                 "the LQR identity suite must then fail)")
      ->group("");  // hidden

  // vector-field
  auto* vf = app.add_subcommand("vector-field", "update-direction grid over LQR gains");
  std::string vf_problem, vf_grid, vf_out = "vector_field.csv";
  double vf_gamma = 0.7;
  bool vf_svg = false;
  vf->set_config("--config");
  vf->add_option("--problem", vf_problem, "LQR problem JSON (default: built-in benchmark)");
  vf->add_option("--gamma", vf_gamma, "discount factor")->check(CLI::Range(1e-9, 1.0));
  vf->add_option("--grid", vf_grid, "K0MIN,K0MAX,K1MIN,K1MAX,N");
  vf->add_option("--out", vf_out, "output CSV path");
  vf->add_flag("--svg", vf_svg, "also write an SVG next to the CSV");

  // gap
  auto* gap = app.add_subcommand("gap", "optimality-gap trajectories per method and setup");
  std::string gap_problem, gap_out = "gap.csv";
  double gap_gamma = 0.7;
  int gap_max_iters = 5000;
  bool gap_svg = false;
  gap->set_config("--config");
  gap->add_option("--problem", gap_problem, "LQR problem JSON (default: built-in benchmark)");
  gap->add_option("--gamma", gap_gamma, "discount factor")->check(CLI::Range(1e-9, 1.0));
  gap->add_option("--max-iters", gap_max_iters, "iteration cap per run")
      ->check(CLI::PositiveNumber);
  gap->add_option("--out", gap_out, "output CSV path");
  gap->add_flag("--svg", gap_svg, "also write an SVG next to the CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "gradient alignment across (alpha, gamma) cells");
  std::string sweep_alphas = "0.3,1.0", sweep_gammas = "0.7,0.99", sweep_out = "sweep.csv";
  sweep->set_config("--config");
  sweep->add_option("--alphas", sweep_alphas, "comma-separated dynamics-speed factors");
  sweep->add_option("--gammas", sweep_gammas, "comma-separated discount factors");
  sweep->add_option("--out", sweep_out, "output CSV path");

  // mdp-demo
  auto* demo = app.add_subcommand("mdp-demo", "objective trajectories of the tabular methods");
  std::string demo_mdp, demo_out = "mdp_demo.json";
  double demo_gamma = 0.9;
  int demo_iterations = 60;
  std::vector<std::string> demo_methods = polopt::experiments::mdp_demo_methods();
  demo->set_config("--config");
  demo->add_option("--mdp", demo_mdp, "MDP JSON file")->required();
  demo->add_option("--gamma", demo_gamma, "discount factor")->check(CLI::Range(1e-9, 1.0));
  demo->add_option("--iterations", demo_iterations, "outer iterations per method")
      ->check(CLI::PositiveNumber);
  demo->add_option("--methods", demo_methods, "subset of methods to run (empty list allowed)")
      ->expected(0, -1);
  demo->add_option("--out", demo_out, "output JSON path");

  CLI11_PARSE(app, argc, argv);
  if (demo_methods.size() == 1 && demo_methods[0].empty()) demo_methods.clear();

  try {
    if (*verify) return run_verify(filter, gamma_correction);
    if (*vf) return run_vector_field(vf_problem, vf_gamma, vf_grid, vf_out, vf_svg);
    if (*gap) return run_gap(gap_problem, gap_gamma, gap_max_iters, gap_out, gap_svg);
    if (*sweep) return run_sweep(sweep_alphas, sweep_gammas, sweep_out);
    if (*demo) return run_mdp_demo(demo_mdp, demo_gamma, demo_iterations, demo_methods, demo_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
