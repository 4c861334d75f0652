#pragma once

#include <string>
#include <vector>

#include "polopt/lqr.hpp"
#include "polopt/mdp.hpp"
#include "polopt/optimizers.hpp"

namespace polopt::io {

/// MDP JSON schema: {"n_states", "n_actions", "transition" (s -> a -> s'),
/// "reward" (s -> a), "rho0"}. The loader reports the first violated
/// invariant with indices.
TabularMdp load_mdp_json(const std::string& text);
std::string dump_mdp_json(const TabularMdp& mdp);

/// LQR problem JSON schema: {"a", "b", "w", "q", "r"} as nested row-major
/// arrays; dimensions are inferred and validated.
lqr::LqrProblem load_lqr_problem_json(const std::string& text);
std::string dump_lqr_problem_json(const lqr::LqrProblem& problem);

/// GradientReport JSON: {"method", "setup", "grad", "curvature"?} with
/// row-major (s, a) coordinate order.
std::string dump_gradient_report_json(const GradientReport& report);
GradientReport load_gradient_report_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Deterministic CSV cell formatting: '.' decimal separator, shortest
/// round-trip representation, NaN spelled "nan".
std::string format_cell(double value);

/// Rows of doubles under a fixed header, byte-stable across reruns.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

}  // namespace polopt::io
