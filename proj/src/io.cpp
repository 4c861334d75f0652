#include "polopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polopt::io {

using nlohmann::json;

namespace {

Eigen::MatrixXd parse_matrix(const json& rows, const std::string& name) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ValidationError("load: '" + name + "' must be a nested array");
  const std::size_t n_cols = rows[0].size();
  Eigen::MatrixXd m(rows.size(), n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != n_cols)
      throw ValidationError("load: ragged rows in '" + name + "' at row " + std::to_string(i));
    for (std::size_t j = 0; j < n_cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

json dump_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json setup_to_json(const Setup& setup) {
  json j;
  j["kind"] = setup.is_discounted() ? "discounted" : "average";
  if (setup.is_discounted()) j["gamma"] = setup.gamma;
  return j;
}

Setup setup_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "average") return Setup::average();
  if (kind == "discounted") return Setup::discounted(j.at("gamma").get<double>());
  throw ValidationError("load: unknown setup kind '" + kind + "'");
}

}  // namespace

TabularMdp load_mdp_json(const std::string& text) {
  json j;
  int n = 0;
  int na = 0;
  try {
    j = json::parse(text);
    n = j.at("n_states").get<int>();
    na = j.at("n_actions").get<int>();
    j.at("transition");
    j.at("reward");
    j.at("rho0");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("load_mdp_json: ") + e.what());
  }
  const json& trans = j.at("transition");
  if (!trans.is_array() || static_cast<int>(trans.size()) != n)
    throw ValidationError("load_mdp_json: 'transition' must have n_states outer entries");

  std::vector<Eigen::MatrixXd> transition(na, Eigen::MatrixXd(n, n));
  for (int s = 0; s < n; ++s) {
    const json& per_action = trans[s];
    if (!per_action.is_array() || static_cast<int>(per_action.size()) != na)
      throw ValidationError("load_mdp_json: transition[" + std::to_string(s) +
                            "] must list n_actions rows");
    for (int a = 0; a < na; ++a) {
      const json& row = per_action[a];
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        throw ValidationError("load_mdp_json: transition[" + std::to_string(s) + "][" +
                              std::to_string(a) + "] must have n_states entries");
      for (int sp = 0; sp < n; ++sp) transition[a](s, sp) = row[sp].get<double>();
    }
  }
  const Eigen::MatrixXd reward = parse_matrix(j.at("reward"), "reward");
  if (reward.rows() != n || reward.cols() != na)
    throw ValidationError("load_mdp_json: 'reward' must be n_states x n_actions");
  const json& rho_j = j.at("rho0");
  Eigen::VectorXd rho0(n);
  if (!rho_j.is_array() || static_cast<int>(rho_j.size()) != n)
    throw ValidationError("load_mdp_json: 'rho0' must have n_states entries");
  for (int s = 0; s < n; ++s) rho0(s) = rho_j[s].get<double>();
  return TabularMdp(std::move(transition), reward, std::move(rho0));
}

std::string dump_mdp_json(const TabularMdp& mdp) {
  json j;
  j["n_states"] = mdp.n_states();
  j["n_actions"] = mdp.n_actions();
  json trans = json::array();
  for (int s = 0; s < mdp.n_states(); ++s) {
    json per_action = json::array();
    for (int a = 0; a < mdp.n_actions(); ++a) {
      json row = json::array();
      for (int sp = 0; sp < mdp.n_states(); ++sp) row.push_back(mdp.transition(s, a, sp));
      per_action.push_back(row);
    }
    trans.push_back(per_action);
  }
  j["transition"] = trans;
  j["reward"] = dump_matrix(mdp.reward());
  json rho = json::array();
  for (int s = 0; s < mdp.n_states(); ++s) rho.push_back(mdp.rho0()(s));
  j["rho0"] = rho;
  return j.dump(2);
}

lqr::LqrProblem load_lqr_problem_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    j.at("a");
    j.at("b");
    j.at("w");
    j.at("q");
    j.at("r");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("load_lqr_problem_json: ") + e.what());
  }
  return lqr::LqrProblem(parse_matrix(j.at("a"), "a"), parse_matrix(j.at("b"), "b"),
                         parse_matrix(j.at("w"), "w"), parse_matrix(j.at("q"), "q"),
                         parse_matrix(j.at("r"), "r"));
}

std::string dump_lqr_problem_json(const lqr::LqrProblem& problem) {
  json j;
  j["a"] = dump_matrix(problem.a);
  j["b"] = dump_matrix(problem.b);
  j["w"] = dump_matrix(problem.w);
  j["q"] = dump_matrix(problem.q);
  j["r"] = dump_matrix(problem.r);
  return j.dump(2);
}

std::string dump_gradient_report_json(const GradientReport& report) {
  json j;
  j["method"] = report.method;
  j["setup"] = setup_to_json(report.setup);
  j["grad"] = std::vector<double>(report.grad.data(), report.grad.data() + report.grad.size());
  if (report.curvature) {
    std::vector<double> flat;
    flat.reserve(report.curvature->size());
    for (int i = 0; i < report.curvature->rows(); ++i)
      for (int k = 0; k < report.curvature->cols(); ++k) flat.push_back((*report.curvature)(i, k));
    j["curvature"] = flat;
  }
  return j.dump(2);
}

GradientReport load_gradient_report_json(const std::string& text) {
  json j;
  GradientReport report;
  std::vector<double> grad;
  try {
    j = json::parse(text);
    report.method = j.at("method").get<std::string>();
    report.setup = setup_from_json(j.at("setup"));
    grad = j.at("grad").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("load_gradient_report_json: ") + e.what());
  }
  report.grad = Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size());
  if (j.contains("curvature")) {
    const auto flat = j.at("curvature").get<std::vector<double>>();
    const int dim = static_cast<int>(report.grad.size());
    if (static_cast<int>(flat.size()) != dim * dim)
      throw ValidationError("load_gradient_report_json: curvature size mismatch");
    Eigen::MatrixXd w(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k) w(i, k) = flat[i * dim + k];
    report.curvature = w;
  }
  return report;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("read_file: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("write_file: cannot open " + path);
  out << content;
}

std::string format_cell(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ValidationError("csv_table: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace polopt::io
