// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "semiprop/report.hpp"

#include <sstream>
#include <stdexcept>

namespace semiprop {

using nlohmann::json;

json to_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Mat& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

json with_schema(json body) {
  body["schema"] = kSchema;
  return body;
}

json solve_report(const ClassicalPath& path) {
  return {{"v0", to_json(path.v0())},
          {"S", action(path)},
          {"iterations", path.iterations},
          {"terminal_error", path.terminal_error}};
}

json series_report(const SeriesResult& r) {
  json diagrams = json::array();
  for (const auto& d : r.diagrams)
    diagrams.push_back({{"key", d.key},
                        {"lambda", d.loops},
                        {"value", d.value.value},
                        {"est_error", d.value.est_error},
                        {"aut", d.aut},
                        {"contribution", d.contribution}});
  return {{"v", r.v.coeffs},
          {"S", r.action},
          {"logdet", r.logdet},
          {"v0", to_json(r.v0)},
          {"diagrams", std::move(diagrams)}};
}

json diagrams_report(int max_loops) {
  json rows = json::array();
  for (const auto& e : diagram_catalog(max_loops))
    rows.push_back({{"key", e.key},
                    {"vertices", e.diagram.base.vertices.size()},
                    {"edges", e.diagram.base.edges.size()},
                    {"lambda", e.loops},
                    {"marks", e.diagram.marks.size()},
                    {"aut", e.aut}});
  return rows;
}

json eval_report(const std::string& key, std::int64_t aut, const DiagramValue& v) {
  return {{"key", key},
          {"aut", aut},
          {"value", v.value},
          {"est_error", v.est_error},
          {"n_labelings", v.n_labelings},
          {"n_simplices", v.n_simplices}};
}

json kernel_report(const GreenKernel& kernel, double s, double u) {
  const auto d = kernel.derivatives(s, u);
  return {{"at", {s, u}},
          {"G", to_json(kernel.green(s, u))},
          {"dG", to_json(d.d1)},
          {"d2G_smooth", to_json(d.d11_smooth)},
          {"jump", to_json(d.jump)}};
}

json residual_report(const ResidualReport& r) {
  json rows = json::array();
  for (std::size_t k = 0; k < r.orders.size(); ++k)
    rows.push_back({{"order", k}, {"residual", r.orders[k]}, {"signed", r.signed_orders[k]}, {"budget", r.budgets[k]}});
  return {{"suite", "sev"},
          {"orders", std::move(rows)},
          {"fd_step", r.fd_step},
          {"quadrature_tol", r.quadrature_tol},
          {"fixed_steps", r.fixed_steps},
          {"grid", r.grid},
          {"pass", r.within_budget()}};
}

json hamilton_jacobi_report(const HamiltonJacobiReport& r) {
  return {{"suite", "hj"},
          {"at_q0", r.at_q0},
          {"at_q1", r.at_q1},
          {"fd_step", r.fd_step},
          {"budget", r.budget},
          {"pass", r.within_budget()}};
}

json short_time_report(const ShortTimeReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t},
                    {"q0", to_json(row.q0)},
                    {"dev_a", row.dev_a},
                    {"dev_b", row.dev_b},
                    {"dev_c", row.dev_c},
                    {"ratio_d", row.ratio_d},
                    {"dev_d", row.dev_d},
                    {"v2", optional_number(row.v2)}});
  return {{"suite", "short-time"},
          {"rows", std::move(rows)},
          {"slopes",
           {{"a", optional_number(r.slope_a)},
            {"b", optional_number(r.slope_b)},
            {"c", optional_number(r.slope_c)},
            {"d", optional_number(r.slope_d)}}},
          {"d_monotone", r.d_monotone},
          {"pass", r.within_budget()}};
}

json semigroup_report(const SemigroupReport& r) {
  return {{"suite", "semigroup"},
          {"q_star", to_json(r.q_star)},
          {"action", {{"full", r.action_full}, {"legs", r.action_legs}, {"defect", r.action_defect}}},
          {"vanvleck",
           {{"full", r.vanvleck_full}, {"composed", r.vanvleck_composed}, {"defect", r.vanvleck_defect}}},
          {"morse",
           {{"full", r.morse_full},
            {"first", r.morse_first},
            {"second", r.morse_second},
            {"hessian_index", r.hessian_index},
            {"additive", r.morse_additive()}}},
          {"pass", r.within_budget()}};
}

std::string to_csv(const json& rows) {
  if (!rows.is_array()) throw std::invalid_argument("CSV output needs a table");
  std::ostringstream os;
  if (rows.empty()) return "";
  std::vector<std::string> keys;
  for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
  for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << keys[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const auto& cell = row.at(keys[i]);
      os << (i ? "," : "");
      if (cell.is_string())
        os << quoted(cell.get<std::string>());
      else if (cell.is_array() || cell.is_object())
        os << quoted(cell.dump());
      else
        os << cell.dump();
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace semiprop
