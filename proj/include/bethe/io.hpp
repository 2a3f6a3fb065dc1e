// Copyright 2026 The Bethe Solver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON model/solution files and the CSV report format.
//
// Model file: {"n", "r", "edges": [[i,j], ...] (1-based, i<j),
//              "node_cost": n arrays of r reals,
//              "edge_cost": one r x r array (rows = state of i) per edge}.
// Quantum files add "hermitian": true and store each matrix as
// {"re": [...], "im": [...]} in row-major order.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bethe/belief_propagation.hpp"
#include "bethe/badmm.hpp"
#include "bethe/model.hpp"
#include "bethe/quantum.hpp"
#include "json.hpp"

namespace bethe {

using json = nlohmann::json;
using AnyModel = std::variant<PairwiseModel, QuantumModel>;

namespace detail {

/// Flat list of reals from either a flat array or an array of rows.
inline std::vector<double> flatten_reals(const json& j, std::size_t expected, const std::string& what) {
  std::vector<double> out;
  if (!j.is_array()) throw ModelError(what + ": expected an array");
  for (const auto& v : j) {
    if (v.is_array()) {
      for (const auto& w : v) {
        if (!w.is_number()) throw ModelError(what + ": expected numbers");
        out.push_back(w.get<double>());
      }
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ModelError(what + ": expected numbers");
    }
  }
  if (out.size() != expected) {
    throw ModelError(what + ": expected " + std::to_string(expected) + " entries, got " +
                     std::to_string(out.size()));
  }
  return out;
}

inline json rows_json(std::span<const double> flat, int r) {
  json rows = json::array();
  for (int s = 0; s < r; ++s) rows.push_back(std::vector<double>(flat.begin() + s * r, flat.begin() + (s + 1) * r));
  return rows;
}

inline std::vector<Edge> edges_from_json(const json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ModelError("edges: each edge must be [i, j]");
    edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1});
  }
  return edges;
}

inline json edges_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const auto& [i, j] : edges) out.push_back({i + 1, j + 1});
  return out;
}

}  // namespace detail

inline json matrix_to_json(const HermitianMatrix& a) {
  std::vector<double> re, im;
  for (const complex& z : a.data()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return {{"re", re}, {"im", im}};
}

inline HermitianMatrix matrix_from_json(const json& j, int dim, const std::string& what) {
  if (!j.is_object() || !j.contains("re")) throw ModelError(what + ": expected {re, im}");
  const std::size_t count = static_cast<std::size_t>(dim) * dim;
  const std::vector<double> re = detail::flatten_reals(j.at("re"), count, what + ".re");
  const std::vector<double> im =
      j.contains("im") ? detail::flatten_reals(j.at("im"), count, what + ".im") : std::vector<double>(count, 0.0);
  std::vector<complex> z(count);
  for (std::size_t k = 0; k < count; ++k) z[k] = {re[k], im[k]};
  try {
    return HermitianMatrix::from_rows(dim, z);
  } catch (const std::invalid_argument& e) {
    throw ModelError(what + ": " + e.what());
  }
}

inline json model_to_json(const PairwiseModel& m) {
  const int r = m.num_states();
  json nodes = json::array(), edges = json::array();
  for (int k = 0; k < m.num_nodes(); ++k) {
    const auto c = m.node_cost(k);
    nodes.push_back(std::vector<double>(c.begin(), c.end()));
  }
  for (int e = 0; e < m.num_edges(); ++e) edges.push_back(detail::rows_json(m.edge_cost(e), r));
  return {{"n", m.num_nodes()}, {"r", r}, {"edges", detail::edges_json(m.edges())},
          {"node_cost", nodes}, {"edge_cost", edges}};
}

inline json model_to_json(const QuantumModel& m) {
  json nodes = json::array(), edges = json::array();
  for (const auto& c : m.node_costs()) nodes.push_back(matrix_to_json(c));
  for (const auto& c : m.edge_costs()) edges.push_back(matrix_to_json(c));
  return {{"n", m.num_nodes()}, {"r", m.num_states()}, {"hermitian", true},
          {"edges", detail::edges_json(m.edges())}, {"node_cost", nodes}, {"edge_cost", edges}};
}

inline AnyModel model_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int r = j.at("r").get<int>();
    if (n < 1 || r < 1) throw ModelError("n and r must be positive");
    std::vector<Edge> edges = detail::edges_from_json(j);
    const json& nc = j.at("node_cost");
    const json& ec = j.at("edge_cost");
    if (!nc.is_array() || nc.size() != static_cast<std::size_t>(n)) {
      throw ModelError("node_cost must hold n entries");
    }
    if (!ec.is_array() || ec.size() != edges.size()) {
      throw ModelError("edge_cost must hold one entry per edge");
    }
    if (j.value("hermitian", false)) {
      std::vector<HermitianMatrix> nodes, ecs;
      for (int k = 0; k < n; ++k) nodes.push_back(matrix_from_json(nc[k], r, "node_cost[" + std::to_string(k + 1) + "]"));
      for (std::size_t e = 0; e < edges.size(); ++e) {
        ecs.push_back(matrix_from_json(ec[e], r * r, "edge_cost[" + std::to_string(e + 1) + "]"));
      }
      return QuantumModel::create(n, r, std::move(edges), std::move(nodes), std::move(ecs));
    }
    BlockArray<double> node(n, r), edge(edges.size(), static_cast<std::size_t>(r) * r);
    for (int k = 0; k < n; ++k) {
      const auto v = detail::flatten_reals(nc[k], r, "node_cost[" + std::to_string(k + 1) + "]");
      std::copy(v.begin(), v.end(), node[k].begin());
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto v = detail::flatten_reals(ec[e], static_cast<std::size_t>(r) * r,
                                           "edge_cost[" + std::to_string(e + 1) + "]");
      std::copy(v.begin(), v.end(), edge[e].begin());
    }
    return PairwiseModel::create(n, r, std::move(edges), std::move(node), std::move(edge));
  } catch (const json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

inline AnyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ModelError(path + ": " + e.what());
  }
  return model_from_json(j);
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(1) << '\n';
}

inline void save_model(const std::string& path, const AnyModel& model) {
  write_json(path, std::visit([](const auto& m) { return model_to_json(m); }, model));
}

inline json report_to_json(const SolveReport& rep) {
  return {{"status", std::string(to_string(rep.status))},
          {"fval", rep.fval},
          {"resp", rep.resp},
          {"resd", rep.resd},
          {"iter", rep.iters},
          {"time", rep.elapsed},
          {"rho_final", rep.rho_final}};
}

/// Classical solution document. Multipliers are optional (BP has none).
inline json solution_to_json(const PairwiseModel& model, const NodeMarginals& q,
                             const EdgeMarginals& Q, const EdgeMultipliers* dual,
                             const SolveReport& rep) {
  const int r = model.num_states();
  json jq = json::array(), jQ = json::array();
  for (std::size_t k = 0; k < q.size(); ++k) jq.push_back(std::vector<double>(q[k].begin(), q[k].end()));
  for (std::size_t e = 0; e < Q.size(); ++e) jQ.push_back(detail::rows_json(Q[e], r));
  json out = {{"q", jq}, {"Q", jQ}, {"report", report_to_json(rep)}};
  if (dual) {
    json l = json::array(), m = json::array();
    for (std::size_t e = 0; e < dual->lambda.size(); ++e) {
      l.push_back(std::vector<double>(dual->lambda[e].begin(), dual->lambda[e].end()));
      m.push_back(std::vector<double>(dual->mu[e].begin(), dual->mu[e].end()));
    }
    out["lambda"] = l;
    out["mu"] = m;
  }
  return out;
}

inline json solution_to_json(const std::vector<HermitianMatrix>& q,
                             const std::vector<HermitianMatrix>& Q,
                             const HermitianMultipliers* dual, const SolveReport& rep) {
  json jq = json::array(), jQ = json::array();
  for (const auto& a : q) jq.push_back(matrix_to_json(a));
  for (const auto& a : Q) jQ.push_back(matrix_to_json(a));
  json out = {{"hermitian", true}, {"q", jq}, {"Q", jQ}, {"report", report_to_json(rep)}};
  if (dual) {
    json l = json::array(), m = json::array();
    for (const auto& a : dual->lambda) l.push_back(matrix_to_json(a));
    for (const auto& a : dual->mu) m.push_back(matrix_to_json(a));
    out["lambda"] = l;
    out["mu"] = m;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV report.

struct ReportRow {
  std::string problem;
  std::string algorithm;
  double resp = 0.0;
  double resd = 0.0;
  double fval = 0.0;
  int iter = 0;
  double time = 0.0;
  bool converged = false;

  friend bool operator==(const ReportRow& a, const ReportRow& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.problem == b.problem && a.algorithm == b.algorithm && same(a.resp, b.resp) &&
           same(a.resd, b.resd) && same(a.fval, b.fval) && a.iter == b.iter &&
           same(a.time, b.time) && a.converged == b.converged;
  }
};

inline ReportRow make_row(std::string problem, std::string algorithm, const SolveReport& rep) {
  return {std::move(problem), std::move(algorithm), rep.resp, rep.resd, rep.fval,
          rep.iters,          rep.elapsed,          rep.converged()};
}

inline constexpr const char* kReportHeader = "problem,algorithm,Resp,Resd,fval,iter,time,converged";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string csv_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        out.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows, bool header = true) {
  if (header) out << kReportHeader << '\n';
  for (const auto& row : rows) {
    out << detail::csv_field(row.problem) << ',' << detail::csv_field(row.algorithm) << ','
        << detail::csv_real(row.resp) << ',' << detail::csv_real(row.resd) << ','
        << detail::csv_real(row.fval) << ',' << row.iter << ',' << detail::csv_real(row.time) << ','
        << (row.converged ? "true" : "false") << '\n';
  }
}

inline std::vector<ReportRow> parse_report_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      first = false;
      if (line.rfind("problem,", 0) == 0) continue;
    }
    const auto f = detail::split_csv_line(line);
    if (f.size() != 8) throw std::invalid_argument("report row must have 8 fields: " + line);
    ReportRow row;
    row.problem = f[0];
    row.algorithm = f[1];
    row.resp = detail::parse_real(f[2]);
    row.resd = detail::parse_real(f[3]);
    row.fval = detail::parse_real(f[4]);
    row.iter = std::stoi(f[5]);
    row.time = detail::parse_real(f[6]);
    if (f[7] != "true" && f[7] != "false") throw std::invalid_argument("converged must be true/false");
    row.converged = f[7] == "true";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bethe
