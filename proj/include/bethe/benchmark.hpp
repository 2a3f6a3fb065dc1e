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

// Algorithm dispatch over classical and quantum models, and the benchmark
// suites behind `bethe bench`.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bethe/badmm.hpp"
#include "bethe/belief_propagation.hpp"
#include "bethe/generators.hpp"
#include "bethe/io.hpp"
#include "bethe/quantum.hpp"

namespace bethe {

enum class Algorithm { BADMM, JBP, GSBP, QBADMM, JQBP, GSQBP };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::BADMM: return "BADMM";
    case Algorithm::JBP: return "JBP";
    case Algorithm::GSBP: return "GSBP";
    case Algorithm::QBADMM: return "QBADMM";
    case Algorithm::JQBP: return "JQBP";
    case Algorithm::GSQBP: return "GSQBP";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  if (name == "badmm") return Algorithm::BADMM;
  if (name == "jbp") return Algorithm::JBP;
  if (name == "gsbp") return Algorithm::GSBP;
  if (name == "qbadmm") return Algorithm::QBADMM;
  if (name == "jqbp" || name == "qjbp") return Algorithm::JQBP;
  if (name == "gsqbp" || name == "qgsbp") return Algorithm::GSQBP;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

inline bool is_quantum(Algorithm a) {
  return a == Algorithm::QBADMM || a == Algorithm::JQBP || a == Algorithm::GSQBP;
}

/// Report plus the solution document of one run.
struct RunOutcome {
  SolveReport report;
  json solution;
};

/// Runs `alg` on `model`. Classical models given to a quantum algorithm are
/// embedded diagonally; quantum models reject classical algorithms.
inline RunOutcome run_algorithm(const AnyModel& model, Algorithm alg, const SolverConfig& config) {
  if (const auto* pm = std::get_if<PairwiseModel>(&model)) {
    switch (alg) {
      case Algorithm::BADMM: {
        const BadmmResult r = solve_badmm(*pm, config);
        return {r.report, solution_to_json(*pm, r.q, r.Q, &r.multipliers, r.report)};
      }
      case Algorithm::JBP:
      case Algorithm::GSBP: {
        const BpResult r = bp_solve(*pm, config, alg == Algorithm::JBP ? BpSchedule::Jacobi : BpSchedule::GaussSeidel);
        return {r.report, solution_to_json(*pm, r.q, r.Q, nullptr, r.report)};
      }
      default:
        return run_algorithm(AnyModel(QuantumModel::from_classical(*pm)), alg, config);
    }
  }
  const auto& qm = std::get<QuantumModel>(model);
  switch (alg) {
    case Algorithm::QBADMM: {
      const QuantumResult r = qbadmm_solve(qm, config);
      return {r.report, solution_to_json(r.node_densities(), r.edge_densities(), &r.multipliers, r.report)};
    }
    case Algorithm::JQBP:
    case Algorithm::GSQBP: {
      const QbpResult r = qbp_solve(qm, config, alg == Algorithm::JQBP ? BpSchedule::Jacobi : BpSchedule::GaussSeidel);
      std::vector<HermitianMatrix> q, Q;
      for (const auto& s : r.beliefs.q) q.push_back(s.rho);
      for (const auto& s : r.beliefs.Q) Q.push_back(s.rho);
      return {r.report, solution_to_json(q, Q, nullptr, r.report)};
    }
    default:
      throw std::invalid_argument(std::string(to_string(alg)) + " needs a classical model");
  }
}

struct BenchmarkOptions {
  std::optional<double> tol;  // per-suite default when unset: 1e-4 for snl, 1e-6 otherwise
  int maxiter = 10000;
  double rho0 = 1.0;
  double time_limit = 3600.0;
  std::uint64_t seed = 1;
  // ising
  int ising_n1 = 10;
  bool ising_alt_fields = false;  // (hx, hz, J) = (2.5, 0, -1) instead of (1.05, 0.5, 1)
  std::vector<double> ising_T{1.0, 0.1, 0.01};
  // spinglass
  int sg_dim = 2;
  int sg_n1 = 50;
  std::vector<double> sg_sigma{1.0, 2.0, 5.0};
  // snl
  int snl_n = 100;
  int snl_anchors = 4;
  int snl_t = 10;
  bool snl_outliers = false;  // 5% outliers with the absolute-deviation potentials
  std::vector<double> snl_R{0.1, 0.2};
};

namespace detail {

inline std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline ReportRow failed_row(std::string problem, Algorithm alg) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {std::move(problem), std::string(to_string(alg)), nan, nan, nan, 0, 0.0, false};
}

}  // namespace detail

/// One row per (instance, algorithm). A run that throws is recorded as a
/// non-converged row with NaN values and the suite continues.
inline std::vector<ReportRow> run_benchmark(const std::string& suite, const std::vector<Algorithm>& algs,
                                            const BenchmarkOptions& opt = {}) {
  struct Instance {
    std::string name;
    AnyModel model;
  };
  std::vector<Instance> instances;
  double tol = opt.tol.value_or(1e-6);

  if (suite == "ising") {
    const double hx = opt.ising_alt_fields ? 2.5 : 1.05;
    const double hz = opt.ising_alt_fields ? 0.0 : 0.5;
    const double J = opt.ising_alt_fields ? -1.0 : 1.0;
    for (double T : opt.ising_T) {
      instances.push_back({"n=" + std::to_string(opt.ising_n1 * opt.ising_n1) + " T=" + detail::fmt_real(T),
                           gen_ising(opt.ising_n1, hx, hz, J, T)});
    }
  } else if (suite == "spinglass") {
    for (double s : opt.sg_sigma) {
      PairwiseModel m = gen_spinglass(opt.sg_dim, opt.sg_n1, s, opt.seed);
      instances.push_back({"n=" + std::to_string(m.num_nodes()) + " sigma=" + detail::fmt_real(s), std::move(m)});
    }
  } else if (suite == "snl") {
    tol = opt.tol.value_or(1e-4);
    const std::vector<double> sigmas = opt.snl_outliers ? std::vector<double>{0.005, 0.01, 0.02}
                                                        : std::vector<double>{0.02, 0.05, 0.1};
    for (double s : sigmas) {
      for (double R : opt.snl_R) {
        SnlInstance inst = gen_snl(opt.snl_n, opt.snl_anchors, opt.snl_t, s, R,
                                   opt.snl_outliers ? 0.05 : 0.0, opt.seed);
        instances.push_back({"sigma=" + detail::fmt_real(s) + " R=" + detail::fmt_real(R), std::move(inst.model)});
      }
    }
  } else {
    throw std::invalid_argument("unknown suite '" + suite + "' (expected ising, spinglass or snl)");
  }

  SolverConfig config;
  config.tol = tol;
  config.maxiter = opt.maxiter;
  config.rho0 = opt.rho0;
  config.time_limit = opt.time_limit;

  std::vector<ReportRow> rows;
  for (const auto& inst : instances) {
    for (Algorithm alg : algs) {
      try {
        rows.push_back(make_row(inst.name, std::string(to_string(alg)), run_algorithm(inst.model, alg, config).report));
      } catch (const std::exception&) {
        rows.push_back(detail::failed_row(inst.name, alg));
      }
    }
  }
  return rows;
}

}  // namespace bethe
