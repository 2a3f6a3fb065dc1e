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

// bethe: instance generation, solving, exact inference and benchmarks.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bethe/bethe.hpp"

namespace {

using namespace bethe;

std::vector<Algorithm> parse_algorithms(const std::string& list) {
  std::vector<Algorithm> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_algorithm(item));
  }
  return out;
}

void emit_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  if (path.empty() || path == "-") {
    write_report_csv(std::cout, rows);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_report_csv(out, rows);
}

json ground_truth_json(const SnlInstance& inst) {
  json s = json::array(), a = json::array();
  for (const auto& p : inst.sensors) s.push_back({p[0], p[1]});
  for (const auto& p : inst.anchors) a.push_back({p[0], p[1]});
  return {{"sensors", s},          {"anchors", a},
          {"t", inst.t},           {"seed_used", inst.seed_used},
          {"measurements", inst.measurements}, {"outliers", inst.outliers}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bethe variational solvers: Bregman ADMM, belief propagation and their quantum versions"};
  app.require_subcommand(1);

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a benchmark instance");
  gen->require_subcommand(1);
  std::string out_path;

  int sg_dim = 2, sg_n1 = 10;
  double sg_sigma = 1.0;
  std::uint64_t seed = 1;
  auto* g_sg = gen->add_subcommand("spinglass", "2D grid or 3D lattice spin glass, r = 2");
  g_sg->add_option("--dim", sg_dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  g_sg->add_option("--n1", sg_n1, "side length")->check(CLI::PositiveNumber);
  g_sg->add_option("--sigma", sg_sigma, "cost standard deviation");
  g_sg->add_option("--seed", seed, "random seed");
  g_sg->add_option("-o,--out", out_path, "output model file")->required();

  int snl_n = 100, snl_a = 4, snl_t = 10;
  double snl_sigma = 0.02, snl_R = 0.1, snl_out = 0.0;
  auto* g_snl = gen->add_subcommand("snl", "Discretized sensor network localization");
  g_snl->add_option("--n", snl_n, "number of sensors");
  g_snl->add_option("--anchors", snl_a, "number of anchors");
  g_snl->add_option("--t", snl_t, "grid resolution, r = (t+1)^2");
  g_snl->add_option("--sigma", snl_sigma, "distance noise level");
  g_snl->add_option("--R", snl_R, "observation range parameter");
  g_snl->add_option("--outliers", snl_out, "fraction of measurements replaced by U[0,1]");
  g_snl->add_option("--seed", seed, "random seed");
  g_snl->add_option("-o,--out", out_path, "output model file")->required();

  int is_n1 = 10;
  double hx = 1.05, hz = 0.5, J = 1.0, T = 1.0;
  auto* g_is = gen->add_subcommand("ising", "Transverse-field Ising model on a grid (quantum)");
  g_is->add_option("--n1", is_n1, "side length");
  g_is->add_option("--hx", hx, "transverse field");
  g_is->add_option("--hz", hz, "longitudinal field");
  g_is->add_option("--J", J, "coupling");
  g_is->add_option("--T", T, "temperature");
  g_is->add_option("-o,--out", out_path, "output model file")->required();

  // solve -------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "Run one solver on a model file");
  std::string model_path, alg_name, report_path, solution_path;
  SolverConfig config;
  solve->add_option("--model", model_path, "model file")->required();
  solve->add_option("--alg", alg_name, "badmm|jbp|gsbp|qbadmm|jqbp|gsqbp")->required();
  solve->add_option("--tol", config.tol, "stopping tolerance");
  solve->add_option("--maxiter", config.maxiter, "iteration limit");
  solve->add_option("--rho0", config.rho0, "initial penalty");
  solve->add_option("--time-limit", config.time_limit, "wall-clock limit in seconds");
  solve->add_option("--report", report_path, "write the CSV report row here");
  solve->add_option("--solution", solution_path, "write the solution JSON here");

  // oracle ------------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "Exact inference by enumeration (r^n <= 1e8)");
  std::string oracle_out;
  oracle->add_option("--model", model_path, "model file")->required();
  oracle->add_option("--out", oracle_out, "output JSON (stdout if omitted)");

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  std::string suite, algs_list, bench_out;
  BenchmarkOptions bopt;
  double bench_tol = 0.0;
  int bench_n1 = 0;
  bench->add_option("suite", suite, "ising|spinglass|snl")->required()->check(
      CLI::IsMember({"ising", "spinglass", "snl"}));
  bench->add_option("--algs", algs_list, "comma-separated algorithms")->required();
  bench->add_option("--out", bench_out, "output CSV (stdout if omitted)");
  bench->add_option("--tol", bench_tol, "tolerance (suite default if omitted)");
  bench->add_option("--maxiter", bopt.maxiter, "iteration limit");
  bench->add_option("--time-limit", bopt.time_limit, "per-run limit in seconds");
  bench->add_option("--seed", bopt.seed, "seed for random suites");
  bench->add_option("--n1", bench_n1, "grid side (ising default 10, spinglass default 50)");
  bench->add_option("--dim", bopt.sg_dim, "spinglass dimension")->check(CLI::IsMember({2, 3}));
  bench->add_flag("--alt-fields", bopt.ising_alt_fields, "ising with (hx, hz, J) = (2.5, 0, -1)");
  bench->add_flag("--outliers", bopt.snl_outliers, "snl with 5% outliers");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (g_sg->parsed()) {
        save_model(out_path, gen_spinglass(sg_dim, sg_n1, sg_sigma, seed));
      } else if (g_snl->parsed()) {
        SnlInstance inst = gen_snl(snl_n, snl_a, snl_t, snl_sigma, snl_R, snl_out, seed);
        json j = model_to_json(inst.model);
        j["ground_truth"] = ground_truth_json(inst);
        write_json(out_path, j);
      } else {
        save_model(out_path, gen_ising(is_n1, hx, hz, J, T));
      }
      return 0;
    }

    if (solve->parsed()) {
      const AnyModel model = load_model(model_path);
      const Algorithm alg = parse_algorithm(alg_name);
      const RunOutcome run = run_algorithm(model, alg, config);
      const std::string problem = std::filesystem::path(model_path).stem().string();
      const std::vector<ReportRow> rows{make_row(problem, std::string(to_string(alg)), run.report)};
      write_report_csv(std::cout, rows);
      if (!report_path.empty()) emit_csv(report_path, rows);
      if (!solution_path.empty()) write_json(solution_path, run.solution);
      std::cerr << "status: " << to_string(run.report.status) << '\n';
      return 0;
    }

    if (oracle->parsed()) {
      const AnyModel model = load_model(model_path);
      const auto* pm = std::get_if<PairwiseModel>(&model);
      if (!pm) throw std::invalid_argument("oracle needs a classical model");
      const ExactInference ex = exact_inference(*pm);
      SolveReport rep;
      rep.status = SolveStatus::Converged;
      rep.fval = -ex.logZ;
      rep.resp = rep.resd = 0.0;
      json j = solution_to_json(*pm, ex.node_marginals, ex.edge_marginals, nullptr, rep);
      j.erase("report");
      j["logZ"] = ex.logZ;
      if (oracle_out.empty()) {
        std::cout << j.dump(1) << '\n';
      } else {
        write_json(oracle_out, j);
      }
      return 0;
    }

    if (bench->parsed()) {
      if (bench_tol > 0.0) bopt.tol = bench_tol;
      if (bench_n1 > 0) bopt.ising_n1 = bopt.sg_n1 = bench_n1;
      emit_csv(bench_out, run_benchmark(suite, parse_algorithms(algs_list), bopt));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
