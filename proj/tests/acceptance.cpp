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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reduced_problem.hpp"
#include "test_support.hpp"

using namespace bethe;
using namespace bethe::testing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

Outcome ising_rows(double hx, double hz, double J, const std::vector<std::pair<double, double>>& targets) {
  bool ok = true;
  std::string detail;
  for (const auto& [T, want] : targets) {
    const QuantumResult res = qbadmm_solve(gen_ising(10, hx, hz, J, T));
    const double err = rel_err(res.report.fval, want);
    ok = ok && res.report.converged() && err <= 5e-4;
    detail += fmt("T=%g: %s fval %.8e (rel err %.1e, %d iters); ", T,
                  std::string(to_string(res.report.status)).c_str(), res.report.fval, err, res.report.iters);
  }
  return {ok, detail};
}

Outcome criterion1() {
  return ising_rows(1.05, 0.5, 1.0, {{1.0, -2.4386494e+02}, {0.1, -2.4416553e+03}, {0.01, -2.4478820e+04}});
}

Outcome criterion2() { return ising_rows(2.5, 0.0, -1.0, {{1.0, -2.7606705e+02}}); }

Outcome criterion3() {
  CounterRng rng(3003);
  SolverConfig config;
  config.tol = 1e-8;
  double worst_q = 0.0, worst_f = 0.0;
  // Diagnostic only: the same trees with the penalty held at 1. Leaf residuals
  // are norms while the primal residual is a KL, so the balancing rule keeps
  // shrinking rho on trees, and below about 0.45 the iteration is unstable.
  SolverConfig fixed = config;
  fixed.rho_min = fixed.rho_max = 1.0;
  int failures = 0, fixed_failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const int r = 2 + static_cast<int>(rng.below(3));
    const PairwiseModel m = random_tree(n, r, 1.0, rng);
    const ExactInference ex = exact_inference(m);
    auto check = [&](const BadmmResult& res, bool record) {
      const double dq = max_abs_diff(res.q.flat(), ex.node_marginals.flat());
      const double df = std::abs(res.report.fval + ex.logZ);
      if (record) {
        worst_q = std::max(worst_q, dq);
        worst_f = std::max(worst_f, df);
      }
      return res.report.converged() && dq <= 1e-5 && df <= 1e-6;
    };
    if (!check(solve_badmm(m, config), true)) ++failures;
    if (!check(solve_badmm(m, fixed), false)) ++fixed_failures;
  }
  return {failures == 0, fmt("50 trees, %d failures; max |q - exact| %.2e, max |fval + logZ| %.2e; "
                             "diagnostic with rho fixed at 1: %d failures",
                             failures, worst_q, worst_f, fixed_failures)};
}

Outcome criterion4() {
  bool ok = true;
  std::string detail;
  double badmm_fval_sigma1 = 0.0;
  for (double sigma : {1.0, 2.0, 5.0}) {
    const PairwiseModel m = gen_spinglass(2, 20, sigma, 42);
    const BadmmResult res = solve_badmm(m);
    const double res_max = std::max(res.report.resp, res.report.resd);
    ok = ok && res.report.converged() && res_max < 1e-6 && res.report.iters <= 10000;
    if (sigma == 1.0) badmm_fval_sigma1 = res.report.fval;
    detail += fmt("sigma=%g BADMM %s in %d (Res %.1e); ", sigma,
                  std::string(to_string(res.report.status)).c_str(), res.report.iters, res_max);
  }
  const BpResult jbp = bp_solve(gen_spinglass(2, 20, 1.0, 42), SolverConfig{}, BpSchedule::Jacobi);
  const double err = rel_err(jbp.report.fval, badmm_fval_sigma1);
  ok = ok && jbp.report.converged() && err < 1e-3;
  detail += fmt("sigma=1 JBP %s, fval rel diff %.1e", std::string(to_string(jbp.report.status)).c_str(), err);
  return {ok, detail};
}

Outcome criterion5() {
  CounterRng rng(5005);
  double worst_node = 0.0, worst_edge = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int r = 2 + static_cast<int>(rng.below(4));
    const PairwiseModel m = random_model(4, r, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}, 1.0, rng);
    const NodeMarginals q = random_node_marginals(m, rng);
    const EdgeMarginals Q = random_edge_marginals(m, rng);
    const EdgeMultipliers dual = random_multipliers(m, rng);
    const double rho = std::exp(rng.normal());
    const int k = static_cast<int>(rng.below(m.num_nodes()));
    const int e = static_cast<int>(rng.below(m.num_edges()));
    const NodeMarginals q1 = node_update(m, q, Q, dual, rho);
    worst_node = std::max(worst_node, max_abs_diff(q1[k], node_subproblem_oracle(m, k, q, Q, dual, rho)));
    const NodeMarginals q_next = random_node_marginals(m, rng);
    const EdgeMarginals Q1 = edge_update(m, q_next, Q, dual, rho);
    worst_edge = std::max(worst_edge, max_abs_diff(Q1[e], edge_subproblem_oracle(m, e, q_next, Q, dual, rho)));
  }
  return {worst_node < 1e-8 && worst_edge < 1e-8,
          fmt("100+100 subproblems vs Newton; max diff node %.2e, edge %.2e", worst_node, worst_edge)};
}

Outcome criterion6() {
  CounterRng rng(6006);
  double worst = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 2 + static_cast<int>(rng.below(5));
    const double cmax = 3.0 * rng.uniform();
    OTProblem p{r, std::vector<double>(r * r), random_simplex(r, rng, 1.5), random_simplex(r, rng, 1.5)};
    for (double& c : p.C) c = cmax * (2.0 * rng.uniform() - 1.0);
    const LemmaBoundCheck c = check_lemma_bounds(p, sinkhorn(p, 1e-12), 1e-8);
    worst = std::min({worst, c.lambda_slack, c.mu_slack, c.minx_slack});
    if (!c.all()) ++violations;
  }
  return {violations == 0, fmt("200 instances, %d violations, min slack %.3e", violations, worst)};
}

Outcome criterion7() {
  CounterRng rng(7007);
  int minima = 0, below = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 2 + trial % 2;
    BlockArray<double> node(3, r), edge(2, r * r);
    for (double& v : node.flat()) v = 2.0 * rng.uniform() - 1.0;
    for (double& v : edge.flat()) v = 2.0 * rng.uniform() - 1.0;
    const PairwiseModel m = PairwiseModel::create(3, r, {{0, 1}, {1, 2}}, std::move(node), std::move(edge));
    const double sigma = compute_sigma(m).sigma;
    for (int start = 0; start < 5; ++start) {
      NodeMarginals q0(3, r);
      for (int k = 0; k < 3; ++k) fill_simplex(q0[k], rng, 3.0);
      const ReducedMinimum best = minimize_reduced(m, q0);
      ++minima;
      const double qmin = *std::min_element(best.q.flat().begin(), best.q.flat().end());
      min_ratio = std::min(min_ratio, qmin / sigma);
      if (qmin < sigma) ++below;
    }
  }
  return {below == 0, fmt("%d local minima, %d below sigma; min(q)/sigma >= %.3e", minima, below, min_ratio)};
}

Outcome criterion8() {
  SolverConfig config;
  config.record_history = true;
  double worst_c = 0.0, worst_q = 0.0;
  int checks = 0;
  for (double sigma : {1.0, 2.0}) {
    const BadmmResult res = solve_badmm(gen_spinglass(2, 10, sigma, 8), config);
    for (const auto& h : res.report.history) worst_c = std::max(worst_c, h.resd_edge), ++checks;
  }
  const QuantumResult qres = qbadmm_solve(gen_ising(5, 1.05, 0.5, 1.0, 1.0), config);
  for (const auto& h : qres.report.history) worst_q = std::max(worst_q, h.resd_edge), ++checks;
  const bool ok = worst_c < 1e-9 && worst_q < 1e-9;
  return {ok, fmt("%d checks; max Resd_Q after dual update: BADMM %.3e, QBADMM %.3e (the linearized edge "
                  "step leaves a proximal term, so this vanishes only at convergence)",
                  checks, worst_c, worst_q)};
}

Outcome criterion9() {
  const PairwiseModel m = gen_spinglass(2, 5, 1.0, 9);
  SolverConfig config;
  config.tol = 1e-8;
  const BadmmResult c = solve_badmm(m, config);
  const QuantumResult q = qbadmm_solve(QuantumModel::from_classical(m), config);
  double dq = 0.0;
  for (int k = 0; k < m.num_nodes(); ++k)
    for (int s = 0; s < 2; ++s) dq = std::max(dq, std::abs(q.beliefs.q[k].rho(s, s).real() - c.q[k][s]));
  const double df = std::abs(q.report.fval - c.report.fval);
  const bool ok = c.report.converged() && q.report.converged() && df < 1e-8 && dq < 1e-8;
  return {ok, fmt("5x5 glass: |fval diff| %.2e, max diagonal diff %.2e", df, dq)};
}

Outcome criterion10() {
  CounterRng rng(1010);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int r = 2 + static_cast<int>(rng.below(5));
    OTProblem p{r, std::vector<double>(r * r), random_simplex(r, rng), random_simplex(r, rng)};
    for (double& c : p.C) c = 2.0 * rng.normal();
    const OTValueGrad vg = ot_value_and_grad(p);
    for (int side = 0; side < 2; ++side) {
      for (int a = 0; a < r; ++a) {
        OTProblem plus = p, minus = p;
        for (int s = 0; s < r; ++s) {
          const double d = (s == a ? 1.0 : 0.0) - 1.0 / r;
          (side == 0 ? plus.u : plus.v)[s] += h * d;
          (side == 0 ? minus.u : minus.v)[s] -= h * d;
        }
        const double fd = (ot_value_and_grad(plus).value - ot_value_and_grad(minus).value) / (2 * h);
        const auto& g = side == 0 ? vg.grad_u : vg.grad_v;
        worst = std::max(worst, std::abs(fd - g[a]));
      }
    }
  }
  return {worst < 1e-6, fmt("50 pairs, max |FD - grad| %.2e", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 Ising QBADMM (1.05, 0.5, 1) at T = 1, 0.1, 0.01", criterion1},
      {"2 Ising QBADMM (2.5, 0, -1) at T = 1", criterion2},
      {"3 BADMM exact on 50 random trees", criterion3},
      {"4 BADMM robust on 20x20 spin glasses, JBP agrees at sigma = 1", criterion4},
      {"5 closed-form subproblems match numeric minimizers", criterion5},
      {"6 entropy-OT dual and entry bounds", criterion6},
      {"7 reduced-problem local minima above the positivity constant", criterion7},
      {"8 Resd_Q vanishes right after each dual update", criterion8},
      {"9 diagonal quantum model reproduces classical BADMM", criterion9},
      {"10 entropy-OT gradient vs finite differences", criterion10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o{false, ""};
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %s | %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
