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

#include <gtest/gtest.h>

#include <cmath>
#include <queue>

#include "test_support.hpp"

using namespace bethe;
using namespace bethe::testing;

namespace {

int tree_diameter(const PairwiseModel& m) {
  auto bfs = [&](int src, int& far) {
    std::vector<int> dist(m.num_nodes(), -1);
    std::queue<int> todo;
    dist[src] = 0;
    todo.push(src);
    far = src;
    while (!todo.empty()) {
      const int k = todo.front();
      todo.pop();
      if (dist[k] > dist[far]) far = k;
      for (const auto& inc : m.incident(k)) {
        const auto [i, j] = m.edge(inc.edge);
        const int o = i == k ? j : i;
        if (dist[o] < 0) {
          dist[o] = dist[k] + 1;
          todo.push(o);
        }
      }
    }
    return dist[far];
  };
  int a = 0, b = 0;
  bfs(0, a);
  return bfs(a, b);
}

PairwiseModel constant_model(int n, int r, std::vector<Edge> edges, double c0) {
  BlockArray<double> node(n, r, c0), edge(edges.size(), static_cast<std::size_t>(r) * r, -c0);
  return PairwiseModel::create(n, r, std::move(edges), std::move(node), std::move(edge));
}

}  // namespace

TEST(Messages, InitialAllocation) {
  for (int r : {2, 3}) {
    const PairwiseModel m = constant_model(4, r, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 0.0);
    const MessageSet msgs = init_messages(m);
    EXPECT_EQ(msgs.num_messages(), 2u * m.num_edges());
    for (int e = 0; e < m.num_edges(); ++e) {
      for (double p : msgs.fwd(e)) EXPECT_NEAR(p, 1.0 / r, 1e-15);
      for (double p : msgs.bwd(e)) EXPECT_NEAR(p, 1.0 / r, 1e-15);
    }
  }
}

TEST(BpStep, ConstantPotentialsAreFixed) {
  const PairwiseModel m = constant_model(4, 3, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}, 0.7);
  for (auto sched : {BpSchedule::Jacobi, BpSchedule::GaussSeidel}) {
    const BpStepResult step = bp_step(m, init_messages(m), sched);
    EXPECT_LT(step.delta, 1e-15);
    const Beliefs b = recover_beliefs(m, step.messages);
    for (double v : b.q.flat()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
    for (double v : b.Q.flat()) EXPECT_NEAR(v, 1.0 / 9.0, 1e-15);
  }
  SolverConfig config;
  const BpResult res = bp_solve(m, config, BpSchedule::Jacobi);
  EXPECT_TRUE(res.report.converged());
  EXPECT_EQ(res.report.iters, 1);
  EXPECT_EQ(res.report.resd, 0.0);
}

TEST(Beliefs, TwoNodeFixedPoint) {
  BlockArray<double> node(2, 2, 0.0), edge(1, 4);
  const double C[] = {0, 1, 1, 0};
  std::copy(std::begin(C), std::end(C), edge.flat().begin());
  const PairwiseModel m = PairwiseModel::create(2, 2, {{0, 1}}, std::move(node), std::move(edge));
  const BpResult res = bp_solve(m, SolverConfig{}, BpSchedule::Jacobi);
  ASSERT_TRUE(res.report.converged());
  const double diag = 1.0 / (2.0 + 2.0 * std::exp(-1.0));
  EXPECT_NEAR(res.Q[0][0], diag, 1e-14);
  EXPECT_NEAR(res.Q[0][1], 0.5 - diag, 1e-14);
  EXPECT_NEAR(res.Q[0][0], 0.3655, 1e-4);
  EXPECT_NEAR(res.Q[0][1], 0.1345, 1e-4);
  const ExactInference ex = exact_inference(m);
  EXPECT_LT(max_abs_diff(res.Q.flat(), ex.edge_marginals.flat()), 1e-14);
}

TEST(Beliefs, ExactOnTrees) {
  CounterRng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const int r = 2 + static_cast<int>(rng.below(3));
    const PairwiseModel m = random_tree(n, r, 1.0, rng);
    const ExactInference ex = exact_inference(m);
    for (auto sched : {BpSchedule::Jacobi, BpSchedule::GaussSeidel}) {
      SolverConfig config;
      config.tol = 1e-14;
      const BpResult res = bp_solve(m, config, sched);
      ASSERT_TRUE(res.report.converged());
      EXPECT_LE(res.report.iters, tree_diameter(m) + 1);
      EXPECT_LT(max_abs_diff(res.q.flat(), ex.node_marginals.flat()), 1e-8);
      EXPECT_LT(max_abs_diff(res.Q.flat(), ex.edge_marginals.flat()), 1e-8);
      EXPECT_NEAR(res.report.fval, -ex.logZ, 1e-8);
    }
  }
}

TEST(Schedules, AgreeOnSmallGrid) {
  const PairwiseModel m = gen_spinglass(2, 5, 0.5, 3);
  SolverConfig config;
  config.tol = 1e-13;
  const BpResult jac = bp_solve(m, config, BpSchedule::Jacobi);
  const BpResult gs = bp_solve(m, config, BpSchedule::GaussSeidel);
  ASSERT_TRUE(jac.report.converged());
  ASSERT_TRUE(gs.report.converged());
  EXPECT_LT(max_abs_diff(jac.q.flat(), gs.q.flat()), 1e-6);
  EXPECT_LE(gs.report.iters, jac.report.iters);
}

TEST(Schedules, JacobiIgnoresEdgeOrder) {
  const PairwiseModel m = gen_spinglass(2, 4, 1.0, 8);
  std::vector<Edge> rev(m.edges().rbegin(), m.edges().rend());
  const int E = m.num_edges();
  BlockArray<double> node(m.num_nodes(), 2), edge(E, 4);
  for (int k = 0; k < m.num_nodes(); ++k) std::copy(m.node_cost(k).begin(), m.node_cost(k).end(), node[k].begin());
  for (int e = 0; e < E; ++e) {
    const auto C = m.edge_cost(E - 1 - e);
    std::copy(C.begin(), C.end(), edge[e].begin());
  }
  const PairwiseModel p = PairwiseModel::create(m.num_nodes(), 2, rev, std::move(node), std::move(edge));
  MessageSet a = init_messages(m), b = init_messages(p);
  for (int sweep = 0; sweep < 15; ++sweep) {
    a = bp_step(m, a, BpSchedule::Jacobi).messages;
    b = bp_step(p, b, BpSchedule::Jacobi).messages;
  }
  for (int e = 0; e < E; ++e) {
    EXPECT_LT(max_abs_diff(a.log_fwd[e], b.log_fwd[E - 1 - e]), 1e-13);
    EXPECT_LT(max_abs_diff(a.log_bwd[e], b.log_bwd[E - 1 - e]), 1e-13);
  }
}

TEST(Solve, StrongCouplingSpinGlass) {
  // Loopy BP on strongly coupled glasses need not converge; whatever happens,
  // the solver reports it through the status and keeps a finite iterate.
  const PairwiseModel m = gen_spinglass(2, 10, 5.0, 1);
  SolverConfig config;
  config.maxiter = 2000;
  const BpResult res = bp_solve(m, config, BpSchedule::Jacobi);
  EXPECT_NE(res.report.status, SolveStatus::TimeLimit);
  if (res.report.converged()) {
    EXPECT_LT(res.report.resp, config.tol);
  } else {
    EXPECT_EQ(res.report.iters, config.maxiter);
  }
  EXPECT_TRUE(all_finite(res.q.flat()));
  EXPECT_TRUE(std::isfinite(res.report.fval));
}
