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

// Sum-product belief propagation on pairwise models, Jacobi and Gauss-Seidel
// sweeps. Messages live in the log domain (normalized so that their
// log-sum-exp is 0) so large costs do not underflow.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bethe/badmm.hpp"
#include "bethe/model.hpp"
#include "bethe/numeric.hpp"
#include "bethe/solver_config.hpp"

namespace bethe {

enum class BpSchedule { Jacobi, GaussSeidel };

/// Per edge (i,j): `log_fwd[e]` is log m_{i->j} over x_j, `log_bwd[e]` is
/// log m_{j->i} over x_i.
struct MessageSet {
  BlockArray<double> log_fwd;
  BlockArray<double> log_bwd;

  std::size_t num_messages() const { return log_fwd.size() + log_bwd.size(); }

  std::vector<double> fwd(int e) const { return probabilities(log_fwd[e]); }
  std::vector<double> bwd(int e) const { return probabilities(log_bwd[e]); }

 private:
  static std::vector<double> probabilities(std::span<const double> log_m) {
    std::vector<double> p(log_m.size());
    for (std::size_t s = 0; s < p.size(); ++s) p[s] = std::exp(log_m[s]);
    return p;
  }
};

inline MessageSet init_messages(const PairwiseModel& model) {
  const int r = model.num_states();
  const double v = -std::log(static_cast<double>(r));
  return {BlockArray<double>(model.num_edges(), r, v), BlockArray<double>(model.num_edges(), r, v)};
}

namespace detail {

/// log Psi_k + sum of incoming log messages, per node.
inline BlockArray<double> bp_node_totals(const PairwiseModel& model, const MessageSet& msgs) {
  const int r = model.num_states();
  BlockArray<double> tot(model.num_nodes(), r);
  for (int k = 0; k < model.num_nodes(); ++k) {
    const auto c = model.node_cost(k);
    auto out = tot[k];
    for (int s = 0; s < r; ++s) out[s] = -c[s];
    for (const auto& inc : model.incident(k)) {
      const auto in = inc.first ? msgs.log_bwd[inc.edge] : msgs.log_fwd[inc.edge];
      for (int s = 0; s < r; ++s) out[s] += in[s];
    }
  }
  return tot;
}

/// New log message from the sender with cavity `cavity` (over the sender's states).
/// `sender_is_i` selects whether the sender indexes the rows of C.
inline void bp_message(std::span<const double> C, int r, std::span<const double> cavity,
                       bool sender_is_i, std::span<double> out, std::vector<double>& work) {
  for (int x = 0; x < r; ++x) {
    for (int y = 0; y < r; ++y) {
      const double c = sender_is_i ? C[y * r + x] : C[x * r + y];
      work[y] = -c + cavity[y];
    }
    out[x] = log_sum_exp(work);
  }
  const double z = log_sum_exp(out);
  for (double& v : out) v -= z;
}

inline double linf_prob_change(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) d = std::max(d, std::abs(std::exp(a[s]) - std::exp(b[s])));
  return d;
}

}  // namespace detail

struct BpStepResult {
  MessageSet messages;
  double delta = 0.0;  // max l_inf change over all messages
};

/// One sweep over all 2m messages. Jacobi reads only the previous sweep's
/// messages; Gauss-Seidel walks the edges in storage order and always reads
/// the freshest values.
inline BpStepResult bp_step(const PairwiseModel& model, const MessageSet& msgs,
                            BpSchedule schedule) {
  const int r = model.num_states();
  BpStepResult res{msgs, 0.0};
  MessageSet& out = res.messages;
  std::vector<double> cavity(r), work(r), fresh(r);

  if (schedule == BpSchedule::Jacobi) {
    const BlockArray<double> tot = detail::bp_node_totals(model, msgs);
    for (int e = 0; e < model.num_edges(); ++e) {
      const auto [i, j] = model.edge(e);
      const auto C = model.edge_cost(e);
      for (int s = 0; s < r; ++s) cavity[s] = tot[i][s] - msgs.log_bwd[e][s];
      detail::bp_message(C, r, cavity, true, out.log_fwd[e], work);
      for (int s = 0; s < r; ++s) cavity[s] = tot[j][s] - msgs.log_fwd[e][s];
      detail::bp_message(C, r, cavity, false, out.log_bwd[e], work);
    }
  } else {
    BlockArray<double> tot = detail::bp_node_totals(model, msgs);
    for (int e = 0; e < model.num_edges(); ++e) {
      const auto [i, j] = model.edge(e);
      const auto C = model.edge_cost(e);
      for (int s = 0; s < r; ++s) cavity[s] = tot[i][s] - out.log_bwd[e][s];
      detail::bp_message(C, r, cavity, true, fresh, work);
      for (int s = 0; s < r; ++s) {
        tot[j][s] += fresh[s] - out.log_fwd[e][s];
        out.log_fwd[e][s] = fresh[s];
      }
      for (int s = 0; s < r; ++s) cavity[s] = tot[j][s] - out.log_fwd[e][s];
      detail::bp_message(C, r, cavity, false, fresh, work);
      for (int s = 0; s < r; ++s) {
        tot[i][s] += fresh[s] - out.log_bwd[e][s];
        out.log_bwd[e][s] = fresh[s];
      }
    }
  }

  for (int e = 0; e < model.num_edges(); ++e) {
    if (!all_finite(out.log_fwd[e]) || !all_finite(out.log_bwd[e])) {
      throw NumericalFailure("belief propagation message normalizer underflowed");
    }
    res.delta = std::max({res.delta, detail::linf_prob_change(out.log_fwd[e], msgs.log_fwd[e]),
                          detail::linf_prob_change(out.log_bwd[e], msgs.log_bwd[e])});
  }
  return res;
}

struct Beliefs {
  NodeMarginals q;
  EdgeMarginals Q;
};

/// b_k ∝ Psi_k prod_{i in N(k)} m_{i->k};
/// b_ij ∝ Psi_ij (Psi_i prod_{k != j} m_{k->i}) (Psi_j prod_{k != i} m_{k->j}).
inline Beliefs recover_beliefs(const PairwiseModel& model, const MessageSet& msgs) {
  const int r = model.num_states();
  const BlockArray<double> tot = detail::bp_node_totals(model, msgs);
  Beliefs b{NodeMarginals(model.num_nodes(), r),
            EdgeMarginals(model.num_edges(), static_cast<std::size_t>(r) * r)};
  for (int k = 0; k < model.num_nodes(); ++k) softmax(tot[k], b.q[k]);
  std::vector<double> logits(static_cast<std::size_t>(r) * r);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    const auto C = model.edge_cost(e);
    for (int s = 0; s < r; ++s) {
      for (int t = 0; t < r; ++t) {
        logits[s * r + t] = -C[s * r + t] + tot[i][s] - msgs.log_bwd[e][s] + tot[j][t] -
                            msgs.log_fwd[e][t];
      }
    }
    softmax(logits, b.Q[e]);
  }
  if (!all_finite(b.q.flat()) || !all_finite(b.Q.flat())) {
    throw NumericalFailure("belief recovery produced a non-finite value");
  }
  return b;
}

struct BpResult {
  NodeMarginals q;
  EdgeMarginals Q;
  MessageSet messages;
  SolveReport report;
};

/// Runs sweeps until the primal residual of the recovered beliefs drops below
/// tol. The dual residual is identically zero for BP beliefs and reported as 0.
inline BpResult bp_solve(const PairwiseModel& model, const SolverConfig& config,
                         BpSchedule schedule) {
  config.validate();
  detail::Stopwatch clock;
  BpResult res{uniform_node_marginals(model), uniform_edge_marginals(model),
               init_messages(model), {}};
  SolveReport& rep = res.report;
  rep.status = SolveStatus::MaxIter;
  rep.resd = 0.0;
  rep.resp = primal_residual(model, res.q, res.Q);

  for (int t = 1; t <= config.maxiter; ++t) {
    try {
      BpStepResult step = bp_step(model, res.messages, schedule);
      Beliefs b = recover_beliefs(model, step.messages);
      res.messages = std::move(step.messages);
      res.q = std::move(b.q);
      res.Q = std::move(b.Q);
    } catch (const NumericalFailure&) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }
    rep.iters = t;
    rep.resp = primal_residual(model, res.q, res.Q);
    if (config.record_history) {
      rep.history.push_back({t, rep.resp, 0.0, 0.0, 0.0, bethe_energy(model, res.q, res.Q)});
    }
    if (!std::isfinite(rep.resp)) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }
    if (rep.resp < config.tol) {
      rep.status = SolveStatus::Converged;
      break;
    }
    if (clock.seconds() > config.time_limit) {
      rep.status = SolveStatus::TimeLimit;
      break;
    }
  }
  rep.fval = bethe_energy(model, res.q, res.Q);
  rep.elapsed = clock.seconds();
  return res;
}

}  // namespace bethe
