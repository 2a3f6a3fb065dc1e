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

// Bregman ADMM with nonlinear dual update for the Bethe variational problem
//
//   min F(q) + G(Q)  s.t.  Q_ij 1 = q_i,  Q_ij^T 1 = q_j,  q in X, Q in Y,
//
// in its single-loop form: the node block uses the entropy proximal term so it
// reduces to a softmax per node, and the edge block adds the proximal term of
//
//   varphi(Q) = sum_ij 2<Q_ij, log Q_ij> - <Q_ij 1, log Q_ij 1> - <Q_ij^T 1, log Q_ij^T 1>
//
// which cancels the marginal entropies and leaves a softmax per edge. The
// multipliers move along the difference of log-marginals rather than the
// marginals themselves.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/numeric.hpp"
#include "bethe/solver_config.hpp"

namespace bethe {

/// Counts uses of the logarithm floor during an update.
struct UpdateDiagnostics {
  long log_floor_hits = 0;
};

namespace detail {

inline double counted_log(double x, UpdateDiagnostics* diag) {
  bool hit = false;
  double v = guarded_log(x, hit);
  if (hit && diag) ++diag->log_floor_hits;
  return v;
}

inline void require_finite(std::span<const double> x, const char* what) {
  if (!all_finite(x)) throw NumericalFailure(std::string(what) + " produced a non-finite value");
}

}  // namespace detail

/// Closed-form node block. For each node k,
///   c_hat = c_k - (d_k - 1) log q_k + sum_{kj} (lambda_kj - rho log Q_kj 1)
///                                   + sum_{ik} (mu_ik - rho log Q_ik^T 1),
///   q_k  <- softmax(-c_hat / (rho d_k)).
inline NodeMarginals node_update(const PairwiseModel& model, const NodeMarginals& q,
                                 const EdgeMarginals& Q, const EdgeMultipliers& dual, double rho,
                                 UpdateDiagnostics* diag = nullptr) {
  const int r = model.num_states();
  NodeMarginals out(model.num_nodes(), r);
  std::vector<double> c_hat(r), marg(r);
  for (int k = 0; k < model.num_nodes(); ++k) {
    const auto c = model.node_cost(k);
    const int d = model.degree(k);
    for (int s = 0; s < r; ++s) c_hat[s] = c[s] - (d - 1) * detail::counted_log(q[k][s], diag);
    for (const auto& inc : model.incident(k)) {
      edge_marginal(Q[inc.edge], r, inc.first, marg);
      const auto mult = inc.first ? dual.lambda[inc.edge] : dual.mu[inc.edge];
      for (int s = 0; s < r; ++s) c_hat[s] += mult[s] - rho * detail::counted_log(marg[s], diag);
    }
    for (int s = 0; s < r; ++s) c_hat[s] = -c_hat[s] / (rho * d);
    softmax(c_hat, out[k]);
    detail::require_finite(out[k], "node update");
  }
  return out;
}

/// Closed-form linearized edge block. With
///   C_hat   = C_ij - (lambda_ij + rho log q_i) 1^T - 1 (mu_ij + rho log q_j)^T,
///   C_tilde = C_hat - rho (2 log Q_ij - log(Q_ij 1) 1^T - 1 log(Q_ij^T 1)^T),
/// the update is Q_ij <- softmax(-C_tilde / (1 + 2 rho)) over all r^2 cells.
inline EdgeMarginals edge_update(const PairwiseModel& model, const NodeMarginals& q_next,
                                 const EdgeMarginals& Q, const EdgeMultipliers& dual, double rho,
                                 UpdateDiagnostics* diag = nullptr) {
  const int r = model.num_states();
  EdgeMarginals out(model.num_edges(), static_cast<std::size_t>(r) * r);
  std::vector<double> row(r), col(r), a(r), b(r), logits(static_cast<std::size_t>(r) * r);
  const double scale = 1.0 / (1.0 + 2.0 * rho);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    const auto C = model.edge_cost(e);
    const auto Qe = Q[e];
    edge_marginal(Qe, r, true, row);
    edge_marginal(Qe, r, false, col);
    for (int s = 0; s < r; ++s) {
      a[s] = dual.lambda[e][s] + rho * detail::counted_log(q_next[i][s], diag) -
             rho * detail::counted_log(row[s], diag);
      b[s] = dual.mu[e][s] + rho * detail::counted_log(q_next[j][s], diag) -
             rho * detail::counted_log(col[s], diag);
    }
    for (int s = 0; s < r; ++s) {
      for (int t = 0; t < r; ++t) {
        const int c = s * r + t;
        const double c_tilde = C[c] - a[s] - b[t] - 2.0 * rho * detail::counted_log(Qe[c], diag);
        logits[c] = -c_tilde * scale;
      }
    }
    softmax(logits, out[e]);
    detail::require_finite(out[e], "edge update");
  }
  return out;
}

/// Nonlinear multiplier step:
///   lambda_ij <- lambda_ij - rho (log Q_ij 1 - log q_i),
///   mu_ij     <- mu_ij     - rho (log Q_ij^T 1 - log q_j).
inline EdgeMultipliers dual_update(const PairwiseModel& model, const NodeMarginals& q_next,
                                   const EdgeMarginals& Q_next, const EdgeMultipliers& dual,
                                   double rho, UpdateDiagnostics* diag = nullptr) {
  const int r = model.num_states();
  EdgeMultipliers out = dual;
  std::vector<double> marg(r);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    edge_marginal(Q_next[e], r, true, marg);
    for (int s = 0; s < r; ++s) {
      out.lambda[e][s] -=
          rho * (detail::counted_log(marg[s], diag) - detail::counted_log(q_next[i][s], diag));
    }
    edge_marginal(Q_next[e], r, false, marg);
    for (int s = 0; s < r; ++s) {
      out.mu[e][s] -=
          rho * (detail::counted_log(marg[s], diag) - detail::counted_log(q_next[j][s], diag));
    }
    detail::require_finite(out.lambda[e], "dual update");
    detail::require_finite(out.mu[e], "dual update");
  }
  return out;
}

/// Resp = sum_ij KL(q_i || Q_ij 1) + KL(q_j || Q_ij^T 1).
inline double primal_residual(const PairwiseModel& model, const NodeMarginals& q,
                              const EdgeMarginals& Q) {
  const int r = model.num_states();
  std::vector<double> marg(r);
  double res = 0.0;
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    edge_marginal(Q[e], r, true, marg);
    for (int s = 0; s < r; ++s)
      res += q[i][s] * (std::log(q[i][s]) - std::log(std::max(marg[s], kLogFloor)));
    edge_marginal(Q[e], r, false, marg);
    for (int s = 0; s < r; ++s)
      res += q[j][s] * (std::log(q[j][s]) - std::log(std::max(marg[s], kLogFloor)));
  }
  return res;
}

struct DualResidual {
  double total = 0.0;
  double edge = 0.0;  // sum_ij KL(Q_ij || Q_hat_ij)
  double node = 0.0;
};

/// Stationarity violation for given multipliers. Edge part: KL(Q_ij || Q_hat_ij)
/// with Q_hat_ij = softmax(-C_ij + lambda 1^T + 1 mu^T). Node part, with
/// g_k = c_k + sum_{kj} lambda_kj + sum_{ik} mu_ik: KL(q_k || softmax(g_k/(d_k-1)))
/// for d_k > 1, and |(I - 11^T/r) g_k| / (1 + |c_k|) for leaves.
inline DualResidual dual_residual(const PairwiseModel& model, const NodeMarginals& q,
                                  const EdgeMarginals& Q, const EdgeMultipliers& dual) {
  const int r = model.num_states();
  DualResidual res;
  std::vector<double> logits(static_cast<std::size_t>(r) * r), g(r);
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto C = model.edge_cost(e);
    for (int s = 0; s < r; ++s) {
      for (int t = 0; t < r; ++t) {
        logits[s * r + t] = -C[s * r + t] + dual.lambda[e][s] + dual.mu[e][t];
      }
    }
    const double lse = log_sum_exp(logits);
    const auto Qe = Q[e];
    for (int c = 0; c < r * r; ++c) {
      res.edge += Qe[c] * (std::log(Qe[c]) - (logits[c] - lse));
    }
  }
  for (int k = 0; k < model.num_nodes(); ++k) {
    const auto c = model.node_cost(k);
    std::copy(c.begin(), c.end(), g.begin());
    for (const auto& inc : model.incident(k)) {
      const auto mult = inc.first ? dual.lambda[inc.edge] : dual.mu[inc.edge];
      for (int s = 0; s < r; ++s) g[s] += mult[s];
    }
    const int d = model.degree(k);
    if (d > 1) {
      for (double& v : g) v /= (d - 1);
      const double lse = log_sum_exp(g);
      for (int s = 0; s < r; ++s) res.node += q[k][s] * (std::log(q[k][s]) - (g[s] - lse));
    } else {
      double mean = 0.0, nc = 0.0, ng = 0.0;
      for (int s = 0; s < r; ++s) mean += g[s];
      mean /= r;
      for (int s = 0; s < r; ++s) {
        ng += (g[s] - mean) * (g[s] - mean);
        nc += c[s] * c[s];
      }
      res.node += std::sqrt(ng) / (1.0 + std::sqrt(nc));
    }
  }
  res.total = res.edge + res.node;
  return res;
}

struct BadmmResult {
  NodeMarginals q;
  EdgeMarginals Q;
  EdgeMultipliers multipliers;
  SolveReport report;
  long log_floor_hits = 0;
};

/// Runs the numerical Bregman ADMM from uniform beliefs and zero multipliers.
/// Residuals are checked (and rho adapted) at iterations t with
/// t mod check_every == 1. Always returns the last finite iterate.
inline BadmmResult solve_badmm(const PairwiseModel& model, const SolverConfig& config = {}) {
  config.validate();
  detail::Stopwatch clock;
  BadmmResult res{uniform_node_marginals(model), uniform_edge_marginals(model),
                  EdgeMultipliers(model.num_edges(), model.num_states()), {}, 0};
  UpdateDiagnostics diag;
  double rho = config.rho0;
  SolveReport& rep = res.report;
  rep.status = SolveStatus::MaxIter;
  bool residuals_current = false;

  for (int t = 1; t <= config.maxiter; ++t) {
    try {
      NodeMarginals q_next = node_update(model, res.q, res.Q, res.multipliers, rho, &diag);
      EdgeMarginals Q_next = edge_update(model, q_next, res.Q, res.multipliers, rho, &diag);
      EdgeMultipliers dual_next = dual_update(model, q_next, Q_next, res.multipliers, rho, &diag);
      res.q = std::move(q_next);
      res.Q = std::move(Q_next);
      res.multipliers = std::move(dual_next);
    } catch (const NumericalFailure&) {
      rep.status = SolveStatus::NumericalFailure;
      residuals_current = false;
      break;
    }
    rep.iters = t;
    residuals_current = false;

    if (detail::is_check_iteration(t, config.check_every)) {
      rep.resp = primal_residual(model, res.q, res.Q);
      const DualResidual dres = dual_residual(model, res.q, res.Q, res.multipliers);
      rep.resd = dres.total;
      residuals_current = true;
      if (config.record_history) {
        rep.history.push_back({t, rep.resp, rep.resd, dres.edge, rho,
                               bethe_energy(model, res.q, res.Q)});
      }
      if (std::max(rep.resp, rep.resd) < config.tol) {
        rep.status = SolveStatus::Converged;
        break;
      }
      rho = update_rho(rho, rep.resp, rep.resd, config);
    }
    if (clock.seconds() > config.time_limit) {
      rep.status = SolveStatus::TimeLimit;
      break;
    }
  }

  if (!residuals_current) {
    rep.resp = primal_residual(model, res.q, res.Q);
    rep.resd = dual_residual(model, res.q, res.Q, res.multipliers).total;
  }
  rep.fval = bethe_energy(model, res.q, res.Q);
  rep.rho_final = rho;
  rep.elapsed = clock.seconds();
  res.log_floor_hits = diag.log_floor_hits;
  return res;
}

}  // namespace bethe
