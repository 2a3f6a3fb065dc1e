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

// Quantum Bethe problem: density matrices q_k (r x r) on nodes and rho_ij
// (r^2 x r^2) on edges, coupled through the partial traces
//
//   Tr_r rho_ij = q_i,   Tr_l rho_ij = q_j.
//
// The solvers mirror the classical ones with log/exp replaced by their matrix
// versions and multiplier vectors by hermitian matrices lifted as
// lambda ⊗ I and I ⊗ mu. Every density produced by a Gibbs step carries its
// exact logarithm, so small eigenvalues never pass through logm.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bethe/belief_propagation.hpp"
#include "bethe/hermitian.hpp"
#include "bethe/model.hpp"
#include "bethe/solver_config.hpp"

namespace bethe {

/// Pairwise quantum model with hermitian node costs (r x r) and edge costs
/// (r^2 x r^2, left Kronecker factor on the lower-indexed node).
class QuantumModel {
 public:
  QuantumModel() = default;

  static QuantumModel create(int n, int r, std::vector<Edge> edges,
                             std::vector<HermitianMatrix> node_cost,
                             std::vector<HermitianMatrix> edge_cost) {
    if (r < 1) throw ModelError("number of states r must be positive");
    const std::size_t m = edges.size();
    QuantumModel q;
    q.graph_ = PairwiseModel::create(n, r, std::move(edges), BlockArray<double>(n, r),
                                     BlockArray<double>(m, static_cast<std::size_t>(r) * r));
    if (node_cost.size() != static_cast<std::size_t>(n)) {
      throw ModelError("node_cost must hold one matrix per node");
    }
    if (edge_cost.size() != m) throw ModelError("edge_cost must hold one matrix per edge");
    for (std::size_t k = 0; k < node_cost.size(); ++k) {
      if (node_cost[k].dim() != r) {
        throw ModelError("node_cost[" + std::to_string(k + 1) + "] must be r x r");
      }
      if (!node_cost[k].all_finite()) {
        throw ModelError("non-finite cost at node_cost[" + std::to_string(k + 1) + "]");
      }
    }
    for (std::size_t e = 0; e < edge_cost.size(); ++e) {
      if (edge_cost[e].dim() != r * r) {
        throw ModelError("edge_cost[" + std::to_string(e + 1) + "] must be r^2 x r^2");
      }
      if (!edge_cost[e].all_finite()) {
        throw ModelError("non-finite cost at edge_cost[" + std::to_string(e + 1) + "]");
      }
    }
    q.node_cost_ = std::move(node_cost);
    q.edge_cost_ = std::move(edge_cost);
    return q;
  }

  /// Diagonal embedding: c_k -> diag(c_k), C_ij -> diag(vec C_ij) with the
  /// row-major cell (s,t) at Kronecker index s r + t.
  static QuantumModel from_classical(const PairwiseModel& model) {
    std::vector<HermitianMatrix> nodes, edges;
    for (int k = 0; k < model.num_nodes(); ++k) nodes.push_back(HermitianMatrix::diagonal(model.node_cost(k)));
    for (int e = 0; e < model.num_edges(); ++e) edges.push_back(HermitianMatrix::diagonal(model.edge_cost(e)));
    return create(model.num_nodes(), model.num_states(), model.edges(), std::move(nodes),
                  std::move(edges));
  }

  int num_nodes() const { return graph_.num_nodes(); }
  int num_states() const { return graph_.num_states(); }
  int num_edges() const { return graph_.num_edges(); }
  const std::vector<Edge>& edges() const { return graph_.edges(); }
  const Edge& edge(int e) const { return graph_.edge(e); }
  int degree(int k) const { return graph_.degree(k); }
  std::span<const Incidence> incident(int k) const { return graph_.incident(k); }

  const HermitianMatrix& node_cost(int k) const { return node_cost_[k]; }
  const HermitianMatrix& edge_cost(int e) const { return edge_cost_[e]; }
  const std::vector<HermitianMatrix>& node_costs() const { return node_cost_; }
  const std::vector<HermitianMatrix>& edge_costs() const { return edge_cost_; }

  bool is_diagonal(double tol = 0.0) const {
    for (const auto& c : node_cost_)
      if (!c.is_diagonal(tol)) return false;
    for (const auto& c : edge_cost_)
      if (!c.is_diagonal(tol)) return false;
    return true;
  }

  friend bool operator==(const QuantumModel& a, const QuantumModel& b) {
    return a.num_nodes() == b.num_nodes() && a.num_states() == b.num_states() &&
           a.edges() == b.edges() && a.node_cost_ == b.node_cost_ && a.edge_cost_ == b.edge_cost_;
  }

 private:
  PairwiseModel graph_;  // topology only, zero costs
  std::vector<HermitianMatrix> node_cost_;
  std::vector<HermitianMatrix> edge_cost_;
};

/// Tolerance on violations of D(a || b) >= 0 caused by rounding. Anything
/// below -kKleinSlack is treated as a numerical failure.
inline constexpr double kKleinSlack = 1e-10;

/// Node density with its logarithm.
struct DensityState {
  HermitianMatrix rho;
  HermitianMatrix log_rho;
};

/// Edge density with its logarithm and the logarithms of both partial traces.
struct EdgeDensityState {
  HermitianMatrix rho;
  HermitianMatrix log_rho;
  HermitianMatrix log_row;  // logm Tr_r rho, the i-end marginal
  HermitianMatrix log_col;  // logm Tr_l rho, the j-end marginal
};

struct HermitianMultipliers {
  std::vector<HermitianMatrix> lambda;  // pairs with Tr_r, lifted as lambda ⊗ I
  std::vector<HermitianMatrix> mu;      // pairs with Tr_l, lifted as I ⊗ mu

  HermitianMultipliers() = default;
  HermitianMultipliers(int m, int r)
      : lambda(m, HermitianMatrix(r)), mu(m, HermitianMatrix(r)) {}
};

namespace detail {

inline EdgeDensityState make_edge_state(GibbsState g, int r, LogmDiagnostics* diag) {
  EdgeDensityState s{std::move(g.density), std::move(g.log_density), {}, {}};
  s.log_row = logm_h(trace_right(s.rho, r), diag);
  s.log_col = logm_h(trace_left(s.rho, r), diag);
  return s;
}

inline DensityState to_density_state(GibbsState g) {
  return {std::move(g.density), std::move(g.log_density)};
}

inline void require_finite(const HermitianMatrix& a, const char* what) {
  if (!a.all_finite()) throw NumericalFailure(std::string(what) + " produced a non-finite value");
}

}  // namespace detail

/// Edge state for an arbitrary density (logarithms through logm).
inline EdgeDensityState edge_state_from_density(const HermitianMatrix& rho, int r,
                                                LogmDiagnostics* diag = nullptr) {
  EdgeDensityState s{rho, logm_h(rho, diag), {}, {}};
  s.log_row = logm_h(trace_right(rho, r), diag);
  s.log_col = logm_h(trace_left(rho, r), diag);
  return s;
}

struct QuantumIterate {
  std::vector<DensityState> q;
  std::vector<EdgeDensityState> Q;
};

/// q_k = I/r, rho_ij = I/r^2.
inline QuantumIterate uniform_quantum_iterate(const QuantumModel& model) {
  const int r = model.num_states();
  const double lr = std::log(static_cast<double>(r));
  QuantumIterate it;
  it.q.assign(model.num_nodes(),
              {HermitianMatrix::identity(r, 1.0 / r), HermitianMatrix::identity(r, -lr)});
  it.Q.assign(model.num_edges(),
              {HermitianMatrix::identity(r * r, 1.0 / (r * r)),
               HermitianMatrix::identity(r * r, -2.0 * lr), HermitianMatrix::identity(r, -lr),
               HermitianMatrix::identity(r, -lr)});
  return it;
}

/// Quantum Bethe objective
///   sum_k <c_k, q_k> - (d_k - 1) <q_k, log q_k> + sum_ij <C_ij, rho_ij> + <rho_ij, log rho_ij>,
/// entropies from the spectra with 0 log 0 := 0.
inline double quantum_bethe_energy(const QuantumModel& model, const std::vector<HermitianMatrix>& q,
                                   const std::vector<HermitianMatrix>& Q) {
  if (q.size() != static_cast<std::size_t>(model.num_nodes()) ||
      Q.size() != static_cast<std::size_t>(model.num_edges())) {
    throw std::invalid_argument("densities do not match the model dimensions");
  }
  double f = 0.0;
  for (int k = 0; k < model.num_nodes(); ++k) {
    f += inner(model.node_cost(k), q[k]) - (model.degree(k) - 1) * entropy_term(q[k]);
  }
  for (int e = 0; e < model.num_edges(); ++e) {
    f += inner(model.edge_cost(e), Q[e]) + entropy_term(Q[e]);
  }
  return f;
}

inline double quantum_bethe_energy(const QuantumModel& model, const QuantumIterate& it) {
  std::vector<HermitianMatrix> q, Q;
  for (const auto& s : it.q) q.push_back(s.rho);
  for (const auto& s : it.Q) Q.push_back(s.rho);
  return quantum_bethe_energy(model, q, Q);
}

/// Node block: q_k <- expm(-c_hat / (rho d_k)) / Tr, with
///   c_hat = c_k - (d_k - 1) log q_k + sum (lambda - rho logm Tr_r rho_kj)
///                                   + sum (mu - rho logm Tr_l rho_ik).
inline std::vector<DensityState> qbadmm_node_update(const QuantumModel& model,
                                                    const QuantumIterate& it,
                                                    const HermitianMultipliers& dual, double rho) {
  std::vector<DensityState> out;
  out.reserve(model.num_nodes());
  for (int k = 0; k < model.num_nodes(); ++k) {
    const int d = model.degree(k);
    HermitianMatrix c_hat = model.node_cost(k) - (d - 1) * it.q[k].log_rho;
    for (const auto& inc : model.incident(k)) {
      const auto& E = it.Q[inc.edge];
      if (inc.first) {
        c_hat += dual.lambda[inc.edge] - rho * E.log_row;
      } else {
        c_hat += dual.mu[inc.edge] - rho * E.log_col;
      }
    }
    out.push_back(detail::to_density_state(gibbs_state((-1.0 / (rho * d)) * c_hat)));
    detail::require_finite(out.back().rho, "quantum node update");
  }
  return out;
}

/// Linearized edge block: rho_ij <- expm(-C_tilde / (1 + 2 rho)) / Tr, with
///   C_tilde = C_ij - (lambda + rho log q_i) ⊗ I - I ⊗ (mu + rho log q_j)
///             - rho (2 log rho_ij - logm(Tr_r rho_ij) ⊗ I - I ⊗ logm(Tr_l rho_ij)).
inline std::vector<EdgeDensityState> qbadmm_edge_update(const QuantumModel& model,
                                                        const std::vector<DensityState>& q_next,
                                                        const std::vector<EdgeDensityState>& Q,
                                                        const HermitianMultipliers& dual,
                                                        double rho,
                                                        LogmDiagnostics* diag = nullptr) {
  const int r = model.num_states();
  std::vector<EdgeDensityState> out;
  out.reserve(model.num_edges());
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    const auto& E = Q[e];
    const HermitianMatrix a = dual.lambda[e] + rho * q_next[i].log_rho - rho * E.log_row;
    const HermitianMatrix b = dual.mu[e] + rho * q_next[j].log_rho - rho * E.log_col;
    HermitianMatrix c_tilde = model.edge_cost(e) - lift_left(a) - lift_right(b) - 2.0 * rho * E.log_rho;
    out.push_back(detail::make_edge_state(gibbs_state((-1.0 / (1.0 + 2.0 * rho)) * c_tilde), r, diag));
    detail::require_finite(out.back().rho, "quantum edge update");
  }
  return out;
}

/// lambda <- lambda - rho (logm Tr_r rho_ij - log q_i), mu likewise with Tr_l.
inline HermitianMultipliers qbadmm_dual_update(const QuantumModel& model,
                                               const std::vector<DensityState>& q_next,
                                               const std::vector<EdgeDensityState>& Q_next,
                                               const HermitianMultipliers& dual, double rho) {
  HermitianMultipliers out = dual;
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    out.lambda[e] -= rho * (Q_next[e].log_row - q_next[i].log_rho);
    out.mu[e] -= rho * (Q_next[e].log_col - q_next[j].log_rho);
    detail::require_finite(out.lambda[e], "quantum dual update");
    detail::require_finite(out.mu[e], "quantum dual update");
  }
  return out;
}

/// Resp = sum_ij D(q_i || Tr_r rho_ij) + D(q_j || Tr_l rho_ij), D the Umegaki
/// relative entropy.
inline double quantum_primal_residual(const QuantumModel& model, const QuantumIterate& it) {
  double res = 0.0;
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    res += relative_entropy(it.q[i].rho, it.q[i].log_rho, it.Q[e].log_row);
    res += relative_entropy(it.q[j].rho, it.q[j].log_rho, it.Q[e].log_col);
  }
  return res;
}

/// Edge part D(rho_ij || gibbs(-C_ij + lambda ⊗ I + I ⊗ mu)); node part
/// D(q_k || gibbs(g_k / (d_k - 1))) with g_k = c_k + sum lambda + sum mu, and
/// |g_k - Tr(g_k) I / r|_F / (1 + |c_k|_F) for leaves.
inline DualResidual quantum_dual_residual(const QuantumModel& model, const QuantumIterate& it,
                                          const HermitianMultipliers& dual) {
  const int r = model.num_states();
  DualResidual res;
  for (int e = 0; e < model.num_edges(); ++e) {
    const HermitianMatrix h =
        lift_left(dual.lambda[e]) + lift_right(dual.mu[e]) - model.edge_cost(e);
    const GibbsState hat = gibbs_state(h);
    res.edge += relative_entropy(it.Q[e].rho, it.Q[e].log_rho, hat.log_density);
  }
  for (int k = 0; k < model.num_nodes(); ++k) {
    HermitianMatrix g = model.node_cost(k);
    for (const auto& inc : model.incident(k)) {
      g += inc.first ? dual.lambda[inc.edge] : dual.mu[inc.edge];
    }
    const int d = model.degree(k);
    if (d > 1) {
      const GibbsState hat = gibbs_state((1.0 / (d - 1)) * g);
      res.node += relative_entropy(it.q[k].rho, it.q[k].log_rho, hat.log_density);
    } else {
      const double tr = g.trace();
      g.shift(-tr / r);
      res.node += g.frobenius_norm() / (1.0 + model.node_cost(k).frobenius_norm());
    }
  }
  res.total = res.edge + res.node;
  return res;
}

struct QuantumResult {
  QuantumIterate beliefs;
  HermitianMultipliers multipliers;
  SolveReport report;
  long logm_clipped = 0;

  std::vector<HermitianMatrix> node_densities() const {
    std::vector<HermitianMatrix> out;
    for (const auto& s : beliefs.q) out.push_back(s.rho);
    return out;
  }
  std::vector<HermitianMatrix> edge_densities() const {
    std::vector<HermitianMatrix> out;
    for (const auto& s : beliefs.Q) out.push_back(s.rho);
    return out;
  }
};

/// Quantum Bregman ADMM from q = I/r, rho = I/r^2, zero multipliers; the same
/// check schedule and penalty rule as the classical solver.
inline QuantumResult qbadmm_solve(const QuantumModel& model, const SolverConfig& config = {}) {
  config.validate();
  detail::Stopwatch clock;
  QuantumResult res{uniform_quantum_iterate(model),
                    HermitianMultipliers(model.num_edges(), model.num_states()), {}, 0};
  LogmDiagnostics diag;
  double rho = config.rho0;
  SolveReport& rep = res.report;
  rep.status = SolveStatus::MaxIter;
  bool residuals_current = false;

  for (int t = 1; t <= config.maxiter; ++t) {
    try {
      auto q_next = qbadmm_node_update(model, res.beliefs, res.multipliers, rho);
      auto Q_next = qbadmm_edge_update(model, q_next, res.beliefs.Q, res.multipliers, rho, &diag);
      auto dual_next = qbadmm_dual_update(model, q_next, Q_next, res.multipliers, rho);
      res.beliefs.q = std::move(q_next);
      res.beliefs.Q = std::move(Q_next);
      res.multipliers = std::move(dual_next);
    } catch (const NumericalFailure&) {
      rep.status = SolveStatus::NumericalFailure;
      residuals_current = false;
      break;
    }
    rep.iters = t;
    residuals_current = false;

    if (detail::is_check_iteration(t, config.check_every)) {
      rep.resp = quantum_primal_residual(model, res.beliefs);
      const DualResidual dres = quantum_dual_residual(model, res.beliefs, res.multipliers);
      rep.resd = dres.total;
      residuals_current = true;
      if (config.record_history) {
        rep.history.push_back({t, rep.resp, rep.resd, dres.edge, rho,
                               quantum_bethe_energy(model, res.beliefs)});
      }
      if (!std::isfinite(rep.resp) || !std::isfinite(rep.resd) || rep.resp < -kKleinSlack) {
        rep.status = SolveStatus::NumericalFailure;
        break;
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
    rep.resp = quantum_primal_residual(model, res.beliefs);
    rep.resd = quantum_dual_residual(model, res.beliefs, res.multipliers).total;
  }
  rep.fval = quantum_bethe_energy(model, res.beliefs);
  rep.rho_final = rho;
  rep.elapsed = clock.seconds();
  res.logm_clipped = diag.clipped;
  return res;
}

// ---------------------------------------------------------------------------
// Quantum belief propagation.
//
// Messages are kept as logarithms. For edge (i,j), `cav_i[e]` is the log of
// the i-side cavity (node cost times all messages into i except the one from
// j) and `cav_j[e]` the j-side one; the edge belief is
//   rho_ij = gibbs(-C_ij + cav_i ⊗ I + I ⊗ cav_j).
// The log message that edge (a,k) sends into node k is the log of its k-side
// marginal minus its k-side cavity.

struct QuantumMessages {
  std::vector<HermitianMatrix> cav_i;
  std::vector<HermitianMatrix> cav_j;
};

namespace detail {

inline void normalize_log(HermitianMatrix& a) {
  a = gibbs_state(a).log_density;
}

/// Log message into node k carried by incidence `inc`.
inline HermitianMatrix qbp_incoming(const EdgeDensityState& E, const QuantumMessages& msg,
                                    const Incidence& inc) {
  return inc.first ? E.log_row - msg.cav_i[inc.edge] : E.log_col - msg.cav_j[inc.edge];
}

/// Cavity of node k with respect to edge `skip`.
inline HermitianMatrix qbp_cavity(const QuantumModel& model, int k, int skip,
                                  const std::vector<EdgeDensityState>& Q,
                                  const QuantumMessages& msg) {
  HermitianMatrix cav = -1.0 * model.node_cost(k);
  for (const auto& inc : model.incident(k)) {
    if (inc.edge != skip) cav += qbp_incoming(Q[inc.edge], msg, inc);
  }
  normalize_log(cav);
  return cav;
}

inline EdgeDensityState qbp_edge_belief(const QuantumModel& model, int e,
                                        const QuantumMessages& msg, LogmDiagnostics* diag) {
  const HermitianMatrix h =
      lift_left(msg.cav_i[e]) + lift_right(msg.cav_j[e]) - model.edge_cost(e);
  return make_edge_state(gibbs_state(h), model.num_states(), diag);
}

}  // namespace detail

/// Uniform messages: every cavity is the normalized node term -c_k.
inline QuantumMessages init_quantum_messages(const QuantumModel& model) {
  QuantumMessages msg;
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    msg.cav_i.push_back(gibbs_state(-1.0 * model.node_cost(i)).log_density);
    msg.cav_j.push_back(gibbs_state(-1.0 * model.node_cost(j)).log_density);
  }
  return msg;
}

struct QbpState {
  QuantumMessages messages;
  std::vector<EdgeDensityState> Q;  // edge beliefs consistent with `messages`
};

inline QbpState init_qbp_state(const QuantumModel& model, LogmDiagnostics* diag = nullptr) {
  QbpState s{init_quantum_messages(model), {}};
  for (int e = 0; e < model.num_edges(); ++e) {
    s.Q.push_back(detail::qbp_edge_belief(model, e, s.messages, diag));
  }
  return s;
}

/// One sweep. Jacobi recomputes every cavity from the previous edge beliefs,
/// then every edge belief. Gauss-Seidel visits the edges in order, refreshing
/// the edge's two cavities from the current beliefs and then its own belief.
inline QbpState qbp_step(const QuantumModel& model, const QbpState& state, BpSchedule schedule,
                         LogmDiagnostics* diag = nullptr) {
  QbpState next = state;
  if (schedule == BpSchedule::Jacobi) {
    for (int e = 0; e < model.num_edges(); ++e) {
      const auto [i, j] = model.edge(e);
      next.messages.cav_i[e] = detail::qbp_cavity(model, i, e, state.Q, state.messages);
      next.messages.cav_j[e] = detail::qbp_cavity(model, j, e, state.Q, state.messages);
    }
    for (int e = 0; e < model.num_edges(); ++e) {
      next.Q[e] = detail::qbp_edge_belief(model, e, next.messages, diag);
    }
  } else {
    for (int e = 0; e < model.num_edges(); ++e) {
      const auto [i, j] = model.edge(e);
      next.messages.cav_i[e] = detail::qbp_cavity(model, i, e, next.Q, next.messages);
      next.messages.cav_j[e] = detail::qbp_cavity(model, j, e, next.Q, next.messages);
      next.Q[e] = detail::qbp_edge_belief(model, e, next.messages, diag);
    }
  }
  for (int e = 0; e < model.num_edges(); ++e) {
    detail::require_finite(next.Q[e].rho, "quantum belief propagation");
  }
  return next;
}

/// Node beliefs from the messages: gibbs((c_k + sum of incident cavities) / (d_k - 1))
/// for interior nodes, the matching partial trace of the single edge for leaves.
inline std::vector<DensityState> qbp_node_beliefs(const QuantumModel& model, const QbpState& s) {
  const int r = model.num_states();
  std::vector<DensityState> out;
  for (int k = 0; k < model.num_nodes(); ++k) {
    const int d = model.degree(k);
    if (d > 1) {
      HermitianMatrix g = model.node_cost(k);
      for (const auto& inc : model.incident(k)) {
        g += inc.first ? s.messages.cav_i[inc.edge] : s.messages.cav_j[inc.edge];
      }
      out.push_back(detail::to_density_state(gibbs_state((1.0 / (d - 1)) * g)));
    } else {
      const auto& inc = model.incident(k)[0];
      const auto& E = s.Q[inc.edge];
      HermitianMatrix m = inc.first ? trace_right(E.rho, r) : trace_left(E.rho, r);
      out.push_back({m, inc.first ? E.log_row : E.log_col});
    }
    detail::require_finite(out.back().rho, "quantum belief recovery");
  }
  return out;
}

struct QbpResult {
  QuantumIterate beliefs;
  QuantumMessages messages;
  SolveReport report;
  long logm_clipped = 0;
};

/// Sweeps until the primal residual of the recovered beliefs drops below tol;
/// the dual residual is zero by construction and reported as such.
inline QbpResult qbp_solve(const QuantumModel& model, const SolverConfig& config,
                           BpSchedule schedule) {
  config.validate();
  detail::Stopwatch clock;
  LogmDiagnostics diag;
  QbpResult res;
  SolveReport& rep = res.report;
  rep.status = SolveStatus::MaxIter;
  rep.resd = 0.0;
  QbpState state;
  try {
    state = init_qbp_state(model, &diag);
  } catch (const NumericalFailure&) {
    rep.status = SolveStatus::NumericalFailure;
    res.beliefs = uniform_quantum_iterate(model);
    rep.resp = quantum_primal_residual(model, res.beliefs);
    rep.fval = quantum_bethe_energy(model, res.beliefs);
    return res;
  }
  res.beliefs = {qbp_node_beliefs(model, state), state.Q};
  rep.resp = quantum_primal_residual(model, res.beliefs);

  for (int t = 1; t <= config.maxiter; ++t) {
    try {
      QbpState next = qbp_step(model, state, schedule, &diag);
      auto q = qbp_node_beliefs(model, next);
      state = std::move(next);
      res.beliefs = {std::move(q), state.Q};
    } catch (const NumericalFailure&) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }
    rep.iters = t;
    rep.resp = quantum_primal_residual(model, res.beliefs);
    if (config.record_history) {
      rep.history.push_back({t, rep.resp, 0.0, 0.0, 0.0, quantum_bethe_energy(model, res.beliefs)});
    }
    // A relative entropy below zero means the clipped logarithms no longer
    // describe the iterate; the run has lost its precision.
    if (!std::isfinite(rep.resp) || rep.resp < -kKleinSlack) {
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
  res.messages = std::move(state.messages);
  rep.fval = quantum_bethe_energy(model, res.beliefs);
  rep.elapsed = clock.seconds();
  res.logm_clipped = diag.clipped;
  return res;
}

}  // namespace bethe
