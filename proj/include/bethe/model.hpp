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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bethe/numeric.hpp"

namespace bethe {

/// Invalid model data: non-simple or disconnected graph, bad costs, bad shapes.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected edge with i < j (0-based node ids).
struct Edge {
  int i = 0;
  int j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One edge touching a node. `first` is true when the node is the edge's i-end,
/// i.e. its marginal is the row sum of the edge matrix.
struct Incidence {
  int edge = 0;
  bool first = true;
};

/// Node beliefs: one probability vector of length r per node.
struct NodeMarginals : BlockArray<double> {
  using BlockArray::BlockArray;
  NodeMarginals(BlockArray<double> b) : BlockArray(std::move(b)) {}
};

/// Edge beliefs: one r x r row-major matrix per edge, rows indexed by x_i.
struct EdgeMarginals : BlockArray<double> {
  using BlockArray::BlockArray;
  EdgeMarginals(BlockArray<double> b) : BlockArray(std::move(b)) {}
};

/// Multipliers of the marginal constraints. `lambda[e]` pairs with the row sums
/// (marginal of the i-end), `mu[e]` with the column sums (marginal of the j-end).
struct EdgeMultipliers {
  BlockArray<double> lambda;
  BlockArray<double> mu;

  EdgeMultipliers() = default;
  EdgeMultipliers(std::size_t m, std::size_t r) : lambda(m, r, 0.0), mu(m, r, 0.0) {}
  friend bool operator==(const EdgeMultipliers&, const EdgeMultipliers&) = default;
};

namespace detail {

inline void check_graph(int n, std::span<const Edge> edges) {
  if (n < 1) throw ModelError("model must have at least one node");
  std::vector<std::pair<int, int>> sorted;
  sorted.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    const std::string where = "edge " + std::to_string(e) + " (" + std::to_string(i + 1) +
                              "," + std::to_string(j + 1) + ")";
    if (i < 0 || j < 0 || i >= n || j >= n) throw ModelError(where + ": node index out of range");
    if (i == j) throw ModelError(where + ": self-loop");
    if (i > j) throw ModelError(where + ": endpoints must satisfy i<j");
    sorted.emplace_back(i, j);
  }
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw ModelError("duplicate edge (" + std::to_string(dup->first + 1) + "," +
                     std::to_string(dup->second + 1) + ")");
  }

  // Union-find for connectivity.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto& [i, j] : edges) {
    int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  if (components != 1) {
    for (int k = 0; k < n; ++k) {
      if (find(k) != find(0)) {
        throw ModelError("graph is disconnected: node " + std::to_string(k + 1) +
                         " is not reachable from node 1");
      }
    }
  }
}

}  // namespace detail

/// Pairwise Markov random field in cost form: c_k = -log Psi_k, C_ij = -log Psi_ij.
/// Immutable once created; `create` enforces every invariant.
class PairwiseModel {
 public:
  PairwiseModel() = default;

  static PairwiseModel create(int n, int r, std::vector<Edge> edges, BlockArray<double> node_cost,
                              BlockArray<double> edge_cost) {
    if (r < 1) throw ModelError("number of states r must be positive");
    detail::check_graph(n, edges);
    if (node_cost.size() != static_cast<std::size_t>(n) ||
        node_cost.block_size() != static_cast<std::size_t>(r)) {
      throw ModelError("node_cost must hold n vectors of length r");
    }
    if (edge_cost.size() != edges.size() ||
        edge_cost.block_size() != static_cast<std::size_t>(r) * r) {
      throw ModelError("edge_cost must hold one r x r matrix per edge");
    }
    for (int k = 0; k < n; ++k) {
      for (int s = 0; s < r; ++s) {
        if (!std::isfinite(node_cost[k][s])) {
          throw ModelError("non-finite cost at node_cost[" + std::to_string(k + 1) + "][" +
                           std::to_string(s + 1) + "]");
        }
      }
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      for (int s = 0; s < r * r; ++s) {
        if (!std::isfinite(edge_cost[e][s])) {
          throw ModelError("non-finite cost at edge_cost[" + std::to_string(e + 1) + "][" +
                           std::to_string(s / r + 1) + "][" + std::to_string(s % r + 1) + "]");
        }
      }
    }

    PairwiseModel m;
    m.n_ = n;
    m.r_ = r;
    m.edges_ = std::move(edges);
    m.node_cost_ = std::move(node_cost);
    m.edge_cost_ = std::move(edge_cost);
    m.build_incidence();
    return m;
  }

  /// Builds a model from strictly positive potential tables. Potentials below
  /// 1e-300 are clipped before the logarithm; nonpositive entries are rejected.
  static PairwiseModel from_potentials(int n, int r, std::vector<Edge> edges,
                                       const BlockArray<double>& node_potential,
                                       const BlockArray<double>& edge_potential) {
    auto to_cost = [](const BlockArray<double>& pot, const char* what) {
      BlockArray<double> cost(pot.size(), pot.block_size());
      for (std::size_t b = 0; b < pot.size(); ++b) {
        for (std::size_t s = 0; s < pot.block_size(); ++s) {
          double p = pot[b][s];
          if (!(p > 0.0)) {
            throw ModelError(std::string("nonpositive potential in ") + what + "[" +
                             std::to_string(b + 1) + "]");
          }
          cost[b][s] = -std::log(std::max(p, 1e-300));
        }
      }
      return cost;
    };
    return create(n, r, std::move(edges), to_cost(node_potential, "node_potential"),
                  to_cost(edge_potential, "edge_potential"));
  }

  int num_nodes() const { return n_; }
  int num_states() const { return r_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const double> node_cost(int k) const { return node_cost_[k]; }
  std::span<const double> edge_cost(int e) const { return edge_cost_[e]; }
  const BlockArray<double>& node_costs() const { return node_cost_; }
  const BlockArray<double>& edge_costs() const { return edge_cost_; }

  int degree(int k) const { return offsets_[k + 1] - offsets_[k]; }
  int max_degree() const {
    int d = 0;
    for (int k = 0; k < n_; ++k) d = std::max(d, degree(k));
    return d;
  }
  std::span<const Incidence> incident(int k) const {
    return {incidence_.data() + offsets_[k], static_cast<std::size_t>(degree(k))};
  }

  /// M = max over all node and edge cost entries of |cost|.
  double cost_bound() const {
    double bound = 0.0;
    for (double v : node_cost_.flat()) bound = std::max(bound, std::abs(v));
    for (double v : edge_cost_.flat()) bound = std::max(bound, std::abs(v));
    return bound;
  }

  friend bool operator==(const PairwiseModel& a, const PairwiseModel& b) {
    return a.n_ == b.n_ && a.r_ == b.r_ && a.edges_ == b.edges_ &&
           a.node_cost_ == b.node_cost_ && a.edge_cost_ == b.edge_cost_;
  }

 private:
  void build_incidence() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& [i, j] : edges_) {
      ++offsets_[i + 1];
      ++offsets_[j + 1];
    }
    for (int k = 0; k < n_; ++k) offsets_[k + 1] += offsets_[k];
    incidence_.resize(offsets_[n_]);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int e = 0; e < num_edges(); ++e) {
      incidence_[fill[edges_[e].i]++] = {e, true};
      incidence_[fill[edges_[e].j]++] = {e, false};
    }
  }

  int n_ = 0;
  int r_ = 0;
  std::vector<Edge> edges_;
  BlockArray<double> node_cost_;
  BlockArray<double> edge_cost_;
  std::vector<int> offsets_;
  std::vector<Incidence> incidence_;
};

inline NodeMarginals uniform_node_marginals(const PairwiseModel& model) {
  const int r = model.num_states();
  return NodeMarginals(model.num_nodes(), r, 1.0 / r);
}

inline EdgeMarginals uniform_edge_marginals(const PairwiseModel& model) {
  const int r = model.num_states();
  return EdgeMarginals(model.num_edges(), static_cast<std::size_t>(r) * r, 1.0 / (r * r));
}

/// Row sums (first = true) or column sums of an r x r row-major matrix.
inline void edge_marginal(std::span<const double> Q, int r, bool first, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int s = 0; s < r; ++s) {
    for (int t = 0; t < r; ++t) out[first ? s : t] += Q[s * r + t];
  }
}

namespace detail {

inline void check_shapes(const PairwiseModel& model, const NodeMarginals& q,
                         const EdgeMarginals& Q) {
  const std::size_t r = model.num_states();
  if (q.size() != static_cast<std::size_t>(model.num_nodes()) || q.block_size() != r) {
    throw std::invalid_argument("node marginals do not match the model dimensions");
  }
  if (Q.size() != static_cast<std::size_t>(model.num_edges()) || Q.block_size() != r * r) {
    throw std::invalid_argument("edge marginals do not match the model dimensions");
  }
}

}  // namespace detail

/// Bethe objective F(q) + G(Q):
///   <c,q> - sum_k (d_k - 1) <q_k, log q_k> + <C,Q> + sum_ij <Q_ij, log Q_ij>,
/// with 0 log 0 := 0. Equals the Bethe free energy at marginal-feasible points.
inline double bethe_energy(const PairwiseModel& model, const NodeMarginals& q,
                           const EdgeMarginals& Q) {
  detail::check_shapes(model, q, Q);
  const int r = model.num_states();
  double f = 0.0;
  for (int k = 0; k < model.num_nodes(); ++k) {
    const auto c = model.node_cost(k);
    const auto qk = q[k];
    double lin = 0.0, ent = 0.0;
    for (int s = 0; s < r; ++s) {
      lin += c[s] * qk[s];
      ent += xlogx(qk[s]);
    }
    f += lin - (model.degree(k) - 1) * ent;
  }
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto C = model.edge_cost(e);
    const auto Qe = Q[e];
    for (int s = 0; s < r * r; ++s) f += C[s] * Qe[s] + xlogx(Qe[s]);
  }
  return f;
}

/// Positivity constant of local minimizers together with the edge-entry bound.
struct SigmaBound {
  double sigma = 0.0;
  double edge_bound = 0.0;  // sigma^2 / (r^2 exp(4M))
  double log_sigma = 0.0;
  bool underflow = false;
};

/// sigma = exp[-2 d(G) r (log r + 1.5 M) - 2 M r - 2 log r].
inline SigmaBound compute_sigma(const PairwiseModel& model) {
  const double r = model.num_states();
  const double M = model.cost_bound();
  const double d = model.max_degree();
  SigmaBound b;
  b.log_sigma = -2.0 * d * r * (std::log(r) + 1.5 * M) - 2.0 * M * r - 2.0 * std::log(r);
  b.sigma = std::exp(b.log_sigma);
  b.edge_bound = std::exp(2.0 * b.log_sigma - 2.0 * std::log(r) - 4.0 * M);
  b.underflow = !(b.sigma >= std::numeric_limits<double>::min());
  if (b.underflow) b.sigma = 0.0;
  if (!(b.edge_bound >= std::numeric_limits<double>::min())) b.edge_bound = 0.0;
  return b;
}

/// Runtime check that every node belief is at least the positivity constant.
inline bool satisfies_positivity_bound(const PairwiseModel& model, const NodeMarginals& q) {
  const double sigma = compute_sigma(model).sigma;
  const auto flat = q.flat();
  return std::all_of(flat.begin(), flat.end(), [sigma](double v) { return v >= sigma; });
}

}  // namespace bethe
