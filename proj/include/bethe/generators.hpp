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

// Benchmark instance generators. All of them are pure functions of their
// arguments; the random ones draw from CounterRng in a fixed order.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/quantum.hpp"
#include "bethe/rng.hpp"

namespace bethe {

/// Grid edges with lexicographic node ids; each node links to its successor
/// along every axis (last axis first), so every edge has i < j.
inline std::vector<Edge> grid_edges(int dim, int n1) {
  if (dim < 1 || n1 < 1) throw std::invalid_argument("grid needs dim >= 1 and n1 >= 1");
  int n = 1;
  for (int d = 0; d < dim; ++d) n *= n1;
  std::vector<Edge> edges;
  for (int k = 0; k < n; ++k) {
    int stride = 1;
    for (int axis = dim - 1; axis >= 0; --axis) {
      const int coord = (k / stride) % n1;
      if (coord + 1 < n1) edges.push_back({k, k + stride});
      stride *= n1;
    }
  }
  return edges;
}

/// 2D (n1 x n1) or 3D (n1^3) spin glass with r = 2: node costs first, then
/// edge costs, all i.i.d. N(0, sigma^2).
inline PairwiseModel gen_spinglass(int dim, int n1, double sigma, std::uint64_t seed) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("spin glass dimension must be 2 or 3");
  if (n1 < 2) throw std::invalid_argument("spin glass needs n1 >= 2");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
  std::vector<Edge> edges = grid_edges(dim, n1);
  const int n = dim == 2 ? n1 * n1 : n1 * n1 * n1;
  CounterRng rng(seed);
  BlockArray<double> node(n, 2), edge(edges.size(), 4);
  for (double& v : node.flat()) v = sigma * rng.normal();
  for (double& v : edge.flat()) v = sigma * rng.normal();
  return PairwiseModel::create(n, 2, std::move(edges), std::move(node), std::move(edge));
}

using Point2 = std::array<double, 2>;

struct SnlInstance {
  PairwiseModel model;
  std::vector<Point2> sensors;  // ground truth
  std::vector<Point2> anchors;
  int t = 0;
  std::uint64_t seed_used = 0;
  long measurements = 0;
  long outliers = 0;
};

/// Grid point of state s (0-based): s = a (t+1) + b  ->  (a/t, b/t).
inline Point2 snl_grid_point(int s, int t) {
  return {static_cast<double>(s / (t + 1)) / t, static_cast<double>(s % (t + 1)) / t};
}

namespace detail {

inline double dist(const Point2& p, const Point2& q) { return std::hypot(p[0] - q[0], p[1] - q[1]); }

/// -log of one observation potential: visibility term plus noise likelihood.
inline double snl_cost(double grid_dist, double observed, double sigma, double R, bool laplace) {
  const double vis = grid_dist * grid_dist / (2.0 * R * R);
  const double dev = observed - grid_dist;
  if (laplace) return vis + std::abs(dev) / (2.0 * sigma) + 0.5 * std::log(2.0 * std::numbers::pi * sigma);
  return vis + dev * dev / (2.0 * sigma * sigma) + 0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

struct Measurement {
  int k;       // sensor
  int other;   // sensor j (pair) or anchor index
  bool anchor;
  double d;
};

inline bool connected(int n, const std::vector<Edge>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int comps = n;
  for (const auto& [i, j] : edges) {
    int a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps == 1;
}

}  // namespace detail

/// Discretized sensor network localization, r = (t+1)^2.
///
/// Draw order per attempt: sensors (x then y), anchors, then one uniform per
/// sensor pair in lexicographic order, followed by a normal for the noise when
/// the pair is observed, then the same for (sensor, anchor) pairs. With
/// outlier_frac > 0, round(outlier_frac * #measurements) measurements chosen by
/// a partial Fisher-Yates shuffle are replaced by U[0,1] and the absolute-
/// deviation potentials are used. A disconnected graph triggers a retry with
/// seed + 1, up to 100 attempts.
inline SnlInstance gen_snl(int n, int anchors, int t, double sigma, double R, double outlier_frac,
                           std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("snl needs at least two sensors");
  if (anchors < 0) throw std::invalid_argument("anchor count must be nonnegative");
  if (t < 1) throw std::invalid_argument("snl grid needs t >= 1");
  if (!(sigma > 0.0) || !(R > 0.0)) throw std::invalid_argument("sigma and R must be positive");
  if (!(outlier_frac >= 0.0 && outlier_frac < 1.0)) {
    throw std::invalid_argument("outlier fraction must lie in [0,1)");
  }
  const int r = (t + 1) * (t + 1);
  const bool laplace = outlier_frac > 0.0;

  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t s = seed + attempt;
    CounterRng rng(s);
    SnlInstance inst;
    inst.t = t;
    inst.seed_used = s;
    inst.sensors.resize(n);
    inst.anchors.resize(anchors);
    for (auto& p : inst.sensors) p = {rng.uniform(), rng.uniform()};
    for (auto& p : inst.anchors) p = {rng.uniform(), rng.uniform()};

    std::vector<detail::Measurement> meas;
    std::vector<Edge> edges;
    auto observe = [&](const Point2& a, const Point2& b) {
      const double d = detail::dist(a, b);
      return rng.uniform() < std::exp(-d * d / (2.0 * R * R));
    };
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!observe(inst.sensors[i], inst.sensors[j])) continue;
        const double d = detail::dist(inst.sensors[i], inst.sensors[j]) + sigma * rng.normal();
        meas.push_back({i, j, false, d});
        edges.push_back({i, j});
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < anchors; ++l) {
        if (!observe(inst.sensors[k], inst.anchors[l])) continue;
        const double d = detail::dist(inst.sensors[k], inst.anchors[l]) + sigma * rng.normal();
        meas.push_back({k, l, true, d});
      }
    }
    if (!detail::connected(n, edges)) continue;

    inst.measurements = static_cast<long>(meas.size());
    inst.outliers = laplace ? std::lround(outlier_frac * static_cast<double>(meas.size())) : 0;
    std::vector<std::size_t> order(meas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (long o = 0; o < inst.outliers; ++o) {
      const std::size_t pick = o + rng.below(order.size() - o);
      std::swap(order[o], order[pick]);
      meas[order[o]].d = rng.uniform();
    }

    std::vector<Point2> grid(r);
    for (int st = 0; st < r; ++st) grid[st] = snl_grid_point(st, t);
    BlockArray<double> node(n, r, 0.0), edge(edges.size(), static_cast<std::size_t>(r) * r);
    std::size_t e = 0;
    for (const auto& m : meas) {
      if (m.anchor) {
        auto c = node[m.k];
        for (int st = 0; st < r; ++st) {
          c[st] += detail::snl_cost(detail::dist(grid[st], inst.anchors[m.other]), m.d, sigma, R, laplace);
        }
      } else {
        auto C = edge[e++];
        for (int a = 0; a < r; ++a)
          for (int b = 0; b < r; ++b)
            C[a * r + b] = detail::snl_cost(detail::dist(grid[a], grid[b]), m.d, sigma, R, laplace);
      }
    }
    inst.model = PairwiseModel::create(n, r, std::move(edges), std::move(node), std::move(edge));
    return inst;
  }
  throw ModelError("snl: no connected measurement graph after 100 attempts");
}

/// Posterior-mean position of every sensor under node beliefs q.
inline std::vector<Point2> snl_estimate(const NodeMarginals& q, int t) {
  std::vector<Point2> out(q.size(), Point2{0.0, 0.0});
  for (std::size_t k = 0; k < q.size(); ++k) {
    for (std::size_t s = 0; s < q.block_size(); ++s) {
      const Point2 p = snl_grid_point(static_cast<int>(s), t);
      out[k][0] += q[k][s] * p[0];
      out[k][1] += q[k][s] * p[1];
    }
  }
  return out;
}

/// sqrt(sum_k |x_k - x_hat_k|^2 / n).
inline double rmsd(const std::vector<Point2>& truth, const std::vector<Point2>& estimate) {
  if (truth.size() != estimate.size() || truth.empty()) {
    throw std::invalid_argument("rmsd: size mismatch");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = detail::dist(truth[k], estimate[k]);
    s += d * d;
  }
  return std::sqrt(s / truth.size());
}

/// Transverse-field Ising model on an n1 x n1 grid:
///   c_k = (h_x sigma_x - h_z sigma_z) / T,  C_ij = -(J / T) sigma_z ⊗ sigma_z.
inline QuantumModel gen_ising(int n1, double hx, double hz, double J, double T) {
  if (n1 < 2) throw std::invalid_argument("ising grid needs n1 >= 2");
  if (!(T > 0.0)) throw std::invalid_argument("temperature must be positive");
  std::vector<Edge> edges = grid_edges(2, n1);
  const int n = n1 * n1;
  HermitianMatrix c(2);
  c.set(0, 0, -hz / T);
  c.set(1, 1, hz / T);
  c.set(0, 1, hx / T);
  const std::array<double, 4> zz{-J / T, J / T, J / T, -J / T};
  const HermitianMatrix C = HermitianMatrix::diagonal(zz);
  std::vector<HermitianMatrix> nodes(n, c), edge_costs(edges.size(), C);
  return QuantumModel::create(n, 2, std::move(edges), std::move(nodes), std::move(edge_costs));
}

}  // namespace bethe
