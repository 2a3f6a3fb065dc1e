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

// Brute-force inference by enumerating all r^n configurations.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bethe/model.hpp"

namespace bethe {

struct ExactInference {
  double logZ = 0.0;
  NodeMarginals node_marginals;
  EdgeMarginals edge_marginals;
};

inline constexpr double kMaxEnumeration = 1e8;

namespace detail {

inline double configuration_cost(const PairwiseModel& model, const std::vector<int>& x) {
  const int r = model.num_states();
  double c = 0.0;
  for (int k = 0; k < model.num_nodes(); ++k) c += model.node_cost(k)[x[k]];
  for (int e = 0; e < model.num_edges(); ++e) {
    const auto [i, j] = model.edge(e);
    c += model.edge_cost(e)[x[i] * r + x[j]];
  }
  return c;
}

/// Odometer increment; returns false after the last configuration.
inline bool next_configuration(std::vector<int>& x, int r) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (++x[k] < r) return true;
    x[k] = 0;
  }
  return false;
}

}  // namespace detail

/// log Z and exact marginals. Two passes: the first finds the minimum cost so
/// the second can accumulate exp(min - cost) without overflow.
inline ExactInference exact_inference(const PairwiseModel& model) {
  const int n = model.num_nodes();
  const int r = model.num_states();
  if (n * std::log(static_cast<double>(r)) > std::log(kMaxEnumeration) + 1e-12) {
    throw std::invalid_argument("instance too large for enumeration: r^n exceeds 1e8");
  }
  std::vector<int> x(n, 0);
  double lo = std::numeric_limits<double>::infinity();
  do lo = std::min(lo, detail::configuration_cost(model, x));
  while (detail::next_configuration(x, r));

  ExactInference out{0.0, NodeMarginals(n, r, 0.0),
                     EdgeMarginals(model.num_edges(), static_cast<std::size_t>(r) * r, 0.0)};
  double z = 0.0;
  std::fill(x.begin(), x.end(), 0);
  do {
    const double w = std::exp(lo - detail::configuration_cost(model, x));
    z += w;
    for (int k = 0; k < n; ++k) out.node_marginals[k][x[k]] += w;
    for (int e = 0; e < model.num_edges(); ++e) {
      const auto [i, j] = model.edge(e);
      out.edge_marginals[e][x[i] * r + x[j]] += w;
    }
  } while (detail::next_configuration(x, r));

  for (double& v : out.node_marginals.flat()) v /= z;
  for (double& v : out.edge_marginals.flat()) v /= z;
  out.logZ = std::log(z) - lo;
  return out;
}

}  // namespace bethe
