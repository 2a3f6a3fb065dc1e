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

// Entropy-regularized optimal transport on r x r cost matrices:
//
//   L(u, v) = min { <C,X> + <X, log X> : X 1 = u, X^T 1 = v, X >= 0 }.
//
// The optimum has the form X = exp[-C + lambda 1^T + 1 mu^T]; the duals are
// unique up to (lambda - a, mu + a), and L is differentiable on the interior of
// the simplex pair with gradient given by the centered duals.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bethe/model.hpp"
#include "bethe/numeric.hpp"

namespace bethe {

struct OTProblem {
  int r = 0;
  std::vector<double> C;  // r x r, row-major
  std::vector<double> u;
  std::vector<double> v;

  void validate() const {
    const std::size_t n = r;
    if (r < 1 || C.size() != n * n || u.size() != n || v.size() != n) {
      throw std::invalid_argument("OT problem has inconsistent dimensions");
    }
    double su = 0.0, sv = 0.0;
    for (int s = 0; s < r; ++s) {
      if (!(u[s] > 0.0) || !(v[s] > 0.0)) {
        throw std::invalid_argument("OT marginals must be strictly positive");
      }
      su += u[s];
      sv += v[s];
    }
    if (std::abs(su - 1.0) > 1e-10 || std::abs(sv - 1.0) > 1e-10) {
      throw std::invalid_argument("OT marginals must sum to one");
    }
  }
};

struct OTSolution {
  std::vector<double> X;
  std::vector<double> lambda;
  std::vector<double> mu;
  double marginal_error = 0.0;  // max(|X1 - u|_1, |X^T 1 - v|_1)
  int iterations = 0;
  bool converged = false;
};

/// Transport slice of an edge: cost C_ij with node beliefs q_i, q_j as marginals.
inline OTProblem ot_problem_from_edge(const PairwiseModel& model, int e, const NodeMarginals& q) {
  const auto [i, j] = model.edge(e);
  const auto C = model.edge_cost(e);
  return {model.num_states(), {C.begin(), C.end()}, {q[i].begin(), q[i].end()},
          {q[j].begin(), q[j].end()}};
}

namespace detail {

inline double ot_marginal_error(const OTProblem& p, std::span<const double> X) {
  const int r = p.r;
  double row = 0.0, col = 0.0;
  for (int s = 0; s < r; ++s) {
    double rs = 0.0, cs = 0.0;
    for (int t = 0; t < r; ++t) {
      rs += X[s * r + t];
      cs += X[t * r + s];
    }
    row += std::abs(rs - p.u[s]);
    col += std::abs(cs - p.v[s]);
  }
  return std::max(row, col);
}

inline void ot_plan(const OTProblem& p, std::span<const double> lambda,
                    std::span<const double> mu, std::span<double> X) {
  const int r = p.r;
  for (int s = 0; s < r; ++s) {
    for (int t = 0; t < r; ++t) X[s * r + t] = std::exp(-p.C[s * r + t] + lambda[s] + mu[t]);
  }
}

}  // namespace detail

/// Log-domain Sinkhorn. Stops when the L1 marginal violation drops below `tol`;
/// on iteration exhaustion returns the last iterate with `converged = false`.
/// The returned duals are gauge-fixed so that max(lambda) = max(mu).
inline OTSolution sinkhorn(const OTProblem& problem, double tol = 1e-10, int maxiter = 100000) {
  problem.validate();
  const int r = problem.r;
  std::vector<double> log_u(r), log_v(r), work(r);
  for (int s = 0; s < r; ++s) {
    log_u[s] = std::log(problem.u[s]);
    log_v[s] = std::log(problem.v[s]);
  }

  OTSolution sol;
  sol.lambda.assign(r, 0.0);
  sol.mu.assign(r, 0.0);
  sol.X.assign(static_cast<std::size_t>(r) * r, 0.0);

  for (int it = 1; it <= maxiter; ++it) {
    for (int s = 0; s < r; ++s) {
      for (int t = 0; t < r; ++t) work[t] = -problem.C[s * r + t] + sol.mu[t];
      sol.lambda[s] = log_u[s] - log_sum_exp(work);
    }
    for (int t = 0; t < r; ++t) {
      for (int s = 0; s < r; ++s) work[s] = -problem.C[s * r + t] + sol.lambda[s];
      sol.mu[t] = log_v[t] - log_sum_exp(work);
    }
    sol.iterations = it;
    detail::ot_plan(problem, sol.lambda, sol.mu, sol.X);
    sol.marginal_error = detail::ot_marginal_error(problem, sol.X);
    if (sol.marginal_error < tol) {
      sol.converged = true;
      break;
    }
  }

  const double shift = (*std::max_element(sol.lambda.begin(), sol.lambda.end()) -
                        *std::max_element(sol.mu.begin(), sol.mu.end())) /
                       2.0;
  for (int s = 0; s < r; ++s) {
    sol.lambda[s] -= shift;
    sol.mu[s] += shift;
  }
  detail::ot_plan(problem, sol.lambda, sol.mu, sol.X);
  return sol;
}

struct OTValueGrad {
  double value = 0.0;
  std::vector<double> grad_u;
  std::vector<double> grad_v;
  OTSolution solution;
};

/// Value of L(u, v) and its gradient ((I - 11^T/r) lambda, (I - 11^T/r) mu).
inline OTValueGrad ot_value_and_grad(const OTProblem& problem, double tol = 1e-13,
                                     int maxiter = 100000) {
  OTValueGrad out;
  out.solution = sinkhorn(problem, tol, maxiter);
  const int r = problem.r;
  const auto& X = out.solution.X;
  for (int s = 0; s < r * r; ++s) out.value += problem.C[s] * X[s] + xlogx(X[s]);

  auto centered = [r](const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= r;
    std::vector<double> c(x);
    for (double& v : c) v -= mean;
    return c;
  };
  out.grad_u = centered(out.solution.lambda);
  out.grad_v = centered(out.solution.mu);
  return out;
}

struct LemmaBoundCheck {
  bool lambda_ok = false;
  bool mu_ok = false;
  bool minx_ok = false;
  // bound minus observed value; negative means violated.
  double lambda_slack = 0.0;
  double mu_slack = 0.0;
  double minx_slack = 0.0;

  bool all() const { return lambda_ok && mu_ok && minx_ok; }
};

/// Checks the dual and entry bounds of a gauge-fixed optimal plan:
///   |lambda - log u|_inf <= 1.5 |C|_inf + log r  (same for mu, v),
///   min X >= min(u, v)^2 / (r^2 exp(4 |C|_inf)).
/// `tolerance` absorbs the solver's own inexactness.
inline LemmaBoundCheck check_lemma_bounds(const OTProblem& problem, const OTSolution& solution,
                                          double tolerance = 1e-8) {
  const int r = problem.r;
  double c_inf = 0.0;
  for (double v : problem.C) c_inf = std::max(c_inf, std::abs(v));
  double dev_l = 0.0, dev_m = 0.0, min_marg = 1.0;
  for (int s = 0; s < r; ++s) {
    dev_l = std::max(dev_l, std::abs(solution.lambda[s] - std::log(problem.u[s])));
    dev_m = std::max(dev_m, std::abs(solution.mu[s] - std::log(problem.v[s])));
    min_marg = std::min({min_marg, problem.u[s], problem.v[s]});
  }
  const double dual_bound = 1.5 * c_inf + std::log(static_cast<double>(r));
  const double entry_bound = min_marg * min_marg / (static_cast<double>(r) * r * std::exp(4.0 * c_inf));
  const double min_x = *std::min_element(solution.X.begin(), solution.X.end());

  LemmaBoundCheck out;
  out.lambda_slack = dual_bound - dev_l;
  out.mu_slack = dual_bound - dev_m;
  out.minx_slack = min_x - entry_bound;
  out.lambda_ok = out.lambda_slack >= -tolerance;
  out.mu_ok = out.mu_slack >= -tolerance;
  out.minx_ok = out.minx_slack >= -tolerance;
  return out;
}

/// KL(a || b) = sum a log(a / b) for positive arrays of equal shape.
inline double kl_divergence(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kl_divergence: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * (std::log(a[i]) - std::log(b[i]));
  return s;
}

/// Bregman divergence of phi(x) = <x, log x>: sum x log(x/y) - sum x + sum y.
inline double bregman_phi(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("bregman_phi: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * (std::log(x[i]) - std::log(y[i])) - x[i] + y[i];
  }
  return s;
}

}  // namespace bethe
