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
#include <chrono>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bethe {

struct SolverConfig {
  double rho0 = 1.0;
  double tol = 1e-6;
  int maxiter = 10000;
  int check_every = 10;
  double rho_factor = 1.2;
  double rho_min = 1e-3;
  double rho_max = 1e3;
  double time_limit = 3600.0;  // seconds
  bool record_history = false;

  void validate() const {
    if (!(rho0 > 0.0)) throw std::invalid_argument("rho0 must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (maxiter < 1) throw std::invalid_argument("maxiter must be at least 1");
    if (check_every < 1) throw std::invalid_argument("check_every must be at least 1");
    if (!(rho_factor > 1.0)) throw std::invalid_argument("rho_factor must exceed 1");
    if (!(rho_min <= rho0 && rho0 <= rho_max)) {
      throw std::invalid_argument("rho0 must lie in [rho_min, rho_max]");
    }
    if (!(time_limit > 0.0)) throw std::invalid_argument("time_limit must be positive");
  }
};

enum class SolveStatus { Converged, MaxIter, TimeLimit, NumericalFailure };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::TimeLimit: return "TimeLimit";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

struct CheckRecord {
  int iter = 0;
  double resp = 0.0;
  double resd = 0.0;
  double resd_edge = 0.0;  // edge part of resd, right after the dual update
  double rho = 0.0;
  double fval = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIter;
  double fval = std::numeric_limits<double>::quiet_NaN();
  double resp = std::numeric_limits<double>::quiet_NaN();
  double resd = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
  double elapsed = 0.0;  // seconds
  double rho_final = 0.0;
  std::vector<CheckRecord> history;

  bool converged() const { return status == SolveStatus::Converged; }
};

/// Penalty adaptation: shrink when the primal residual lags the dual one by a
/// factor of 5, grow in the opposite case, and clamp into [rho_min, rho_max].
inline double update_rho(double rho, double resp, double resd, const SolverConfig& config) {
  if (resp < resd / 5.0) return std::max(rho / config.rho_factor, config.rho_min);
  if (resp > 5.0 * resd) return std::min(rho * config.rho_factor, config.rho_max);
  return rho;
}

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Residual checks happen at iterations t with t mod check_every == 1.
inline bool is_check_iteration(int t, int check_every) {
  return check_every == 1 || t % check_every == 1;
}

}  // namespace detail

}  // namespace bethe
