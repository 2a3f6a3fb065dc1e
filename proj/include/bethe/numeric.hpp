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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bethe {

/// Raised when an iterate leaves the representable range (NaN, log of 0, ...).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floor applied before taking logarithms of iterates.
inline constexpr double kLogFloor = 1e-300;

/// Dense storage for `count` equally sized blocks of `block` entries each.
template <class T>
class BlockArray {
 public:
  BlockArray() = default;
  BlockArray(std::size_t count, std::size_t block, T value = T{})
      : count_(count), block_(block), data_(count * block, value) {}

  std::size_t size() const { return count_; }
  std::size_t block_size() const { return block_; }
  bool empty() const { return count_ == 0; }

  std::span<T> operator[](std::size_t i) {
    return {data_.data() + i * block_, block_};
  }
  std::span<const T> operator[](std::size_t i) const {
    return {data_.data() + i * block_, block_};
  }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  friend bool operator==(const BlockArray&, const BlockArray&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t block_ = 0;
  std::vector<T> data_;
};

inline double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

/// out = exp(x) / sum(exp(x)), evaluated with max-subtraction.
inline void softmax(std::span<const double> x, std::span<double> out) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = std::max(hi, v);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - hi);
    s += out[i];
  }
  for (double& v : out) v /= s;
}

/// Logarithm with the iterate floor; sets `floor_hit` when the floor is used.
inline double guarded_log(double x, bool& floor_hit) {
  if (!(x >= kLogFloor)) {
    floor_hit = true;
    return std::log(kLogFloor);
  }
  return std::log(x);
}

/// x log x with 0 log 0 := 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace bethe
