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

// Small dense hermitian matrices (dimension r or r^2) and the spectral
// functions the quantum solvers need. Everything goes through a cyclic
// complex Jacobi eigensolver; dimensions are tiny, accuracy matters more
// than speed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bethe/numeric.hpp"

namespace bethe {

using complex = std::complex<double>;

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim) {}

  static HermitianMatrix identity(int dim, double scale = 1.0) {
    HermitianMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.data_[i * dim + i] = scale;
    return m;
  }

  static HermitianMatrix diagonal(std::span<const double> d) {
    HermitianMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m.data_[i * m.dim_ + i] = d[i];
    return m;
  }

  /// Row-major entries. Rejects matrices farther than `tol` (relative to the
  /// largest entry) from hermitian; symmetrizes the rest.
  static HermitianMatrix from_rows(int dim, std::span<const complex> rows, double tol = 1e-12) {
    if (dim < 1 || rows.size() != static_cast<std::size_t>(dim) * dim) {
      throw std::invalid_argument("hermitian matrix: expected " + std::to_string(dim) + "x" +
                                  std::to_string(dim) + " entries");
    }
    double scale = 1.0;
    for (const complex& z : rows) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw std::invalid_argument("hermitian matrix: non-finite entry");
      }
      scale = std::max(scale, std::abs(z));
    }
    HermitianMatrix m(dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const complex a = rows[i * dim + j];
        const complex b = std::conj(rows[j * dim + i]);
        if (std::abs(a - b) > tol * scale) {
          throw std::invalid_argument("matrix is not hermitian at (" + std::to_string(i + 1) +
                                      "," + std::to_string(j + 1) + ")");
        }
        m.data_[i * dim + j] = 0.5 * (a + b);
      }
    }
    return m;
  }

  /// Overwrites the hermitian part of a raw buffer produced by trusted spectral
  /// code (no validation beyond symmetrization).
  static HermitianMatrix symmetrized(int dim, std::vector<complex> rows) {
    HermitianMatrix m;
    m.dim_ = dim;
    m.data_ = std::move(rows);
    for (int i = 0; i < dim; ++i) {
      m.data_[i * dim + i] = m.data_[i * dim + i].real();
      for (int j = i + 1; j < dim; ++j) {
        const complex avg = 0.5 * (m.data_[i * dim + j] + std::conj(m.data_[j * dim + i]));
        m.data_[i * dim + j] = avg;
        m.data_[j * dim + i] = std::conj(avg);
      }
    }
    return m;
  }

  int dim() const { return dim_; }
  complex operator()(int i, int j) const { return data_[i * dim_ + j]; }
  std::span<const complex> data() const { return data_; }

  /// Sets (i,j) and its mirror (j,i) = conj(value).
  void set(int i, int j, complex value) {
    if (i == j) value = value.real();
    data_[i * dim_ + j] = value;
    data_[j * dim_ + i] = std::conj(value);
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += data_[i * dim_ + i].real();
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const complex& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for (const complex& z : data_) s = std::max(s, std::abs(z));
    return s;
  }

  bool is_diagonal(double tol = 0.0) const {
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (i != j && std::abs(data_[i * dim_ + j]) > tol) return false;
    return true;
  }

  std::vector<double> diagonal_values() const {
    std::vector<double> d(dim_);
    for (int i = 0; i < dim_; ++i) d[i] = data_[i * dim_ + i].real();
    return d;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const complex& z) {
      return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
  }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  HermitianMatrix& operator*=(double s) {
    for (complex& z : data_) z *= s;
    return *this;
  }
  /// Adds s * I.
  HermitianMatrix& shift(double s) {
    for (int i = 0; i < dim_; ++i) data_[i * dim_ + i] += s;
    return *this;
  }

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  void check_same(const HermitianMatrix& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("hermitian matrix dimension mismatch");
  }

  int dim_ = 0;
  std::vector<complex> data_;
};

/// <A, B> = Re Tr(A^H B).
inline double inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
  double s = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t k = 0; k < x.size(); ++k) s += (std::conj(x[k]) * y[k]).real();
  return s;
}

/// Eigenpairs with ascending values; column k of `vectors` (row-major, entry
/// (i,k) at i*dim+k) is the eigenvector for values[k].
struct EigenDecomposition {
  int dim = 0;
  std::vector<double> values;
  std::vector<complex> vectors;

  complex vector(int i, int k) const { return vectors[i * dim + k]; }
};

/// Cyclic Jacobi. Each rotation first removes the phase of the pivot, then
/// applies a real Givens rotation; sweeps end once the off-diagonal Frobenius
/// mass drops below 1e-14 |A|_F.
inline EigenDecomposition herm_eig(const HermitianMatrix& A) {
  if (!A.all_finite()) throw NumericalFailure("herm_eig: non-finite input");
  const int n = A.dim();
  std::vector<complex> a(A.data().begin(), A.data().end());
  std::vector<complex> v(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

  const double norm = A.frobenius_norm();
  auto off_mass = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += std::norm(a[i * n + j]);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && norm > 0.0; ++sweep) {
    if (off_mass() <= 1e-14 * norm) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const complex c = a[p * n + q];
        const double g = std::abs(c);
        if (g <= 1e-300) continue;
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        const complex phase = std::conj(c) / g;  // e^{-i phi}
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * cs;
        // U = diag(1, e^{-i phi}) [[cs, sn], [-sn, cs]] acting on columns p, q.
        const complex upp = cs, upq = sn, uqp = -phase * sn, uqq = phase * cs;
        for (int k = 0; k < n; ++k) {  // A <- A U
          const complex akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = akp * upp + akq * uqp;
          a[k * n + q] = akp * upq + akq * uqq;
        }
        for (int k = 0; k < n; ++k) {  // A <- U^H A
          const complex apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = std::conj(upp) * apk + std::conj(uqp) * aqk;
          a[q * n + k] = std::conj(upq) * apk + std::conj(uqq) * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (int k = 0; k < n; ++k) {  // V <- V U
          const complex vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = vkp * upp + vkq * uqp;
          v[k * n + q] = vkp * upq + vkq * uqq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a[x * n + x].real() < a[y * n + y].real(); });
  EigenDecomposition out;
  out.dim = n;
  out.values.resize(n);
  out.vectors.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]].real();
    for (int i = 0; i < n; ++i) out.vectors[i * n + k] = v[i * n + order[k]];
  }
  return out;
}

/// V diag(f) V^H.
inline HermitianMatrix from_spectrum(const EigenDecomposition& eig, std::span<const double> f) {
  const int n = eig.dim;
  std::vector<complex> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      complex s = 0.0;
      for (int k = 0; k < n; ++k) s += eig.vector(i, k) * f[k] * std::conj(eig.vector(j, k));
      out[i * n + j] = s;
      out[j * n + i] = std::conj(s);
    }
  }
  return HermitianMatrix::symmetrized(n, std::move(out));
}

/// Counts eigenvalues raised to the relative floor inside logm_h.
struct LogmDiagnostics {
  long clipped = 0;
};

inline constexpr double kLogmRelativeFloor = 1e-14;
inline constexpr double kLogmHardFloor = 1e-250;

/// Matrix logarithm of a positive semidefinite matrix. Eigenvalues below
/// 1e-14 * lambda_max are raised to that floor (counted in `diag`); a matrix
/// whose largest eigenvalue is below 1e-250 is rejected.
inline HermitianMatrix logm_h(const HermitianMatrix& A, LogmDiagnostics* diag = nullptr) {
  const EigenDecomposition eig = herm_eig(A);
  const double top = eig.values.back();
  if (!(top >= kLogmHardFloor)) throw NumericalFailure("logm_h: matrix is not positive definite");
  const double floor = kLogmRelativeFloor * top;
  std::vector<double> f(eig.dim);
  for (int k = 0; k < eig.dim; ++k) {
    double d = eig.values[k];
    if (d < floor) {
      d = floor;
      if (diag) ++diag->clipped;
    }
    f[k] = std::log(d);
  }
  return from_spectrum(eig, f);
}

inline HermitianMatrix expm_h(const HermitianMatrix& A) {
  const EigenDecomposition eig = herm_eig(A);
  std::vector<double> f(eig.dim);
  for (int k = 0; k < eig.dim; ++k) f[k] = std::exp(eig.values[k]);
  return from_spectrum(eig, f);
}

/// expm(H) / Tr expm(H) together with its exact logarithm H - log Tr expm(H) I.
struct GibbsState {
  HermitianMatrix density;
  HermitianMatrix log_density;
};

inline GibbsState gibbs_state(const HermitianMatrix& H) {
  const EigenDecomposition eig = herm_eig(H);
  const double top = eig.values.back();
  std::vector<double> w(eig.dim), lw(eig.dim);
  double z = 0.0;
  for (int k = 0; k < eig.dim; ++k) {
    w[k] = std::exp(eig.values[k] - top);
    z += w[k];
  }
  const double log_z = top + std::log(z);
  for (int k = 0; k < eig.dim; ++k) {
    w[k] /= z;
    lw[k] = eig.values[k] - log_z;
  }
  return {from_spectrum(eig, w), from_spectrum(eig, lw)};
}

/// <A, logm A> = sum d log d over the spectrum, 0 log 0 := 0; tiny negative
/// eigenvalues from rounding are treated as 0.
inline double entropy_term(const HermitianMatrix& A) {
  const EigenDecomposition eig = herm_eig(A);
  double s = 0.0;
  for (double d : eig.values) s += xlogx(std::max(d, 0.0));
  return s;
}

/// Tr_l: sums out the left Kronecker factor of an r^2 x r^2 matrix,
/// Tr_l(X ⊗ Y) = Tr(X) Y.
inline HermitianMatrix trace_left(const HermitianMatrix& B, int r) {
  if (B.dim() != r * r) throw std::invalid_argument("trace_left: dimension is not r^2");
  std::vector<complex> out(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) out[i * r + j] += B(i + k * r, j + k * r);
  return HermitianMatrix::symmetrized(r, std::move(out));
}

/// Tr_r: sums out the right Kronecker factor, Tr_r(X ⊗ Y) = Tr(Y) X.
inline HermitianMatrix trace_right(const HermitianMatrix& B, int r) {
  if (B.dim() != r * r) throw std::invalid_argument("trace_right: dimension is not r^2");
  std::vector<complex> out(static_cast<std::size_t>(r) * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int k = 0; k < r; ++k) out[i * r + j] += B(i * r + k, j * r + k);
  return HermitianMatrix::symmetrized(r, std::move(out));
}

/// X ⊗ Y, index (a r + b, a' r + b') = X(a, a') Y(b, b').
inline HermitianMatrix kron(const HermitianMatrix& X, const HermitianMatrix& Y) {
  const int p = X.dim(), q = Y.dim(), n = p * q;
  std::vector<complex> out(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < p; ++a)
    for (int a2 = 0; a2 < p; ++a2)
      for (int b = 0; b < q; ++b)
        for (int b2 = 0; b2 < q; ++b2) out[(a * q + b) * n + a2 * q + b2] = X(a, a2) * Y(b, b2);
  return HermitianMatrix::symmetrized(n, std::move(out));
}

/// X ⊗ I_r.
inline HermitianMatrix lift_left(const HermitianMatrix& X) {
  return kron(X, HermitianMatrix::identity(X.dim()));
}

/// I_r ⊗ Y.
inline HermitianMatrix lift_right(const HermitianMatrix& Y) {
  return kron(HermitianMatrix::identity(Y.dim()), Y);
}

/// A ⊙ B = expm(logm A + logm B).
inline HermitianMatrix odot(const HermitianMatrix& A, const HermitianMatrix& B) {
  return expm_h(logm_h(A) + logm_h(B));
}

/// Umegaki relative entropy Tr a (log a - log b), given the logarithms.
inline double relative_entropy(const HermitianMatrix& a, const HermitianMatrix& log_a,
                               const HermitianMatrix& log_b) {
  return inner(a, log_a - log_b);
}

}  // namespace bethe
