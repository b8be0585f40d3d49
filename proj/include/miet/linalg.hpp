/*
 * Copyright 2026 The miet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file linalg.hpp
 * @brief Small dense matrices: symmetric eigenvalue extremes, the induced
 * 2-norm and a continuous Lyapunov equation solver.
 *
 * Everything here targets the handful-of-states systems an event-triggered
 * loop is designed for. Dimensions are capped at kMaxDim; the Lyapunov solve
 * vectorizes into an n^2 x n^2 dense system.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "miet/error.hpp"

namespace miet {

using Vector = std::vector<double>;

inline constexpr std::size_t kMaxDim = 16;

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(Errc::configuration, "matrix entry count " + std::to_string(data_.size()) +
                                           " does not match " + std::to_string(rows_) + "x" +
                                           std::to_string(cols_));
    }
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(Errc::configuration, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Builds from nested rows as they arrive from a config file.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw Error(Errc::configuration, "empty matrix");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) {
        throw Error(Errc::configuration, "row " + std::to_string(i) + " has " +
                                             std::to_string(rows[i].size()) + " entries, expected " +
                                             std::to_string(m.cols_));
      }
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * m.cols_));
    }
    return m;
  }

  std::vector<std::vector<double>> to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<const double> entries() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) {
      throw Error(Errc::configuration, "cannot multiply " + a.shape() + " by " + b.shape());
    }
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    a.require_same_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(double s, Matrix a) {
    for (double& v : a.data_) v *= s;
    return a;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void require_same_shape(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) {
      throw Error(Errc::configuration, "shape mismatch " + shape() + " vs " + b.shape());
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = M x, written into @p y (sized by the caller).
inline void mat_vec(const Matrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * x[j];
    y[i] = acc;
  }
}

inline Vector mat_vec(const Matrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) {
    throw Error(Errc::configuration, "matrix " + m.shape() + " applied to vector of size " +
                                         std::to_string(x.size()));
  }
  Vector y(m.rows());
  mat_vec(m, x, y);
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

/// x^T M x without allocating.
inline double quad_form(const Matrix& m, std::span<const double> x) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * x[j];
    s += x[i] * row;
  }
  return s;
}

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (m.empty()) throw Error(Errc::invalid_input, std::string(what) + ": empty matrix");
  if (!m.all_finite()) throw Error(Errc::invalid_input, std::string(what) + ": non-finite entry");
}

inline void require_dim(const Matrix& m, const char* what) {
  if (m.rows() > kMaxDim || m.cols() > kMaxDim) {
    throw Error(Errc::unsupported, std::string(what) + ": dimension " + m.shape() +
                                       " exceeds the supported maximum of " + std::to_string(kMaxDim));
  }
}

inline double frobenius(const Matrix& m) noexcept { return norm(m.entries()); }

}  // namespace detail

/// Checks square + symmetric to |Mij - Mji| <= 1e-12 max(1, max|M|) and
/// returns (M + M^T)/2.
inline Matrix symmetrized(const Matrix& m) {
  detail::require_finite(m, "symmetric matrix");
  detail::require_dim(m, "symmetric matrix");
  if (!m.square()) throw Error(Errc::symmetry_violation, "matrix " + m.shape() + " is not square");
  const double tol = 1e-12 * std::max(1.0, m.max_abs());
  Matrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        throw Error(Errc::symmetry_violation, "entries (" + std::to_string(i) + "," + std::to_string(j) +
                                                  ") and (" + std::to_string(j) + "," + std::to_string(i) +
                                                  ") differ");
      }
      s(i, j) = 0.5 * (m(i, j) + m(j, i));
    }
  }
  return s;
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations. Sweeps stop once the off-diagonal Frobenius norm falls below
/// 1e-14 of the full norm.
inline Vector sym_eigenvalues(const Matrix& input) {
  Matrix a = symmetrized(input);
  const std::size_t n = a.rows();
  const double scale = detail::frobenius(a);
  const double tol = 1e-14 * scale;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (scale > 0.0 && off_norm() > tol) {
    if (++sweep > kMaxSweeps) throw Error(Errc::numerical_failure, "Jacobi iteration did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p,q); t is the smaller root for stability.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

/// Smallest eigenvalue of a symmetric matrix.
inline double sym_eig_min(const Matrix& m) { return sym_eigenvalues(m).front(); }

/// Largest eigenvalue of a symmetric matrix.
inline double sym_eig_max(const Matrix& m) { return sym_eigenvalues(m).back(); }

/// Euclidean operator norm, sqrt(lambda_max(M^T M)).
inline double induced_two_norm(const Matrix& m) {
  detail::require_finite(m, "induced_two_norm");
  const Matrix g = m.transpose() * m;
  return std::sqrt(std::max(0.0, sym_eig_max(g)));
}

namespace detail {

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
inline Vector gauss_solve(std::vector<double> a, Vector b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-14 * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (!(std::abs(a[piv * n + col]) > tiny)) {
      throw Error(Errc::numerical_failure, "singular linear system (pivot " + std::to_string(col) + ")");
    }
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
      std::swap(b[col], b[piv]);
    }
    const double d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / d;
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t k = i + 1; k < n; ++k) acc -= a[i * n + k] * x[k];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

}  // namespace detail

/// Residual A^T P + P A + Q.
inline Matrix lyapunov_residual(const Matrix& a_cl, const Matrix& p, const Matrix& q) {
  return a_cl.transpose() * p + p * a_cl + q;
}

/**
 * Solves A_cl^T P + P A_cl = -Q for P.
 *
 * The equation is vectorized into an n^2 x n^2 system (unknown P(k,l) at
 * index k*n + l) and solved directly, followed by one step of iterative
 * refinement. A non-Hurwitz A_cl shows up either as a singular system or as
 * a P that is not positive definite.
 */
inline Matrix solve_lyapunov(const Matrix& a_cl, const Matrix& q) {
  detail::require_finite(a_cl, "solve_lyapunov A");
  detail::require_dim(a_cl, "solve_lyapunov A");
  if (!a_cl.square()) throw Error(Errc::configuration, "A_cl must be square, got " + a_cl.shape());
  const Matrix qs = symmetrized(q);
  if (qs.rows() != a_cl.rows()) {
    throw Error(Errc::configuration, "Q is " + qs.shape() + " but A_cl is " + a_cl.shape());
  }
  if (!(sym_eig_min(qs) > 0.0)) throw Error(Errc::domain_error, "Q must be positive definite");

  const std::size_t n = a_cl.rows();
  const std::size_t nn = n * n;
  std::vector<double> coef(nn * nn, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) {
        coef[row * nn + (k * n + j)] += a_cl(k, i);  // (A^T P)(i,j)
        coef[row * nn + (i * n + k)] += a_cl(k, j);  // (P A)(i,j)
      }
    }
  }
  Vector rhs(nn);
  for (std::size_t i = 0; i < nn; ++i) rhs[i] = -qs.entries()[i];

  Vector sol = detail::gauss_solve(coef, rhs);
  // One refinement pass against the original system.
  Vector r(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    double acc = rhs[i];
    for (std::size_t k = 0; k < nn; ++k) acc -= coef[i * nn + k] * sol[k];
    r[i] = acc;
  }
  const Vector corr = detail::gauss_solve(coef, r);
  for (std::size_t i = 0; i < nn; ++i) sol[i] += corr[i];

  Matrix p(n, n, std::move(sol));
  p = 0.5 * (p + p.transpose());
  if (!p.all_finite()) throw Error(Errc::numerical_failure, "Lyapunov solution is not finite");
  if (!(sym_eig_min(p) > 0.0)) {
    throw Error(Errc::no_solution, "Lyapunov solution is not positive definite; A_cl is not Hurwitz");
  }
  return p;
}

}  // namespace miet
