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
 * @file plant.hpp
 * @brief Controlled systems: the nonlinear interface with the forced van der
 * Pol oscillator, linear plants with a disturbance channel, and the held
 * sample that defines the measurement error e = x(t_i) - x(t).
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "miet/error.hpp"
#include "miet/linalg.hpp"

namespace miet {

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(Errc::invalid_input, std::string(what) + ": non-finite value");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Van der Pol

/// Forced van der Pol oscillator: (x2, (1 - x1^2) x2 - x1 + u).
inline std::array<double, 2> vdp_vector_field(std::array<double, 2> x, double u) {
  detail::require_finite(x, "vdp_vector_field");
  if (!std::isfinite(u)) throw Error(Errc::invalid_input, "vdp_vector_field: non-finite input");
  return {x[1], (1.0 - x[0] * x[0]) * x[1] - x[0] + u};
}

/// Stabilizing law -x2 - (1 - x1^2) x2, evaluated at the sampled state.
inline double vdp_feedback(std::array<double, 2> x_sampled) {
  detail::require_finite(x_sampled, "vdp_feedback");
  return -x_sampled[1] - (1.0 - x_sampled[0] * x_sampled[0]) * x_sampled[1];
}

/// Generic nonlinear plant x' = f(x, u) with state feedback u = k(x_sampled).
///
/// Both maps write into caller-provided buffers so the integrator can call
/// them four times per step without allocating.
struct NonlinearPlant {
  std::string name;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::function<void(std::span<const double> x, std::span<const double> u, std::span<double> dx)> vector_field;
  std::function<void(std::span<const double> x_sampled, std::span<double> u)> feedback_law;
  double lipschitz_L = 0.0;

  void validate() const {
    if (state_dim == 0 || input_dim == 0) throw Error(Errc::configuration, name + ": zero dimension");
    if (state_dim > kMaxDim || input_dim > kMaxDim) throw Error(Errc::unsupported, name + ": dimension too large");
    if (!vector_field || !feedback_law) throw Error(Errc::configuration, name + ": missing map");
    if (!(lipschitz_L > 0.0) || !std::isfinite(lipschitz_L)) {
      throw Error(Errc::configuration, name + ": Lipschitz constant must be positive");
    }
  }

  /// x' = f(x, k(x_held)).
  void closed_loop(std::span<const double> x, std::span<const double> x_held, std::span<double> dx) const {
    std::array<double, kMaxDim> ubuf{};
    const std::span<double> u(ubuf.data(), input_dim);
    feedback_law(x_held, u);
    vector_field(x, u, dx);
  }
};

inline NonlinearPlant van_der_pol(double lipschitz_L = 1.0) {
  NonlinearPlant p;
  p.name = "vdp";
  p.state_dim = 2;
  p.input_dim = 1;
  p.lipschitz_L = lipschitz_L;
  p.vector_field = [](std::span<const double> x, std::span<const double> u, std::span<double> dx) {
    dx[0] = x[1];
    dx[1] = (1.0 - x[0] * x[0]) * x[1] - x[0] + u[0];
  };
  p.feedback_law = [](std::span<const double> xs, std::span<double> u) {
    u[0] = -xs[1] - (1.0 - xs[0] * xs[0]) * xs[1];
  };
  p.validate();
  return p;
}

/// Looks up a built-in nonlinear plant by its scenario name.
inline NonlinearPlant nonlinear_plant_by_name(const std::string& name, double lipschitz_L) {
  if (name == "vdp") return van_der_pol(lipschitz_L);
  throw Error(Errc::configuration, "unknown nonlinear plant '" + name + "'");
}

// ---------------------------------------------------------------------------
// Linear plant

/**
 * x' = A x + B K x(t_i) + H d.
 *
 * P and Q satisfy (A+BK)^T P + P (A+BK) = -Q. Use make_linear_plant() to get
 * that checked, or P computed from Q when it is not supplied.
 */
struct LinearPlant {
  Matrix A;
  Matrix B;
  Matrix K;
  Matrix P;
  Matrix Q;
  std::optional<Matrix> H;

  std::size_t state_dim() const noexcept { return A.rows(); }
  Matrix closed_loop_matrix() const { return A + B * K; }
};

inline LinearPlant make_linear_plant(Matrix A, Matrix B, Matrix K, Matrix Q, std::optional<Matrix> P = std::nullopt,
                                     std::optional<Matrix> H = std::nullopt) {
  const std::size_t n = A.rows();
  if (!A.square() || n == 0) throw Error(Errc::configuration, "A must be square, got " + A.shape());
  if (n > kMaxDim || B.cols() > kMaxDim) {
    throw Error(Errc::unsupported, "linear plants are limited to " + std::to_string(kMaxDim) + " states and inputs");
  }
  if (B.rows() != n) throw Error(Errc::configuration, "B is " + B.shape() + ", expected " + std::to_string(n) + " rows");
  if (K.rows() != B.cols() || K.cols() != n) {
    throw Error(Errc::configuration, "K is " + K.shape() + ", expected " + std::to_string(B.cols()) + "x" +
                                         std::to_string(n));
  }
  if (Q.rows() != n || Q.cols() != n) throw Error(Errc::configuration, "Q is " + Q.shape());
  if (H && H->rows() != n) throw Error(Errc::configuration, "H is " + H->shape());
  for (const Matrix* m : {&A, &B, &K, &Q}) detail::require_finite(*m, "linear plant");
  if (H) detail::require_finite(*H, "linear plant H");

  LinearPlant plant{std::move(A), std::move(B), std::move(K), Matrix{}, symmetrized(Q), std::move(H)};
  const Matrix acl = plant.closed_loop_matrix();
  if (P) {
    if (P->rows() != n || P->cols() != n) throw Error(Errc::configuration, "P is " + P->shape());
    plant.P = symmetrized(*P);
    if (!(sym_eig_min(plant.P) > 0.0)) throw Error(Errc::configuration, "P must be positive definite");
    if (!(sym_eig_min(plant.Q) > 0.0)) throw Error(Errc::configuration, "Q must be positive definite");
    const double res = induced_two_norm(lyapunov_residual(acl, plant.P, plant.Q));
    if (res > 1e-8 * induced_two_norm(plant.Q)) {
      throw Error(Errc::configuration, "P and Q do not satisfy the Lyapunov equation for A+BK (residual " +
                                           std::to_string(res) + ")");
    }
  } else {
    plant.P = solve_lyapunov(acl, plant.Q);
  }
  return plant;
}

/// A x + B K x_held + H d, written into @p dx. @p d may be empty when the
/// plant has no disturbance channel.
inline void closed_loop_deriv(const LinearPlant& plant, std::span<const double> x, std::span<const double> x_held,
                              std::span<const double> d, std::span<double> dx) {
  const std::size_t n = plant.state_dim();
  const std::size_t m = plant.B.cols();
  std::array<double, kMaxDim> ubuf{};
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += plant.K(i, j) * x_held[j];
    ubuf[i] = acc;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += plant.A(i, j) * x[j];
    for (std::size_t j = 0; j < m; ++j) acc += plant.B(i, j) * ubuf[j];
    if (plant.H && !d.empty()) {
      for (std::size_t j = 0; j < plant.H->cols(); ++j) acc += (*plant.H)(i, j) * d[j];
    }
    dx[i] = acc;
  }
}

inline Vector closed_loop_deriv(const LinearPlant& plant, std::span<const double> x, std::span<const double> x_held,
                                std::span<const double> d = {}) {
  const std::size_t n = plant.state_dim();
  if (x.size() != n || x_held.size() != n) {
    throw Error(Errc::configuration, "state has size " + std::to_string(x.size()) + ", plant expects " +
                                         std::to_string(n));
  }
  if (!d.empty()) {
    if (!plant.H) throw Error(Errc::configuration, "disturbance given but plant has no H");
    if (d.size() != plant.H->cols()) throw Error(Errc::configuration, "disturbance dimension mismatch");
  }
  Vector dx(n);
  closed_loop_deriv(plant, x, x_held, d, dx);
  return dx;
}

// ---------------------------------------------------------------------------
// Disturbance

/// Scalar bounded disturbance |d(t)| <= bound entering through a one-column H.
struct Disturbance {
  enum class Kind { none, constant, sinusoid, decaying_exponential, table };

  Kind kind = Kind::none;
  double bound = 0.0;              // d-bar
  double angular_frequency = 1.0;  // sinusoid, rad/s
  double phase = 0.0;              // sinusoid, rad
  double decay_rate = 1.0;         // decaying_exponential, 1/s
  std::vector<std::pair<double, double>> table;  // (t, d), t strictly increasing

  friend bool operator==(const Disturbance&, const Disturbance&) = default;

  void validate() const {
    if (!(bound >= 0.0) || !std::isfinite(bound)) throw Error(Errc::configuration, "disturbance bound must be >= 0");
    if (kind == Kind::decaying_exponential && !(decay_rate > 0.0)) {
      throw Error(Errc::configuration, "decay_rate must be positive");
    }
    if (kind == Kind::table) {
      if (table.empty()) throw Error(Errc::configuration, "disturbance table is empty");
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (std::abs(table[i].second) > bound) {
          throw Error(Errc::configuration, "disturbance table value at t=" + std::to_string(table[i].first) +
                                               " exceeds the bound");
        }
        if (i > 0 && !(table[i].first > table[i - 1].first)) {
          throw Error(Errc::configuration, "disturbance table times must increase");
        }
      }
    }
  }

  /// Linear interpolation for tables, held constant outside the range.
  double value(double t) const {
    switch (kind) {
      case Kind::none: return 0.0;
      case Kind::constant: return bound;
      case Kind::sinusoid: return bound * std::sin(angular_frequency * t + phase);
      case Kind::decaying_exponential: return bound * std::exp(-decay_rate * t);
      case Kind::table: {
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), t,
                                   [](double v, const auto& p) { return v < p.first; });
        const auto& [t1, d1] = *it;
        const auto& [t0, d0] = *(it - 1);
        return d0 + (d1 - d0) * (t - t0) / (t1 - t0);
      }
    }
    return 0.0;
  }
};

inline std::string to_string(Disturbance::Kind k) {
  switch (k) {
    case Disturbance::Kind::none: return "none";
    case Disturbance::Kind::constant: return "constant";
    case Disturbance::Kind::sinusoid: return "sinusoid";
    case Disturbance::Kind::decaying_exponential: return "decaying-exponential";
    case Disturbance::Kind::table: return "table";
  }
  return "none";
}

inline Disturbance::Kind disturbance_kind_from_string(const std::string& s) {
  if (s == "none") return Disturbance::Kind::none;
  if (s == "constant") return Disturbance::Kind::constant;
  if (s == "sinusoid") return Disturbance::Kind::sinusoid;
  if (s == "decaying-exponential") return Disturbance::Kind::decaying_exponential;
  if (s == "table") return Disturbance::Kind::table;
  throw Error(Errc::configuration, "unknown disturbance kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Held sample

/// The state latched at the last event. e is always derived from it, never
/// stored, so a reset cannot leave a stale error behind.
class HeldSample {
 public:
  HeldSample() = default;
  HeldSample(double t, Vector x) : t_(t), x_(std::move(x)) {}

  double time() const noexcept { return t_; }
  std::span<const double> state() const noexcept { return x_; }

  void latch(double t, std::span<const double> x) {
    t_ = t;
    x_.assign(x.begin(), x.end());
  }

  /// e = x_i - x, written into @p e.
  void error(std::span<const double> x, std::span<double> e) const noexcept {
    for (std::size_t i = 0; i < x_.size(); ++i) e[i] = x_[i] - x[i];
  }

  Vector error(std::span<const double> x) const {
    Vector e(x_.size());
    error(x, e);
    return e;
  }

 private:
  double t_ = 0.0;
  Vector x_;
};

}  // namespace miet
