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
 * @file bounds.hpp
 * @brief Closed-form minimum inter-event time of the countdown trigger.
 *
 * Between events the countdown obeys Z' >= -b (1 + Z)^2 - epsilon, so an
 * interval can be no shorter than the time phi takes to fall from Z_bar to 0
 * under phi' = -b (1 + phi)^2 - epsilon:
 *
 *     tau = 1/sqrt(b eps) * (atan(s (1 + Z_bar)) - atan(s)),   s = sqrt(b / eps).
 *
 * phi_oracle() integrates that ODE directly and is kept as an independent
 * check of the closed form.
 */

#pragma once

#include <cmath>
#include <string>

#include "miet/error.hpp"
#include "miet/linalg.hpp"

namespace miet {

namespace detail {
inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(Errc::domain_error, std::string(name) + " must be positive and finite, got " + std::to_string(v));
  }
}
}  // namespace detail

inline double miet_lower_bound(double b, double epsilon, double Z_bar) {
  detail::require_positive(b, "b");
  detail::require_positive(epsilon, "epsilon");
  detail::require_positive(Z_bar, "Z_bar");
  const double s = std::sqrt(b / epsilon);
  // atan(u) - atan(v) = atan((u - v) / (1 + u v)) for u, v > 0; avoids the
  // cancellation when s is tiny.
  const double diff = std::atan(s * Z_bar / (1.0 + s * s * (1.0 + Z_bar)));
  return diff / std::sqrt(b * epsilon);
}

/// b = L^2 |M|^2 / lambda_min(M).
inline double b_nonlinear(double L, const Matrix& M) {
  detail::require_positive(L, "L");
  const double lmin = sym_eig_min(M);
  if (!(lmin > 0.0)) throw Error(Errc::domain_error, "M must be positive definite");
  const double mnorm = induced_two_norm(M);
  return L * L * mnorm * mnorm / lmin;
}

/// b = |P B K|^2 / (lambda_min(P) lambda_min(Q)).
inline double b_linear(const Matrix& P, const Matrix& B, const Matrix& K, const Matrix& Q) {
  if (P.rows() != B.rows() || B.cols() != K.rows() || K.cols() != P.cols() || Q.rows() != P.rows()) {
    throw Error(Errc::configuration, "inconsistent shapes P " + P.shape() + ", B " + B.shape() + ", K " +
                                         K.shape() + ", Q " + Q.shape());
  }
  const double lp = sym_eig_min(P);
  const double lq = sym_eig_min(Q);
  if (!(lp > 0.0) || !(lq > 0.0)) throw Error(Errc::domain_error, "P and Q must be positive definite");
  const double pbk = induced_two_norm(P * B * K);
  return pbk * pbk / (lp * lq);
}

/// Supremum of the lower bound over the design parameters: letting Z_bar grow
/// without limit and then epsilon shrink to zero leaves 1/b.
inline double miet_upper_limit(double b) {
  detail::require_positive(b, "b");
  return 1.0 / b;
}

/**
 * Time for phi' = -b (1 + phi)^2 - epsilon to fall from Z_bar to 0.
 *
 * Classical RK4 with fixed step @p dt and linear interpolation of the zero
 * crossing. Fails if no crossing happens within Z_bar/epsilon + 1, which the
 * dynamics rule out.
 */
inline double phi_oracle(double b, double epsilon, double Z_bar, double dt) {
  detail::require_positive(b, "b");
  detail::require_positive(epsilon, "epsilon");
  detail::require_positive(Z_bar, "Z_bar");
  detail::require_positive(dt, "dt");
  auto rate = [&](double phi) { return -b * (1.0 + phi) * (1.0 + phi) - epsilon; };

  const double t_limit = Z_bar / epsilon + 1.0;
  double t = 0.0;
  double phi = Z_bar;
  while (t <= t_limit) {
    const double k1 = rate(phi);
    const double k2 = rate(phi + 0.5 * dt * k1);
    const double k3 = rate(phi + 0.5 * dt * k2);
    const double k4 = rate(phi + dt * k3);
    const double next = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next <= 0.0) return t + dt * phi / (phi - next);
    phi = next;
    t += dt;
  }
  throw Error(Errc::internal_consistency, "phi did not reach zero within Z_bar/epsilon + 1");
}

/// phi_oracle with a step of 1e-5 times a crude lower estimate of the
/// crossing time, Z_bar / (b (1 + Z_bar)^2 + epsilon).
inline double phi_oracle(double b, double epsilon, double Z_bar) {
  detail::require_positive(b, "b");
  detail::require_positive(epsilon, "epsilon");
  detail::require_positive(Z_bar, "Z_bar");
  const double crude = Z_bar / (b * (1.0 + Z_bar) * (1.0 + Z_bar) + epsilon);
  return phi_oracle(b, epsilon, Z_bar, crude * 1e-5);
}

/// The design tuple together with the lower bound it guarantees.
struct MietBound {
  double b = 0.0;
  double epsilon = 0.0;
  double Z_bar = 0.0;
  double tau = 0.0;
};

inline MietBound make_miet_bound(double b, double epsilon, double Z_bar) {
  return {b, epsilon, Z_bar, miet_lower_bound(b, epsilon, Z_bar)};
}

}  // namespace miet
