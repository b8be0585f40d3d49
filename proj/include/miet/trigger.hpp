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
 * @file trigger.hpp
 * @brief Triggering mechanisms.
 *
 * - static:  fire when gamma(|e|) >= sigma alpha(|x|)
 * - dynamic: fire when eta + theta (sigma alpha(|x|) - gamma(|e|)) <= 0, with
 *            eta' = -zeta eta + sigma alpha(|x|) - gamma(|e|)
 * - miet:    a countdown Z, reset to Z_bar at every event, decreasing with
 *            Z' = omega <= -epsilon; an event fires when Z reaches 0.
 *
 * The countdown rate is omega = min(0, varpi) - epsilon (just -epsilon when
 * e = 0). For both plant flavors varpi has the shape
 *
 *     varpi = c2 r^2 - (1 + Z) c1 r,    r = |x| / |e|,
 *
 * with (c2, c1) = (1/lmin(M), 2 L |M| / lmin(M)) for nonlinear plants and
 * (lmin(Q)/lmin(P), 2 |PBK| / lmin(P)) for linear ones. Its minimum over r is
 * -(1+Z)^2 c1^2 / (4 c2), i.e. -b (1+Z)^2, which is what bounds omega from
 * below and makes the inter-event time independent of the state.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "miet/error.hpp"
#include "miet/linalg.hpp"
#include "miet/plant.hpp"

namespace miet {

// ---------------------------------------------------------------------------
// Comparison functions for the baselines

/// Class-K-infinity map drawn from the registered family {c r^2, c r}.
struct ComparisonFn {
  enum class Kind { quadratic, linear };
  Kind kind = Kind::quadratic;
  double coeff = 0.5;

  double operator()(double r) const noexcept { return kind == Kind::quadratic ? coeff * r * r : coeff * r; }

  friend bool operator==(const ComparisonFn&, const ComparisonFn&) = default;

  void validate(const char* what) const {
    if (!(coeff > 0.0) || !std::isfinite(coeff)) {
      throw Error(Errc::configuration, std::string(what) + ": coefficient must be positive");
    }
  }
};

inline std::string to_string(ComparisonFn::Kind k) { return k == ComparisonFn::Kind::quadratic ? "quadratic" : "linear"; }

inline ComparisonFn::Kind comparison_kind_from_string(const std::string& s) {
  if (s == "quadratic") return ComparisonFn::Kind::quadratic;
  if (s == "linear") return ComparisonFn::Kind::linear;
  throw Error(Errc::configuration, "unknown comparison function '" + s + "' (expected quadratic or linear)");
}

struct StaticTriggerParams {
  double sigma = 0.5;
  ComparisonFn alpha{ComparisonFn::Kind::quadratic, 0.5};
  ComparisonFn gamma{ComparisonFn::Kind::linear, 1.0};

  friend bool operator==(const StaticTriggerParams&, const StaticTriggerParams&) = default;

  void validate() const {
    if (!(sigma > 0.0 && sigma < 1.0)) throw Error(Errc::configuration, "sigma must lie in (0, 1)");
    alpha.validate("alpha");
    gamma.validate("gamma");
  }
};

struct DynamicTriggerParams {
  double sigma = 0.5;
  double theta = 1.0;
  double zeta_rate = 1.0;  // zeta(eta) = zeta_rate * eta
  double eta0 = 0.0;
  ComparisonFn alpha{ComparisonFn::Kind::quadratic, 0.5};
  ComparisonFn gamma{ComparisonFn::Kind::linear, 1.0};

  friend bool operator==(const DynamicTriggerParams&, const DynamicTriggerParams&) = default;

  void validate() const {
    if (!(sigma > 0.0 && sigma < 1.0)) throw Error(Errc::configuration, "sigma must lie in (0, 1)");
    if (!(theta > 0.0)) throw Error(Errc::configuration, "theta must be positive");
    if (!(zeta_rate > 0.0)) throw Error(Errc::configuration, "zeta_rate must be positive");
    if (!(eta0 >= 0.0) || !std::isfinite(eta0)) throw Error(Errc::configuration, "eta0 must be >= 0");
    alpha.validate("alpha");
    gamma.validate("gamma");
  }
};

// ---------------------------------------------------------------------------
// MIET-designable trigger

struct NonlinearFlavor {
  double L = 1.0;
  Matrix M;
};

struct LinearFlavor {
  Matrix P;
  Matrix B;
  Matrix K;
  Matrix Q;
};

struct MietTriggerParams {
  double Z_bar = 1.0;
  double epsilon = 1.0;
  std::variant<NonlinearFlavor, LinearFlavor> flavor;

  void validate() const {
    if (!(Z_bar > 0.0) || !std::isfinite(Z_bar)) throw Error(Errc::configuration, "Z_bar must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(Errc::configuration, "epsilon must be positive");
    if (const auto* nl = std::get_if<NonlinearFlavor>(&flavor)) {
      if (!(nl->L > 0.0)) throw Error(Errc::configuration, "Lipschitz constant must be positive");
      if (!(sym_eig_min(nl->M) > 0.0)) throw Error(Errc::configuration, "M must be positive definite");
    } else {
      const auto& lf = std::get<LinearFlavor>(flavor);
      if (!(sym_eig_min(lf.P) > 0.0)) throw Error(Errc::configuration, "P must be positive definite");
      if (!(sym_eig_min(lf.Q) > 0.0)) throw Error(Errc::configuration, "Q must be positive definite");
    }
  }
};

/// Coefficients of varpi = quadratic r^2 - (1 + Z) linear r.
struct VarpiCoefficients {
  double quadratic = 0.0;
  double linear = 0.0;

  /// Lower bound constant: min over r of varpi is -b (1 + Z)^2.
  double implied_b() const noexcept { return linear * linear / (4.0 * quadratic); }
};

inline VarpiCoefficients varpi_coefficients(double L, const Matrix& M) {
  const double lmin = sym_eig_min(M);
  const double mnorm = induced_two_norm(M);
  return {1.0 / lmin, 2.0 * L * mnorm / lmin};
}

inline VarpiCoefficients varpi_coefficients(const Matrix& P, const Matrix& Q, double pbk_norm) {
  const double lp = sym_eig_min(P);
  return {sym_eig_min(Q) / lp, 2.0 * pbk_norm / lp};
}

inline VarpiCoefficients varpi_coefficients(const MietTriggerParams& params) {
  return std::visit(
      [](const auto& f) -> VarpiCoefficients {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, NonlinearFlavor>) {
          return varpi_coefficients(f.L, f.M);
        } else {
          return varpi_coefficients(f.P, f.Q, induced_two_norm(f.P * f.B * f.K));
        }
      },
      params.flavor);
}

/// varpi from the norms of x and e. Requires |e| > 0.
inline double varpi(const VarpiCoefficients& c, double x_norm, double e_norm, double Z) {
  if (!(e_norm > 0.0)) throw Error(Errc::division_guard, "varpi evaluated with |e| = 0");
  const double r = x_norm / e_norm;
  return c.quadratic * r * r - (1.0 + Z) * c.linear * r;
}

inline double varpi_nonlinear(std::span<const double> x, std::span<const double> e, double Z, double L,
                              const Matrix& M) {
  return varpi(varpi_coefficients(L, M), norm(x), norm(e), Z);
}

inline double varpi_linear(std::span<const double> x, std::span<const double> e, double Z, const Matrix& P,
                           const Matrix& Q, double pbk_norm) {
  return varpi(varpi_coefficients(P, Q, pbk_norm), norm(x), norm(e), Z);
}

/// |e| small enough to take the e = 0 branch of omega.
///
/// varpi grows without bound as |e| -> 0 with x fixed, so near this
/// threshold both branches give -epsilon anyway.
inline bool error_is_zero(double x_norm, double e_norm) noexcept {
  return e_norm <= 1e-12 * std::max(1.0, x_norm);
}

inline double omega(double varpi_value, double epsilon, bool e_is_zero) noexcept {
  if (e_is_zero) return -epsilon;
  return std::min(0.0, varpi_value) - epsilon;
}

/// Countdown rate at (x, e, Z).
inline double omega(const VarpiCoefficients& c, double epsilon, double x_norm, double e_norm, double Z) {
  if (error_is_zero(x_norm, e_norm)) return -epsilon;
  return omega(varpi(c, x_norm, e_norm, Z), epsilon, false);
}

/// Tolerance above Z_bar at which a countdown value is considered corrupt.
inline double countdown_tolerance(double Z_bar) noexcept { return 1e-9 * std::max(1.0, Z_bar); }

/// True once the countdown has reached zero. Overshoot below zero is the
/// localization residue and still counts as reached.
inline bool miet_trigger_check(double Z, double Z_bar) {
  if (Z > Z_bar + countdown_tolerance(Z_bar)) {
    throw Error(Errc::internal_consistency, "countdown " + std::to_string(Z) + " above its reset value " +
                                                std::to_string(Z_bar) + "; a reset was missed");
  }
  return Z <= 0.0;
}

// ---------------------------------------------------------------------------
// Baselines

inline double static_trigger_margin(double x_norm, double e_norm, const StaticTriggerParams& p) noexcept {
  return p.gamma(e_norm) - p.sigma * p.alpha(x_norm);
}

inline bool static_trigger_check(double x_norm, double e_norm, const StaticTriggerParams& p) noexcept {
  return static_trigger_margin(x_norm, e_norm, p) >= 0.0;
}

inline bool static_trigger_check(std::span<const double> x, std::span<const double> e,
                                 const StaticTriggerParams& p) noexcept {
  return static_trigger_check(norm(x), norm(e), p);
}

inline double dynamic_eta_rate(double eta, double x_norm, double e_norm, const DynamicTriggerParams& p) noexcept {
  return -p.zeta_rate * eta + p.sigma * p.alpha(x_norm) - p.gamma(e_norm);
}

/// eta + theta (sigma alpha(|x|) - gamma(|e|)); the trigger fires at <= 0.
inline double dynamic_condition(double eta, double x_norm, double e_norm, const DynamicTriggerParams& p) noexcept {
  return eta + p.theta * (p.sigma * p.alpha(x_norm) - p.gamma(e_norm));
}

inline double eta_tolerance(double eta_scale) noexcept { return 1e-9 * std::max(1.0, eta_scale); }

struct DynamicStep {
  double eta = 0.0;
  bool fired = false;
};

/// One RK4 step of the eta dynamics with x and e frozen over the step,
/// followed by the trigger test at the step end. eta is not reset by events.
inline DynamicStep dynamic_trigger_step(std::span<const double> x, std::span<const double> e, double eta, double dt,
                                        const DynamicTriggerParams& p) {
  if (!(dt > 0.0)) throw Error(Errc::domain_error, "dt must be positive");
  if (eta < -eta_tolerance(eta)) throw Error(Errc::invariant_violation, "eta is negative on entry");
  const double xn = norm(x);
  const double en = norm(e);
  auto rate = [&](double h) { return dynamic_eta_rate(h, xn, en, p); };
  const double k1 = rate(eta);
  const double k2 = rate(eta + 0.5 * dt * k1);
  const double k3 = rate(eta + 0.5 * dt * k2);
  const double k4 = rate(eta + dt * k3);
  const double next = eta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  const bool fired = dynamic_condition(next, xn, en, p) <= 0.0;
  if (!fired && next < -eta_tolerance(eta)) {
    throw Error(Errc::invariant_violation, "eta went negative without an event; parameters are inconsistent");
  }
  return {next, fired};
}

// ---------------------------------------------------------------------------

/// Per-run trigger bookkeeping. Owned by a single simulation.
struct TriggerState {
  HeldSample held;
  double Z = 0.0;    // countdown (miet)
  double eta = 0.0;  // virtual state (dynamic)
  std::size_t event_count = 0;
  std::vector<double> event_times;

  void record_event(double t, std::span<const double> x) {
    held.latch(t, x);
    ++event_count;
    event_times.push_back(t);
  }
};

}  // namespace miet
