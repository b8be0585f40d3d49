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
 * @file sim.hpp
 * @brief Closed-loop simulation of an event-triggered feedback loop.
 *
 * The plant state and the trigger's internal variable (countdown Z or
 * virtual state eta) are integrated jointly with fixed-step RK4 while the
 * control input is held at its value from the last event. When the trigger
 * condition holds at the end of a step, the crossing is located by bisection
 * on the sub-step length, the step is split there, the sample is latched and
 * integration resumes from the event.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "miet/bounds.hpp"
#include "miet/error.hpp"
#include "miet/integrator.hpp"
#include "miet/linalg.hpp"
#include "miet/plant.hpp"
#include "miet/trigger.hpp"

namespace miet {

// ---------------------------------------------------------------------------
// Scenario description (pure data, serializable)

struct VdpPlantConfig {
  double lipschitz = 1.0;
  friend bool operator==(const VdpPlantConfig&, const VdpPlantConfig&) = default;
};

struct LinearPlantConfig {
  Matrix A;
  Matrix B;
  Matrix K;
  Matrix Q;
  std::optional<Matrix> P;  // solved from Q when absent
  std::optional<Matrix> H;  // disturbance channel
  friend bool operator==(const LinearPlantConfig&, const LinearPlantConfig&) = default;
};

using PlantConfig = std::variant<VdpPlantConfig, LinearPlantConfig>;

struct MietTriggerConfig {
  double Z_bar = 1.0;
  double epsilon = 1.0;
  std::optional<Matrix> M;           // nonlinear plants: error weight in W and varpi
  std::optional<Matrix> V;           // nonlinear plants: V(x) = x^T V x / 2, identity if absent
  std::optional<double> b_override;  // rounded-up b used for the reported bound
  friend bool operator==(const MietTriggerConfig&, const MietTriggerConfig&) = default;
};

using TriggerConfig = std::variant<MietTriggerConfig, StaticTriggerParams, DynamicTriggerParams>;

enum class DtPolicy { error, warn };

struct ScenarioConfig {
  std::string id = "scenario";
  PlantConfig plant;
  TriggerConfig trigger;
  Vector x0;
  double horizon = 20.0;
  double dt = 1e-4;
  std::optional<Disturbance> disturbance;
  int trace_stride = 10;
  DtPolicy dt_policy = DtPolicy::error;
  bool log_events = true;  // extra trace rows at event instants (post-reset)

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline constexpr double kBaselineMaxDt = 1e-4;
inline constexpr double kDivergenceNorm = 1e9;
inline constexpr double kDefaultWarmup = 1.0;

// ---------------------------------------------------------------------------
// Lyapunov monitor

/// W = x^T V x / 2 + Z e^T C e / 2.
struct LyapunovMonitor {
  Matrix V;
  Matrix C;
};

struct LyapunovValue {
  double W = 0.0;
  double cross_term = 0.0;  // Z e^T C e / 2
};

inline LyapunovValue lyapunov_W(std::span<const double> x, std::span<const double> e, double Z,
                                const LyapunovMonitor& m) {
  const double cross = 0.5 * Z * quad_form(m.C, e);
  return {0.5 * quad_form(m.V, x) + cross, cross};
}

// ---------------------------------------------------------------------------
// Resolved scenario

enum class TriggerKind { miet, static_rule, dynamic_rule };

inline std::string to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::miet: return "miet";
    case TriggerKind::static_rule: return "static";
    case TriggerKind::dynamic_rule: return "dynamic";
  }
  return "miet";
}

/// Design constants of a countdown trigger.
struct MietDesign {
  VarpiCoefficients coefficients;
  double b_formula = 0.0;  // from L, M or P, B, K, Q
  double b = 0.0;          // b_override if given, else b_formula
  MietBound bound;
  double upper_limit = 0.0;
};

/// Runtime objects built from a ScenarioConfig.
struct Scenario {
  ScenarioConfig config;
  std::variant<NonlinearPlant, LinearPlant> plant;
  std::variant<MietTriggerParams, StaticTriggerParams, DynamicTriggerParams> trigger;
  LyapunovMonitor monitor;
  std::optional<MietDesign> miet;
  std::vector<std::string> warnings;

  std::size_t state_dim() const {
    return std::visit(
        [](const auto& p) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, NonlinearPlant>) {
            return p.state_dim;
          } else {
            return p.state_dim();
          }
        },
        plant);
  }

  TriggerKind trigger_kind() const { return static_cast<TriggerKind>(trigger.index()); }
};

inline Scenario resolve(const ScenarioConfig& cfg) {
  Scenario sc;
  sc.config = cfg;
  const std::string& id = cfg.id;
  auto fail = [&](const std::string& what) { throw Error(Errc::configuration, id + ": " + what); };

  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt must be positive");
  if (!(cfg.horizon >= 10.0 * cfg.dt) || !std::isfinite(cfg.horizon)) fail("horizon must be at least 10 dt");
  if (cfg.trace_stride < 1) fail("trace_stride must be >= 1");

  std::size_t n = 0;
  if (const auto* vdp = std::get_if<VdpPlantConfig>(&cfg.plant)) {
    NonlinearPlant p = van_der_pol(vdp->lipschitz);
    n = p.state_dim;
    sc.plant = std::move(p);
  } else {
    const auto& lc = std::get<LinearPlantConfig>(cfg.plant);
    LinearPlant p = make_linear_plant(lc.A, lc.B, lc.K, lc.Q, lc.P, lc.H);
    n = p.state_dim();
    sc.plant = std::move(p);
  }

  if (cfg.x0.size() != n) fail("x0 has " + std::to_string(cfg.x0.size()) + " entries, plant has " +
                               std::to_string(n) + " states");
  detail::require_finite(std::span<const double>(cfg.x0), "x0");

  if (cfg.disturbance && cfg.disturbance->kind != Disturbance::Kind::none) {
    cfg.disturbance->validate();
    const auto* lp = std::get_if<LinearPlant>(&sc.plant);
    if (!lp) fail("disturbances are only supported on linear plants");
    if (!lp->H || lp->H->cols() != 1) fail("a disturbance needs a single-column H");
  }

  const auto* linear = std::get_if<LinearPlant>(&sc.plant);
  const Matrix state_v = linear ? linear->P : Matrix::identity(n);

  std::visit(
      [&](const auto& tc) {
        using T = std::decay_t<decltype(tc)>;
        if constexpr (std::is_same_v<T, MietTriggerConfig>) {
          MietTriggerParams params;
          params.Z_bar = tc.Z_bar;
          params.epsilon = tc.epsilon;
          MietDesign design;
          if (linear) {
            if (tc.M || tc.V) fail("M and V are only used with nonlinear plants; linear plants use P");
            params.flavor = LinearFlavor{linear->P, linear->B, linear->K, linear->Q};
            design.b_formula = b_linear(linear->P, linear->B, linear->K, linear->Q);
            sc.monitor = {linear->P, linear->P};
          } else {
            if (!tc.M) fail("nonlinear plants need the error weight M in the trigger table");
            const Matrix M = symmetrized(*tc.M);
            if (M.rows() != n) fail("M is " + M.shape() + " for a " + std::to_string(n) + "-state plant");
            const double L = std::get<NonlinearPlant>(sc.plant).lipschitz_L;
            params.flavor = NonlinearFlavor{L, M};
            design.b_formula = b_nonlinear(L, M);
            Matrix v = tc.V ? symmetrized(*tc.V) : Matrix::identity(n);
            if (v.rows() != n) fail("V is " + v.shape());
            if (!(sym_eig_min(v) > 0.0)) fail("V must be positive definite");
            sc.monitor = {std::move(v), M};
          }
          params.validate();
          design.coefficients = varpi_coefficients(params);
          design.b = design.b_formula;
          if (tc.b_override) {
            if (!(*tc.b_override >= design.b_formula * (1.0 - 1e-9))) {
              fail("b_override " + std::to_string(*tc.b_override) + " is below the computed b " +
                   std::to_string(design.b_formula) + "; the bound would not hold");
            }
            design.b = *tc.b_override;
          }
          design.bound = make_miet_bound(design.b, params.epsilon, params.Z_bar);
          design.upper_limit = miet_upper_limit(design.b);
          sc.miet = design;
          sc.trigger = std::move(params);

          if (cfg.dt > design.bound.tau / 20.0) {
            const std::string msg = "dt " + std::to_string(cfg.dt) + " exceeds tau/20 = " +
                                    std::to_string(design.bound.tau / 20.0);
            if (cfg.dt_policy == DtPolicy::error) fail(msg);
            sc.warnings.push_back(msg);
          }
        } else {
          tc.validate();
          sc.trigger = tc;
          sc.monitor = {state_v, Matrix(n, n)};
          if (cfg.dt > kBaselineMaxDt) {
            const std::string msg = "baseline triggers need dt <= 1e-4, got " + std::to_string(cfg.dt);
            if (cfg.dt_policy == DtPolicy::error) fail(msg);
            sc.warnings.push_back(msg);
          }
        }
      },
      cfg.trigger);
  return sc;
}

// ---------------------------------------------------------------------------
// Trace

struct TriggerEvent {
  double time = 0.0;
  std::size_t index = 0;
  Vector x_latched;
  std::optional<double> inter_event_dt;  // absent for the first event
};

struct SimulationTrace {
  std::string scenario_id;
  TriggerKind trigger_kind = TriggerKind::miet;
  std::size_t state_dim = 0;

  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> errors;
  std::vector<double> trigger_var;  // Z, eta, or the static margin gamma - sigma alpha
  std::vector<double> omega;        // NaN for non-countdown triggers
  std::vector<double> lyapunov_W;
  std::vector<double> cross_term;
  std::vector<bool> is_event_row;

  std::vector<TriggerEvent> events;
  std::vector<std::string> warnings;

  Vector final_state;
  double final_time = 0.0;

  std::size_t rows() const noexcept { return times.size(); }

  friend bool operator==(const SimulationTrace& a, const SimulationTrace& b) {
    auto same = [](const std::vector<double>& u, const std::vector<double>& v) {
      // bitwise, so NaN columns compare equal to themselves
      return u.size() == v.size() &&
             std::equal(u.begin(), u.end(), v.begin(), [](double p, double q) {
               return std::memcmp(&p, &q, sizeof(double)) == 0;
             });
    };
    if (a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      if (a.events[i].time != b.events[i].time || a.events[i].x_latched != b.events[i].x_latched) return false;
    }
    return a.times == b.times && a.states == b.states && a.errors == b.errors && same(a.trigger_var, b.trigger_var) &&
           same(a.omega, b.omega) && a.lyapunov_W == b.lyapunov_W && a.cross_term == b.cross_term &&
           a.final_state == b.final_state;
  }
};

// ---------------------------------------------------------------------------
// Trigger policies used by the engine

namespace detail {

struct MietPolicy {
  static constexpr std::size_t internal_dim = 1;
  VarpiCoefficients c;
  double Z_bar;
  double epsilon;

  double initial() const noexcept { return Z_bar; }
  double rate(double xn, double en, double z) const { return omega(c, epsilon, xn, en, z); }
  bool fired(double, double, double z) const { return miet_trigger_check(z, Z_bar); }
  double reset(double) const noexcept { return Z_bar; }
  double trigger_var(double, double, double z) const noexcept { return z; }
  double omega_value(double xn, double en, double z) const { return rate(xn, en, z); }
  // Z' <= -epsilon caps every interval at Z_bar / epsilon.
  std::optional<double> max_interval() const noexcept { return Z_bar / epsilon; }
  void check(double z) const {
    if (z > Z_bar + countdown_tolerance(Z_bar)) {
      throw Error(Errc::internal_consistency, "countdown exceeded Z_bar");
    }
  }
};

struct StaticPolicy {
  static constexpr std::size_t internal_dim = 0;
  StaticTriggerParams p;

  double initial() const noexcept { return 0.0; }
  double rate(double, double, double) const noexcept { return 0.0; }
  // With e = 0 there is nothing new to send; this also keeps a state sitting
  // exactly at the origin from firing continuously.
  bool fired(double xn, double en, double) const noexcept {
    return !error_is_zero(xn, en) && static_trigger_check(xn, en, p);
  }
  double reset(double z) const noexcept { return z; }
  double trigger_var(double xn, double en, double) const noexcept { return static_trigger_margin(xn, en, p); }
  double omega_value(double, double, double) const noexcept { return std::numeric_limits<double>::quiet_NaN(); }
  std::optional<double> max_interval() const noexcept { return std::nullopt; }
  void check(double) const noexcept {}
};

struct DynamicPolicy {
  static constexpr std::size_t internal_dim = 1;
  DynamicTriggerParams p;

  double initial() const noexcept { return p.eta0; }
  double rate(double xn, double en, double eta) const noexcept { return dynamic_eta_rate(eta, xn, en, p); }
  bool fired(double xn, double en, double eta) const noexcept {
    return !error_is_zero(xn, en) && dynamic_condition(eta, xn, en, p) <= 0.0;
  }
  double reset(double eta) const noexcept { return eta; }
  double trigger_var(double, double, double eta) const noexcept { return eta; }
  double omega_value(double, double, double) const noexcept { return std::numeric_limits<double>::quiet_NaN(); }
  std::optional<double> max_interval() const noexcept { return std::nullopt; }
  void check(double eta) const {
    if (eta < -eta_tolerance(p.eta0)) throw Error(Errc::invariant_violation, "eta became negative");
  }
};

struct EngineSettings {
  std::string id;
  Vector x0;
  double horizon = 0.0;
  double dt = 0.0;
  int trace_stride = 1;
  bool log_events = true;
};

/// deriv(t, x, x_held, dx) evaluates the held-input closed loop.
template <class Deriv, class Policy>
SimulationTrace run_closed_loop(const Deriv& deriv, const Policy& policy, const LyapunovMonitor& monitor,
                                const EngineSettings& s) {
  const std::size_t n = s.x0.size();
  constexpr std::size_t k = Policy::internal_dim;
  const std::size_t dim = n + k;

  SimulationTrace trace;
  trace.scenario_id = s.id;
  trace.state_dim = n;

  Vector y(dim);
  std::copy(s.x0.begin(), s.x0.end(), y.begin());
  if constexpr (k == 1) y[n] = policy.initial();

  TriggerState ts;
  auto internal = [&](std::span<const double> v) {
    if constexpr (k == 1) {
      return v[n];
    } else {
      return 0.0;
    }
  };
  std::array<double, kMaxDim> ebuf{};
  auto norms = [&](std::span<const double> v) {
    const std::span<const double> x = v.first(n);
    const std::span<double> e(ebuf.data(), n);
    ts.held.error(x, e);
    return std::pair{norm(x), norm(std::span<const double>(e))};
  };

  auto rhs = [&](double t, std::span<const double> v, std::span<double> dv) {
    deriv(t, v.first(n), ts.held.state(), dv.first(n));
    if constexpr (k == 1) {
      const auto [xn, en] = norms(v);
      dv[n] = policy.rate(xn, en, v[n]);
    }
  };
  auto fired = [&](std::span<const double> v) {
    const auto [xn, en] = norms(v);
    return policy.fired(xn, en, internal(v));
  };

  auto log_row = [&](double t, std::span<const double> v, bool event_row) {
    const std::span<const double> x = v.first(n);
    Vector e = ts.held.error(x);
    const double xn = norm(x);
    const double en = norm(e);
    const double z = internal(v);
    const LyapunovValue w = lyapunov_W(x, e, std::is_same_v<Policy, MietPolicy> ? z : 0.0, monitor);
    trace.times.push_back(t);
    trace.states.emplace_back(x.begin(), x.end());
    trace.errors.push_back(std::move(e));
    trace.trigger_var.push_back(policy.trigger_var(xn, en, z));
    trace.omega.push_back(policy.omega_value(xn, en, z));
    trace.lyapunov_W.push_back(w.W);
    trace.cross_term.push_back(w.cross_term);
    trace.is_event_row.push_back(event_row);
  };

  double last_event = 0.0;
  auto fire = [&](double t) {
    const std::span<const double> x = std::span<const double>(y).first(n);
    TriggerEvent ev;
    ev.time = t;
    ev.index = ts.event_count;
    ev.x_latched.assign(x.begin(), x.end());
    if (ts.event_count > 0) {
      if (!(t > last_event)) {
        throw Error(Errc::internal_consistency, s.id + ": two events at t=" + std::to_string(t));
      }
      ev.inter_event_dt = t - last_event;
    }
    ts.record_event(t, x);
    if constexpr (k == 1) y[n] = policy.reset(y[n]);
    last_event = t;
    trace.events.push_back(std::move(ev));
  };

  // t0 = 0 is always an event.
  fire(0.0);
  log_row(0.0, y, false);

  RungeKutta4 rk(dim);
  Vector trial(dim);
  const double loc_tol = 1e-9 * s.dt;
  const auto steps = static_cast<std::size_t>(std::ceil(s.horizon / s.dt - 1e-9));
  const std::optional<double> max_gap = policy.max_interval();

  double t = 0.0;
  for (std::size_t step = 0; step < steps; ++step) {
    const double t_next = std::min(s.horizon, static_cast<double>(step + 1) * s.dt);
    double remaining = t_next - t;
    int events_this_step = 0;
    while (remaining > loc_tol * 1e-3) {
      rk.step(rhs, t, y, remaining, trial);
      if (!fired(trial)) {
        y.swap(trial);
        t += remaining;
        break;
      }
      // First crossing inside [t, t + remaining]: shrink the bracket until it
      // is tighter than the localization tolerance, then land on its right end.
      double lo = 0.0;
      double hi = remaining;
      while (hi - lo > loc_tol) {
        const double mid = 0.5 * (lo + hi);
        rk.step(rhs, t, y, mid, trial);
        if (fired(trial)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      rk.step(rhs, t, y, hi, y);
      t += hi;
      remaining -= hi;
      fire(t);
      if (s.log_events) log_row(t, y, true);
      if (++events_this_step > 1000) {
        throw Error(Errc::internal_consistency, s.id + ": events accumulating at t=" + std::to_string(t));
      }
    }
    t = t_next;

    policy.check(internal(y));
    const double xn = norm(std::span<const double>(y).first(n));
    if (!(xn <= kDivergenceNorm)) {
      throw Error(Errc::divergence, s.id + ": |x| = " + std::to_string(xn) + " at t=" + std::to_string(t));
    }
    if (max_gap && t - last_event > *max_gap + 10.0 * s.dt) {
      throw Error(Errc::internal_consistency, s.id + ": no event for " + std::to_string(t - last_event) +
                                                  " s, beyond the countdown limit");
    }
    if ((step + 1) % static_cast<std::size_t>(s.trace_stride) == 0 || step + 1 == steps) {
      log_row(t, y, false);
    }
  }

  trace.final_time = t;
  trace.final_state.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  return trace;
}

}  // namespace detail

/// Runs a resolved scenario.
inline SimulationTrace simulate(const Scenario& sc) {
  const ScenarioConfig& cfg = sc.config;
  detail::EngineSettings settings{cfg.id, cfg.x0, cfg.horizon, cfg.dt, cfg.trace_stride, cfg.log_events};

  auto with_policy = [&](const auto& deriv) {
    return std::visit(
        [&](const auto& params) {
          using T = std::decay_t<decltype(params)>;
          if constexpr (std::is_same_v<T, MietTriggerParams>) {
            const detail::MietPolicy pol{sc.miet->coefficients, params.Z_bar, params.epsilon};
            return detail::run_closed_loop(deriv, pol, sc.monitor, settings);
          } else if constexpr (std::is_same_v<T, StaticTriggerParams>) {
            return detail::run_closed_loop(deriv, detail::StaticPolicy{params}, sc.monitor, settings);
          } else {
            return detail::run_closed_loop(deriv, detail::DynamicPolicy{params}, sc.monitor, settings);
          }
        },
        sc.trigger);
  };

  SimulationTrace trace;
  if (const auto* nl = std::get_if<NonlinearPlant>(&sc.plant)) {
    trace = with_policy([nl](double, std::span<const double> x, std::span<const double> xh, std::span<double> dx) {
      nl->closed_loop(x, xh, dx);
    });
  } else {
    const LinearPlant& lp = std::get<LinearPlant>(sc.plant);
    const bool disturbed = cfg.disturbance && cfg.disturbance->kind != Disturbance::Kind::none;
    if (disturbed) {
      const Disturbance& dist = *cfg.disturbance;
      const double limit = dist.bound * (1.0 + 1e-12);
      trace = with_policy([&lp, &dist, limit](double t, std::span<const double> x, std::span<const double> xh,
                                              std::span<double> dx) {
        const double d = dist.value(t);
        if (!(std::abs(d) <= limit)) {
          throw Error(Errc::invariant_violation, "disturbance exceeds its bound at t=" + std::to_string(t));
        }
        closed_loop_deriv(lp, x, xh, std::span<const double>(&d, 1), dx);
      });
    } else {
      trace = with_policy([&lp](double, std::span<const double> x, std::span<const double> xh, std::span<double> dx) {
        closed_loop_deriv(lp, x, xh, {}, dx);
      });
    }
  }
  trace.trigger_kind = sc.trigger_kind();
  trace.warnings = sc.warnings;
  return trace;
}

inline SimulationTrace simulate(const ScenarioConfig& cfg) { return simulate(resolve(cfg)); }

// ---------------------------------------------------------------------------
// Metrics

struct InterEventStats {
  double min_dt = 0.0;
  double max_dt = 0.0;
  double mean_dt = 0.0;
  std::size_t count = 0;
  std::optional<double> period_estimate;
};

namespace detail {

/**
 * Dominant period of a sampled signal s(t) by autocorrelation.
 *
 * The signal is resampled linearly on a uniform grid, mean-removed, and the
 * unbiased normalized autocorrelation computed up to half its length. The
 * period is the lag of the first peak after the first negative lobe that
 * reaches 80% of the highest one there, refined by a parabola through its
 * neighbours; none is reported when the highest peak is below 0.5.
 */
inline std::optional<double> autocorrelation_period(std::span<const double> t, std::span<const double> s,
                                                    double spacing) {
  if (t.size() < 4 || !(spacing > 0.0)) return std::nullopt;
  const double span = t.back() - t.front();
  const auto m = static_cast<std::size_t>(std::floor(span / spacing)) + 1;
  if (m < 8) return std::nullopt;

  std::vector<double> g(m);
  std::size_t j = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ti = t.front() + static_cast<double>(i) * spacing;
    while (j + 2 < t.size() && t[j + 1] < ti) ++j;
    const double w = (ti - t[j]) / (t[j + 1] - t[j]);
    g[i] = s[j] + std::clamp(w, 0.0, 1.0) * (s[j + 1] - s[j]);
  }
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= static_cast<double>(m);
  for (double& v : g) v -= mean;

  const std::size_t max_lag = m / 2;
  std::vector<double> ac(max_lag);
  for (std::size_t lag = 0; lag < max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < m; ++i) acc += g[i] * g[i + lag];
    ac[lag] = acc / static_cast<double>(m - lag);
  }
  const double var = ac.front();
  if (!(var > 0.0)) return std::nullopt;
  for (double& v : ac) v /= var;

  std::size_t first_neg = 1;
  while (first_neg < max_lag && ac[first_neg] >= 0.0) ++first_neg;
  if (first_neg >= max_lag) return std::nullopt;
  double top = ac[first_neg];
  for (std::size_t lag = first_neg; lag < max_lag; ++lag) top = std::max(top, ac[lag]);
  if (top < 0.5) return std::nullopt;
  // Multiples of the period peak about as high as the period itself, so
  // take the first local peak close to the top rather than the top.
  const double accept = std::max(0.5, 0.8 * top);
  std::size_t peak = first_neg;
  while (peak + 1 < max_lag && !(ac[peak] >= accept && ac[peak] >= ac[peak + 1])) ++peak;

  double offset = 0.0;
  if (peak > 0 && peak + 1 < max_lag) {
    const double a = ac[peak - 1], b = ac[peak], c = ac[peak + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  return (static_cast<double>(peak) + offset) * spacing;
}

}  // namespace detail

/// Inter-event statistics over events later than @p warmup.
///
/// The period estimate treats inter_event_dt as a signal of event time.
inline InterEventStats inter_event_stats(const std::vector<TriggerEvent>& events, double warmup = kDefaultWarmup) {
  std::vector<double> t;
  std::vector<double> d;
  for (const auto& ev : events) {
    if (ev.inter_event_dt && ev.time > warmup) {
      t.push_back(ev.time);
      d.push_back(*ev.inter_event_dt);
    }
  }
  if (d.size() < 3) {
    throw Error(Errc::insufficient_data, std::to_string(d.size()) + " inter-event intervals after t=" +
                                             std::to_string(warmup) + ", need at least 3");
  }
  InterEventStats st;
  st.count = d.size();
  st.min_dt = *std::min_element(d.begin(), d.end());
  st.max_dt = *std::max_element(d.begin(), d.end());
  double sum = 0.0;
  for (double v : d) sum += v;
  st.mean_dt = std::clamp(sum / static_cast<double>(d.size()), st.min_dt, st.max_dt);
  st.period_estimate = detail::autocorrelation_period(t, d, st.mean_dt / 8.0);
  return st;
}

inline InterEventStats inter_event_stats(const SimulationTrace& trace, double warmup = kDefaultWarmup) {
  return inter_event_stats(trace.events, warmup);
}

/// Smallest interval over the whole run (no warmup).
inline double min_inter_event(const SimulationTrace& trace) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ev : trace.events)
    if (ev.inter_event_dt) m = std::min(m, *ev.inter_event_dt);
  return m;
}

/// (t, omega) along the logged rows of a countdown-trigger trace.
inline std::vector<std::pair<double, double>> omega_trace(const SimulationTrace& trace) {
  if (trace.trigger_kind != TriggerKind::miet) {
    throw Error(Errc::unsupported, "omega is only defined for the countdown trigger");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(trace.rows());
  for (std::size_t i = 0; i < trace.rows(); ++i) out.emplace_back(trace.times[i], trace.omega[i]);
  return out;
}

}  // namespace miet
