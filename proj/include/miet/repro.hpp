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
 * @file repro.hpp
 * @brief Canned scenarios, pass/fail reports and parameter sweeps.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "miet/bounds.hpp"
#include "miet/csv.hpp"
#include "miet/error.hpp"
#include "miet/sim.hpp"

namespace miet {

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace builtin {

/// Short number for scenario ids and row names ("0.1", not 17 digits).
inline std::string id_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline Matrix vdp_M() { return Matrix{{1.0, 0.25}, {0.25, 1.0}}; }

/// Storage function for the van der Pol loop. The loop under continuous
/// feedback is x' = [[0,1],[-1,-1]] x, and this is 2P for the P with
/// A^T P + P A = -I. The plain |x|^2/2 only has V' = -x_2^2 there.
inline Matrix vdp_V() { return Matrix{{3.0, 1.0}, {1.0, 2.0}}; }

inline ScenarioConfig vdp(double Z_bar = 1.0, double epsilon = 1.0) {
  ScenarioConfig cfg;
  cfg.id = Z_bar == 1.0 ? "vdp" : "vdp_zbar" + id_number(Z_bar);
  cfg.plant = VdpPlantConfig{1.0};
  MietTriggerConfig t;
  t.Z_bar = Z_bar;
  t.epsilon = epsilon;
  t.M = vdp_M();
  t.V = vdp_V();
  cfg.trigger = t;
  cfg.x0 = {1.0, -0.5};
  return cfg;
}

inline LinearPlantConfig linear_plant(bool with_disturbance = false) {
  LinearPlantConfig p;
  p.A = Matrix{{0.0, 1.0}, {-2.0, 3.0}};
  p.B = Matrix{{0.0}, {1.0}};
  p.K = Matrix{{1.0, -4.0}};
  p.Q = Matrix{{0.5, 0.25}, {0.25, 1.5}};
  p.P = Matrix{{1.0, 0.25}, {0.25, 1.0}};
  if (with_disturbance) p.H = Matrix{{0.0}, {1.0}};
  return p;
}

inline ScenarioConfig linear(Vector x0 = {10.0, 0.0}, double Z_bar = 1.0, double epsilon = 1.0) {
  ScenarioConfig cfg;
  cfg.id = "linear";
  cfg.plant = linear_plant();
  MietTriggerConfig t;
  t.Z_bar = Z_bar;
  t.epsilon = epsilon;
  t.b_override = 55.0;
  cfg.trigger = t;
  cfg.x0 = std::move(x0);
  return cfg;
}

inline ScenarioConfig linear_sinusoid(double d_bar) {
  ScenarioConfig cfg = linear();
  cfg.id = "linear_sin" + id_number(d_bar);
  cfg.plant = linear_plant(true);
  Disturbance d;
  d.kind = Disturbance::Kind::sinusoid;
  d.bound = d_bar;
  d.angular_frequency = 2.0;
  cfg.disturbance = d;
  return cfg;
}

inline ScenarioConfig linear_decaying() {
  ScenarioConfig cfg = linear();
  cfg.id = "linear_disturbed";
  cfg.plant = linear_plant(true);
  cfg.horizon = 40.0;
  Disturbance d;
  d.kind = Disturbance::Kind::decaying_exponential;
  d.bound = 1.0;
  d.decay_rate = 0.5;
  cfg.disturbance = d;
  return cfg;
}

// ISS pair for the linear loop, V' <= -lambda_Q/2 |x|^2 + 2 |PBK|^2 / lambda_Q |e|^2.
inline ComparisonFn linear_alpha() { return {ComparisonFn::Kind::quadratic, 0.22}; }
inline ComparisonFn linear_gamma() { return {ComparisonFn::Kind::quadratic, 82.0}; }

inline ScenarioConfig linear_static() {
  ScenarioConfig cfg = linear();
  cfg.id = "linear_static";
  StaticTriggerParams t;
  t.alpha = linear_alpha();
  t.gamma = linear_gamma();
  cfg.trigger = t;
  return cfg;
}

inline ScenarioConfig linear_dynamic() {
  ScenarioConfig cfg = linear();
  cfg.id = "linear_dynamic";
  DynamicTriggerParams t;
  t.alpha = linear_alpha();
  t.gamma = linear_gamma();
  cfg.trigger = t;
  return cfg;
}

/// Oscillation period of the closed loop [[0,1],[-1,-1]]: pi / 0.866.
inline double linear_period() { return std::numbers::pi / (std::sqrt(3.0) / 2.0); }

}  // namespace builtin

// ---------------------------------------------------------------------------
// Run summary

struct RunSummary {
  std::string scenario_id;
  std::optional<double> tau;  // analytic bound, countdown trigger only
  std::size_t event_count = 0;
  double min_dt = std::numeric_limits<double>::quiet_NaN();   // whole run
  double max_dt = std::numeric_limits<double>::quiet_NaN();   // whole run
  double mean_dt = std::numeric_limits<double>::quiet_NaN();  // whole run
  std::optional<InterEventStats> steady;                      // after warmup
  double final_norm = 0.0;
};

inline RunSummary summarize(const Scenario& sc, const SimulationTrace& tr, double warmup = kDefaultWarmup) {
  RunSummary s;
  s.scenario_id = sc.config.id;
  if (sc.miet) s.tau = sc.miet->bound.tau;
  s.event_count = tr.events.size();
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ev : tr.events) {
    if (!ev.inter_event_dt) continue;
    const double d = *ev.inter_event_dt;
    s.min_dt = n == 0 ? d : std::min(s.min_dt, d);
    s.max_dt = n == 0 ? d : std::max(s.max_dt, d);
    sum += d;
    ++n;
  }
  if (n > 0) s.mean_dt = sum / static_cast<double>(n);
  try {
    s.steady = inter_event_stats(tr, warmup);
  } catch (const Error& e) {
    if (e.code() != Errc::insufficient_data) throw;
  }
  s.final_norm = norm(tr.final_state);
  return s;
}

inline void print_summary(std::ostream& os, const RunSummary& s) {
  auto num = [](double v) { return std::isnan(v) ? std::string("n/a") : format_g17(v); };
  os << "scenario           " << s.scenario_id << '\n';
  os << "events             " << s.event_count << '\n';
  if (s.tau) os << "analytic bound     " << format_g17(*s.tau) << " s\n";
  os << "min inter-event    " << num(s.min_dt) << " s\n";
  os << "max inter-event    " << num(s.max_dt) << " s\n";
  os << "mean inter-event   " << num(s.mean_dt) << " s\n";
  if (s.steady) {
    os << "steady min/max     " << format_g17(s.steady->min_dt) << " / " << format_g17(s.steady->max_dt) << " s\n";
    os << "steady mean        " << format_g17(s.steady->mean_dt) << " s\n";
    os << "period estimate    " << (s.steady->period_estimate ? format_g17(*s.steady->period_estimate) : "n/a")
       << (s.steady->period_estimate ? " s\n" : "\n");
  }
  os << "|x(T)|             " << format_g17(s.final_norm) << '\n';
}

// ---------------------------------------------------------------------------
// Reports

enum class Comparison {
  within_abs,  // |observed - expected| <= tolerance
  within_rel,  // |observed - expected| <= tolerance * |expected|
  at_least,    // observed >= expected - tolerance
  at_most,     // observed <= expected + tolerance
};

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::within_abs: return "abs";
    case Comparison::within_rel: return "rel";
    case Comparison::at_least: return ">=";
    case Comparison::at_most: return "<=";
  }
  return "abs";
}

struct MetricRow {
  std::string name;
  double expected = 0.0;
  double observed = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  Comparison comparison = Comparison::within_abs;
  bool pass = false;
  std::string note;  // error text when the row could not be evaluated
};

inline bool evaluate(Comparison c, double expected, double observed, double tolerance) {
  if (!std::isfinite(observed)) return false;
  switch (c) {
    case Comparison::within_abs: return std::abs(observed - expected) <= tolerance;
    case Comparison::within_rel: return std::abs(observed - expected) <= tolerance * std::abs(expected);
    case Comparison::at_least: return observed >= expected - tolerance;
    case Comparison::at_most: return observed <= expected + tolerance;
  }
  return false;
}

struct ReproReport {
  std::string scenario_id;
  std::vector<MetricRow> metrics;

  bool overall() const {
    return !metrics.empty() && std::all_of(metrics.begin(), metrics.end(), [](const MetricRow& r) { return r.pass; });
  }

  void add(std::string name, double expected, double observed, double tolerance, Comparison c) {
    metrics.push_back({std::move(name), expected, observed, tolerance, c, evaluate(c, expected, observed, tolerance), {}});
  }

  void add_failed(std::string name, double expected, double tolerance, Comparison c, std::string why) {
    metrics.push_back(
        {std::move(name), expected, std::numeric_limits<double>::quiet_NaN(), tolerance, c, false, std::move(why)});
  }

  friend bool operator==(const ReproReport& a, const ReproReport& b) { return a.to_json() == b.to_json(); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : metrics) {
      nlohmann::ordered_json j;
      j["name"] = r.name;
      j["expected"] = r.expected;
      j["observed"] = std::isfinite(r.observed) ? nlohmann::ordered_json(r.observed) : nlohmann::ordered_json();
      j["tolerance"] = r.tolerance;
      j["comparison"] = to_string(r.comparison);
      j["pass"] = r.pass;
      if (!r.note.empty()) j["note"] = r.note;
      rows.push_back(std::move(j));
    }
    nlohmann::ordered_json out;
    out["scenario_id"] = scenario_id;
    out["metrics"] = std::move(rows);
    out["overall"] = overall() ? "pass" : "fail";
    return out;
  }
};

inline void print_report(std::ostream& os, const ReproReport& rep) {
  os << "report " << rep.scenario_id << '\n';
  for (const auto& r : rep.metrics) {
    os << (r.pass ? "  PASS " : "  FAIL ") << r.name << ": observed "
       << (std::isfinite(r.observed) ? format_g17(r.observed) : "n/a") << ", expected " << to_string(r.comparison)
       << ' ' << format_g17(r.expected) << " (tol " << format_g17(r.tolerance) << ')';
    if (!r.note.empty()) os << " [" << r.note << ']';
    os << '\n';
  }
  os << "overall " << (rep.overall() ? "PASS" : "FAIL") << '\n';
}

namespace detail {

/// Runs @p fn and records its rows, or marks them failed if it throws.
template <class Fn>
void guarded(ReproReport& rep, std::initializer_list<const char*> names, Fn&& fn) {
  const std::size_t before = rep.metrics.size();
  try {
    fn();
  } catch (const std::exception& e) {
    rep.metrics.resize(before);
    for (const char* n : names) rep.add_failed(n, 0.0, 0.0, Comparison::within_abs, e.what());
  }
}

inline RunSummary run_summary(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  return summarize(sc, simulate(sc));
}

}  // namespace detail

inline ReproReport reproduce_vdp() {
  ReproReport rep{"vdp", {}};
  const double b = b_nonlinear(1.0, builtin::vdp_M());
  rep.add("b_nonlinear", 2.083, b, 0.001, Comparison::within_abs);
  rep.add("tau_formula", 0.189, miet_lower_bound(2.083, 1.0, 1.0), 0.001, Comparison::within_abs);
  detail::guarded(rep, {"min_inter_event", "steady_interval_zbar1"}, [&] {
    const RunSummary s = detail::run_summary(builtin::vdp(1.0));
    rep.add("min_inter_event", 0.189, s.min_dt, 0.0, Comparison::at_least);
    rep.add("steady_interval_zbar1", 0.9, s.steady ? s.steady->mean_dt : std::nan(""), 0.25, Comparison::within_rel);
  });
  detail::guarded(rep, {"steady_interval_zbar3"}, [&] {
    const RunSummary s = detail::run_summary(builtin::vdp(3.0));
    rep.add("steady_interval_zbar3", 3.722, s.steady ? s.steady->mean_dt : std::nan(""), 0.25,
            Comparison::within_rel);
  });
  return rep;
}

inline ReproReport reproduce_linear() {
  ReproReport rep{"linear", {}};
  const auto p = builtin::linear_plant();
  rep.add("b_linear", 54.61, b_linear(*p.P, p.B, p.K, p.Q), 0.05, Comparison::within_abs);
  rep.add("tau_formula", 0.009, miet_lower_bound(55.0, 1.0, 1.0), 0.0005, Comparison::within_abs);
  detail::guarded(rep, {"min_inter_event_floor", "min_inter_event_ceiling", "min_inter_event", "max_inter_event",
                        "final_norm"},
                  [&] {
                    const RunSummary s = detail::run_summary(builtin::linear());
                    rep.add("min_inter_event_floor", 0.009, s.min_dt, 0.0, Comparison::at_least);
                    rep.add("min_inter_event_ceiling", 0.050, s.min_dt, 0.0, Comparison::at_most);
                    rep.add("min_inter_event", 0.036, s.min_dt, 0.25, Comparison::within_rel);
                    rep.add("max_inter_event", 0.086, s.max_dt, 0.25, Comparison::within_rel);
                    rep.add("final_norm", 0.1, s.final_norm, 0.0, Comparison::at_most);
                  });
  return rep;
}

inline ReproReport reproduce_robustness() {
  ReproReport rep{"robustness", {}};
  std::vector<ScenarioConfig> cfgs;
  for (double d : {0.1, 1.0, 10.0}) cfgs.push_back(builtin::linear_sinusoid(d));
  cfgs.push_back(builtin::linear_decaying());

  std::vector<std::future<RunSummary>> jobs;
  for (const auto& c : cfgs) jobs.push_back(std::async(std::launch::async, [c] { return detail::run_summary(c); }));
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const bool decaying = i + 1 == cfgs.size();
    const std::string name = decaying ? "decaying_final_norm" : "min_inter_event_" + cfgs[i].id;
    const double x0n = norm(cfgs[i].x0);
    try {
      const RunSummary s = jobs[i].get();
      if (decaying) {
        rep.add(name, 0.1 * x0n, s.final_norm, 0.0, Comparison::at_most);
      } else {
        rep.add(name, 0.009, s.min_dt, 0.0, Comparison::at_least);
      }
    } catch (const std::exception& e) {
      rep.add_failed(name, decaying ? 0.1 * x0n : 0.009, 0.0, decaying ? Comparison::at_most : Comparison::at_least,
                     e.what());
    }
  }
  return rep;
}

inline const std::vector<Vector>& period_initial_states() {
  static const std::vector<Vector> states{{10.0, 0.0}, {-10.0, 0.0}, {0.0, 10.0}, {0.0, -10.0}, {5.0, 5.0}};
  return states;
}

inline ReproReport reproduce_period() {
  ReproReport rep{"period", {}};
  const double target = builtin::linear_period();
  const auto& states = period_initial_states();

  std::vector<std::future<RunSummary>> jobs;
  for (const auto& x0 : states) {
    jobs.push_back(std::async(std::launch::async, [x0] { return detail::run_summary(builtin::linear(x0)); }));
  }
  std::vector<double> periods;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string name = "period_x0_" + builtin::id_number(states[i][0]) + "_" + builtin::id_number(states[i][1]);
    try {
      const RunSummary s = jobs[i].get();
      const double p = s.steady && s.steady->period_estimate ? *s.steady->period_estimate : std::nan("");
      rep.add(name, target, p, 0.05, Comparison::within_rel);
      if (std::isfinite(p)) periods.push_back(p);
    } catch (const std::exception& e) {
      rep.add_failed(name, target, 0.05, Comparison::within_rel, e.what());
    }
  }
  if (periods.size() == states.size()) {
    const auto [lo, hi] = std::minmax_element(periods.begin(), periods.end());
    rep.add("period_spread", 0.0, (*hi - *lo) / *lo, 0.05, Comparison::at_most);
  } else {
    rep.add_failed("period_spread", 0.0, 0.05, Comparison::at_most, "missing period estimates");
  }
  return rep;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"vdp", "linear", "robustness", "period"};
  return names;
}

inline ReproReport reproduce(const std::string& suite) {
  if (suite == "vdp") return reproduce_vdp();
  if (suite == "linear") return reproduce_linear();
  if (suite == "robustness") return reproduce_robustness();
  if (suite == "period") return reproduce_period();
  throw Error(Errc::invalid_input, "unknown suite '" + suite + "' (expected vdp, linear, robustness or period)");
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double Z_bar = 0.0;
  double epsilon = 0.0;
  RunSummary summary;
};

/// Runs @p base for every (Z_bar, epsilon) pair, concurrently.
///
/// Rows come back sorted by (Z_bar, epsilon). Throws internal_consistency if
/// the analytic bound fails to increase with Z_bar or decrease with epsilon.
inline std::vector<SweepRow> sweep(const ScenarioConfig& base, std::vector<double> z_bars, std::vector<double> epsilons) {
  if (!std::holds_alternative<MietTriggerConfig>(base.trigger)) {
    throw Error(Errc::unsupported, "sweep needs a countdown (miet) trigger");
  }
  if (z_bars.empty() || epsilons.empty()) throw Error(Errc::invalid_input, "sweep lists must be non-empty");
  for (double v : z_bars)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_input, "Z_bar values must be positive");
  for (double v : epsilons)
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_input, "epsilon values must be positive");
  std::sort(z_bars.begin(), z_bars.end());
  z_bars.erase(std::unique(z_bars.begin(), z_bars.end()), z_bars.end());
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());

  std::vector<SweepRow> rows;
  std::vector<std::future<RunSummary>> jobs;
  for (double z : z_bars) {
    for (double e : epsilons) {
      ScenarioConfig cfg = base;
      auto& t = std::get<MietTriggerConfig>(cfg.trigger);
      t.Z_bar = z;
      t.epsilon = e;
      rows.push_back({z, e, {}});
      jobs.push_back(std::async(std::launch::async, [cfg = std::move(cfg)] { return detail::run_summary(cfg); }));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].summary = jobs[i].get();

  const std::size_t ne = epsilons.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double tau = *rows[i].summary.tau;
    if (i % ne + 1 < ne && !(*rows[i + 1].summary.tau < tau)) {
      throw Error(Errc::internal_consistency, "analytic bound does not decrease with epsilon");
    }
    if (i + ne < rows.size() && !(*rows[i + ne].summary.tau > tau)) {
      throw Error(Errc::internal_consistency, "analytic bound does not increase with Z_bar");
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : format_g17(v); };
  os << "Z_bar,epsilon,tau,min_inter_event,max_inter_event,mean_inter_event,steady_mean_inter_event,event_count\n";
  for (const auto& r : rows) {
    const RunSummary& s = r.summary;
    os << format_g17(r.Z_bar) << ',' << format_g17(r.epsilon) << ',' << format_g17(s.tau.value_or(std::nan(""))) << ','
       << num(s.min_dt) << ',' << num(s.max_dt) << ',' << num(s.mean_dt) << ','
       << (s.steady ? format_g17(s.steady->mean_dt) : std::string()) << ',' << s.event_count << '\n';
  }
}

}  // namespace miet
