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

#include <cmath>
#include <random>

#include <catch_amalgamated.hpp>

#include "miet/repro.hpp"
#include "miet/sim.hpp"

using Catch::Approx;
using miet::Errc;
using miet::Error;
using miet::Matrix;
using miet::ScenarioConfig;
using miet::SimulationTrace;
using miet::Vector;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return Errc::io;
}

miet::MietTriggerConfig& miet_trigger(ScenarioConfig& c) { return std::get<miet::MietTriggerConfig>(c.trigger); }

// Closed-form solution of phi' = -b (1 + phi)^2 - eps, phi(0) = Z_bar.
double phi_exact(double s, double b, double eps, double zb) {
  const double r = std::sqrt(eps / b);
  return r * std::tan(std::atan((1.0 + zb) / r) - std::sqrt(b * eps) * s) - 1.0;
}

void check_miet_trace(const miet::Scenario& sc, const SimulationTrace& tr) {
  const auto& p = std::get<miet::MietTriggerParams>(sc.trigger);
  const double zb = p.Z_bar, eps = p.epsilon;
  const double b = sc.miet->coefficients.implied_b();
  const double tau = miet::miet_lower_bound(b, eps, zb);

  std::size_t ev = 0;
  double last_event = 0.0;
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    const double t = tr.times[i];
    while (ev < tr.events.size() && tr.events[ev].time <= t) last_event = tr.events[ev++].time;
    const double Z = tr.trigger_var[i];
    const double w = tr.omega[i];
    INFO("row " << i << " t=" << t);
    CHECK(Z >= -1e-9);
    CHECK(Z <= zb + 1e-12);
    CHECK(w <= -eps * (1.0 - 1e-9));
    CHECK(w >= (-b * (1.0 + Z) * (1.0 + Z) - eps) * (1.0 + 1e-9));
    if (t - last_event <= tau) CHECK(Z >= phi_exact(t - last_event, b, eps, zb) - 1e-6);
    if (tr.is_event_row[i]) {
      CHECK(Z == zb);
      CHECK(miet::norm(tr.errors[i]) == 0.0);
      CHECK(w == -eps);
    }
    if (i > 0) CHECK(tr.lyapunov_W[i] - tr.lyapunov_W[i - 1] <= 1e-8 * std::max(1.0, tr.lyapunov_W[i - 1]));
  }
  CHECK(miet::min_inter_event(tr) >= tau - 10.0 * 1e-9 * sc.config.dt);
}

}  // namespace

TEST_CASE("Lyapunov monitor values", "[sim]") {
  const miet::LyapunovMonitor m{Matrix{{1.0, 0.25}, {0.25, 1.0}}, Matrix{{1.0, 0.25}, {0.25, 1.0}}};
  CHECK(miet::lyapunov_W(Vector{0.0, 0.0}, Vector{0.0, 0.0}, 0.3, m).W == 0.0);
  CHECK(miet::lyapunov_W(Vector{10.0, 0.0}, Vector{0.0, 0.0}, 0.7, m).W == 50.0);
  const auto v = miet::lyapunov_W(Vector{0.0, 0.0}, Vector{2.0, 0.0}, 0.5, m);
  CHECK(v.cross_term == 1.0);
  CHECK(v.W == 1.0);
}

TEST_CASE("van der Pol scenario", "[sim][scenario]") {
  const auto sc = miet::resolve(miet::builtin::vdp());
  CHECK(sc.miet->b_formula == Approx(2.0833333333).epsilon(1e-9));
  CHECK(sc.miet->bound.tau == Approx(0.18874).margin(1e-4));
  auto cfg = sc.config;
  cfg.trace_stride = 1;
  const auto fine = miet::resolve(cfg);
  const auto tr = miet::simulate(fine);
  CHECK(miet::min_inter_event(tr) >= 0.189);
  CHECK(miet::norm(tr.final_state) < 1e-2 * miet::norm(cfg.x0));
  check_miet_trace(fine, tr);
}

TEST_CASE("van der Pol with Z_bar = 3", "[sim][scenario]") {
  auto cfg = miet::builtin::vdp(3.0);
  cfg.trace_stride = 1;
  const auto sc = miet::resolve(cfg);
  const auto tr = miet::simulate(sc);
  // Every interval is capped by Z_bar / epsilon since omega <= -epsilon.
  for (const auto& ev : tr.events)
    if (ev.inter_event_dt) CHECK(*ev.inter_event_dt <= 3.0 + 1e-9);
  check_miet_trace(sc, tr);
}

TEST_CASE("linear scenario", "[sim][scenario]") {
  auto cfg = miet::builtin::linear();
  cfg.trace_stride = 1;
  const auto sc = miet::resolve(cfg);
  CHECK(sc.miet->b == 55.0);
  CHECK(sc.miet->b_formula == Approx(54.61).margin(0.05));
  const auto tr = miet::simulate(sc);
  const auto st = miet::inter_event_stats(tr, 0.0);
  CHECK(st.min_dt >= 0.009);
  CHECK(st.min_dt == Approx(0.036).epsilon(0.25));
  CHECK(st.max_dt == Approx(0.086).epsilon(0.25));
  CHECK(miet::norm(tr.final_state) <= 0.1);
  check_miet_trace(sc, tr);
}

TEST_CASE("both reference loops converge over 40 s", "[sim][scenario]") {
  for (auto cfg : {miet::builtin::vdp(), miet::builtin::linear()}) {
    cfg.horizon = 40.0;
    const auto tr = miet::simulate(cfg);
    CHECK(miet::norm(tr.final_state) <= 1e-2 * miet::norm(cfg.x0));
  }
}

TEST_CASE("determinism", "[sim][property]") {
  const auto cfg = miet::builtin::linear();
  CHECK(miet::simulate(cfg) == miet::simulate(cfg));
  const auto vcfg = miet::builtin::vdp();
  CHECK(miet::simulate(vcfg) == miet::simulate(vcfg));
}

TEST_CASE("halving dt moves event times by at most 1e-6 s", "[sim][property]") {
  for (auto cfg : {miet::builtin::vdp(), miet::builtin::linear()}) {
    const auto coarse = miet::simulate(cfg);
    cfg.dt /= 2.0;
    const auto fine = miet::simulate(cfg);
    REQUIRE(coarse.events.size() == fine.events.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.events.size(); ++i)
      worst = std::max(worst, std::abs(coarse.events[i].time - fine.events[i].time));
    INFO(cfg.id << " worst shift " << worst);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("randomized designs stay Zeno-free", "[sim][property]") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 6; ++k) {
    const double zb = u(rng), eps = u(rng);
    auto cfg = k % 2 ? miet::builtin::linear({10.0, 0.0}, zb, eps) : miet::builtin::vdp(zb, eps);
    cfg.horizon = 5.0;
    cfg.dt_policy = miet::DtPolicy::warn;
    cfg.trace_stride = 5;
    const auto sc = miet::resolve(cfg);
    check_miet_trace(sc, miet::simulate(sc));
  }
}

TEST_CASE("disturbed linear loop", "[sim][scenario]") {
  for (double d : {0.1, 1.0, 10.0}) {
    const auto tr = miet::simulate(miet::builtin::linear_sinusoid(d));
    CHECK(miet::min_inter_event(tr) >= 0.009);
  }
  const auto cfg = miet::builtin::linear_decaying();
  const auto tr = miet::simulate(cfg);
  CHECK(miet::norm(tr.final_state) <= 1e-2 * miet::norm(cfg.x0));
}

TEST_CASE("baseline triggers", "[sim][scenario]") {
  for (const auto& cfg : {miet::builtin::linear_static(), miet::builtin::linear_dynamic()}) {
    const auto tr = miet::simulate(cfg);
    CHECK(tr.events.size() > 10);
    CHECK(miet::norm(tr.final_state) < 1e-2 * miet::norm(cfg.x0));
    for (std::size_t i = 0; i < tr.rows(); ++i) {
      CHECK(std::isnan(tr.omega[i]));
      if (tr.is_event_row[i]) CHECK(miet::norm(tr.errors[i]) == 0.0);
    }
    CHECK(code_of([&] { miet::omega_trace(tr); }) == Errc::unsupported);
  }
  // eta never goes negative along a dynamic run
  const auto dyn = miet::simulate(miet::builtin::linear_dynamic());
  for (double eta : dyn.trigger_var) CHECK(eta >= -1e-9);
}

TEST_CASE("baseline with comparison functions unsuited to the plant diverges", "[sim][errors]") {
  auto cfg = miet::builtin::linear_static();
  cfg.trigger = miet::StaticTriggerParams{};  // alpha = r^2/2, gamma = r: loose for |x0| = 10
  CHECK(code_of([&] { miet::simulate(cfg); }) == Errc::divergence);
}

TEST_CASE("omega_trace", "[sim]") {
  const auto tr = miet::simulate(miet::builtin::vdp());
  const auto w = miet::omega_trace(tr);
  REQUIRE(w.size() == tr.rows());
  for (const auto& [t, v] : w) CHECK(v <= -1.0);
  CHECK(w.front().second == -1.0);  // e = 0 at t = 0
}

TEST_CASE("inter-event statistics", "[sim]") {
  std::vector<miet::TriggerEvent> evs;
  for (int i = 0; i < 20; ++i) {
    miet::TriggerEvent e;
    e.time = 0.5 * i;
    e.index = static_cast<std::size_t>(i);
    if (i > 0) e.inter_event_dt = 0.5;
    evs.push_back(e);
  }
  const auto st = miet::inter_event_stats(evs, 0.0);
  CHECK(st.min_dt == 0.5);
  CHECK(st.max_dt == 0.5);
  CHECK(st.mean_dt == 0.5);
  CHECK(st.count == 19);
  CHECK_FALSE(st.period_estimate.has_value());
  CHECK(code_of([&] { miet::inter_event_stats(evs, 9.0); }) == Errc::insufficient_data);

  // A sampled sinusoid has its own period.
  std::vector<double> t, s;
  for (int i = 0; i < 2000; ++i) {
    t.push_back(0.01 * i);
    s.push_back(std::sin(2.0 * M_PI * t.back() / 2.5));
  }
  const auto p = miet::detail::autocorrelation_period(t, s, 0.01);
  REQUIRE(p.has_value());
  CHECK(*p == Approx(2.5).epsilon(0.01));
}

TEST_CASE("linear period is independent of the initial state", "[sim][scenario]") {
  for (const auto& x0 : miet::period_initial_states()) {
    const auto st = miet::inter_event_stats(miet::simulate(miet::builtin::linear(x0)));
    REQUIRE(st.period_estimate.has_value());
    CHECK(*st.period_estimate == Approx(miet::builtin::linear_period()).epsilon(0.05));
  }
}

TEST_CASE("scenario validation", "[sim][errors]") {
  auto cfg = miet::builtin::linear();
  SECTION("dt policy") {
    cfg.dt = 1e-3;  // tau / 20 is 4.5e-4
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
    cfg.dt_policy = miet::DtPolicy::warn;
    CHECK(miet::resolve(cfg).warnings.size() == 1);
  }
  SECTION("baseline dt policy") {
    auto s = miet::builtin::linear_static();
    s.dt = 2e-4;
    CHECK(code_of([&] { miet::resolve(s); }) == Errc::configuration);
  }
  SECTION("b override below the computed value") {
    miet_trigger(cfg).b_override = 50.0;
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
  }
  SECTION("non-positive design parameters") {
    miet_trigger(cfg).Z_bar = 0.0;
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
  }
  SECTION("state dimension") {
    cfg.x0 = {1.0};
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
  }
  SECTION("horizon shorter than 10 steps") {
    cfg.horizon = 5e-4;
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
  }
  SECTION("nonlinear plant without M") {
    auto v = miet::builtin::vdp();
    miet_trigger(v).M.reset();
    CHECK(code_of([&] { miet::resolve(v); }) == Errc::configuration);
  }
  SECTION("M on a linear plant") {
    miet_trigger(cfg).M = Matrix::identity(2);
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
  }
  SECTION("disturbance without a channel") {
    miet::Disturbance d;
    d.kind = miet::Disturbance::Kind::constant;
    d.bound = 1.0;
    cfg.disturbance = d;
    CHECK(code_of([&] { miet::resolve(cfg); }) == Errc::configuration);
  }
}
