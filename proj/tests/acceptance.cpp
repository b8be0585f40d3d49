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

// Acceptance checks, one line per criterion.
//
//   acceptance        run all nine
//   acceptance 4      run criterion 4 only
//
// Exit status is 0 only if every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "miet/miet.hpp"

namespace {

using miet::Matrix;
using miet::Vector;

/// Collects failed sub-checks with a short description each.
struct Outcome {
  std::vector<std::string> failures;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool within(double observed, double target, double tol) { return std::abs(observed - target) <= tol; }

// 1 ----------------------------------------------------------------------------
void bound_nonlinear(Outcome& o) {
  const double b = miet::b_nonlinear(1.0, Matrix{{1.0, 0.25}, {0.25, 1.0}});
  const double tau = miet::miet_lower_bound(2.083, 1.0, 1.0);
  o.detail << "b=" << num(b) << " tau=" << num(tau) << " s";
  o.expect(within(b, 2.083, 0.001), "b_nonlinear not 2.083 +- 0.001");
  o.expect(within(tau, 0.189, 0.001), "tau not 0.189 +- 0.001 s");
}

// 2 ----------------------------------------------------------------------------
void bound_linear(Outcome& o) {
  const auto p = miet::builtin::linear_plant();
  const double b = miet::b_linear(*p.P, p.B, p.K, p.Q);
  const double tau = miet::miet_lower_bound(55.0, 1.0, 1.0);
  o.detail << "b=" << num(b) << " tau(55)=" << num(tau * 1e3) << " ms";
  o.expect(within(b, 54.61, 0.05), "b_linear not 54.61 +- 0.05");
  o.expect(within(tau, 0.009, 0.0005), "tau not 9 +- 0.5 ms");
}

// 3 ----------------------------------------------------------------------------
void oracle_equivalence(Outcome& o) {
  const double bs[] = {0.1, 1.0, 2.083, 10.0, 55.0};
  const double es[] = {0.1, 0.5, 1.0, 2.0, 10.0};
  const double zs[] = {0.1, 0.5, 1.0, 3.0, 10.0};
  double worst = 0.0;
  int points = 0;
  for (double b : bs)
    for (double e : es)
      for (double z : zs) {
        const double closed = miet::miet_lower_bound(b, e, z);
        const double ode = miet::phi_oracle(b, e, z);
        const double rel = std::abs(closed - ode) / closed;
        worst = std::max(worst, rel);
        ++points;
        o.expect(rel <= 1e-6, "b=" + num(b) + " eps=" + num(e) + " Zbar=" + num(z) + " rel err " + num(rel));
      }
  o.detail << points << " points, worst relative gap " << num(worst);
}

// 4 ----------------------------------------------------------------------------
void linear_simulation(Outcome& o) {
  const auto tr = miet::simulate(miet::builtin::linear());
  const double mn = miet::min_inter_event(tr);
  double mx = 0.0;
  for (const auto& ev : tr.events)
    if (ev.inter_event_dt) mx = std::max(mx, *ev.inter_event_dt);
  const double xn = miet::norm(tr.final_state);
  o.detail << "min=" << num(mn * 1e3) << " ms max=" << num(mx * 1e3) << " ms |x(20)|=" << num(xn);
  o.expect(mn >= 0.009 && mn <= 0.050, "min outside [9, 50] ms");
  o.expect(within(mn, 0.036, 0.25 * 0.036), "min not 36 ms +- 25%");
  o.expect(within(mx, 0.086, 0.25 * 0.086), "max not 86 ms +- 25%");
  o.expect(xn <= 0.1, "|x(20)| > 0.1");
}

// 5 ----------------------------------------------------------------------------
void nonlinear_simulation(Outcome& o) {
  const auto run1 = miet::simulate(miet::builtin::vdp(1.0));
  const auto run3 = miet::simulate(miet::builtin::vdp(3.0));
  const double mn = miet::min_inter_event(run1);
  const double steady1 = miet::inter_event_stats(run1).mean_dt;
  const double steady3 = miet::inter_event_stats(run3).mean_dt;
  o.detail << "min=" << num(mn) << " s steady(Zbar=1)=" << num(steady1) << " s steady(Zbar=3)=" << num(steady3)
           << " s";
  o.expect(mn >= 0.189, "an interval is below 0.189 s");
  o.expect(within(steady1, 0.9, 0.25 * 0.9), "steady interval at Zbar=1 not 0.9 s +- 25%");
  o.expect(within(steady3, 3.722, 0.25 * 3.722), "steady interval at Zbar=3 not 3.722 s +- 25%");
}

// 6 ----------------------------------------------------------------------------
void periodicity(Outcome& o) {
  const double target = miet::builtin::linear_period();
  std::vector<double> periods;
  for (const auto& x0 : miet::period_initial_states()) {
    const auto st = miet::inter_event_stats(miet::simulate(miet::builtin::linear(x0)));
    const std::string tag = "x0=(" + num(x0[0]) + "," + num(x0[1]) + ")";
    if (!st.period_estimate) {
      o.expect(false, tag + " no period found");
      continue;
    }
    periods.push_back(*st.period_estimate);
    o.expect(within(*st.period_estimate, target, 0.05 * target), tag + " period " + num(*st.period_estimate));
  }
  if (!periods.empty()) {
    const auto [lo, hi] = std::minmax_element(periods.begin(), periods.end());
    const double spread = (*hi - *lo) / *lo;
    o.detail << "target " << num(target) << " s, estimates " << num(*lo) << ".." << num(*hi) << " s, spread "
             << num(100.0 * spread) << "%";
    o.expect(spread <= 0.05, "spread above 5%");
  }
}

// 7 ----------------------------------------------------------------------------
void robustness(Outcome& o) {
  for (double d : {0.1, 1.0, 10.0}) {
    const double mn = miet::min_inter_event(miet::simulate(miet::builtin::linear_sinusoid(d)));
    o.detail << "dbar=" << num(d) << ": min " << num(mn * 1e3) << " ms; ";
    o.expect(mn >= 0.009, "dbar=" + num(d) + " min below 9 ms");
  }
  const auto cfg = miet::builtin::linear_decaying();
  const double xn = miet::norm(miet::simulate(cfg).final_state);
  o.detail << "decaying: |x(40)|=" << num(xn);
  o.expect(xn <= 0.1 * miet::norm(cfg.x0), "decaying |x(40)| above 0.1 |x0|");
}

// 8 ----------------------------------------------------------------------------
struct TraceCheck {
  std::string id;
  std::vector<std::string> failures;
  double min_dt = 0.0;
  double tau = 0.0;
};

TraceCheck check_trace(const miet::ScenarioConfig& cfg) {
  TraceCheck c;
  c.id = cfg.id;
  const auto sc = miet::resolve(cfg);
  const auto tr = miet::simulate(sc);
  const auto& p = std::get<miet::MietTriggerParams>(sc.trigger);
  const double b = sc.miet->coefficients.implied_b();
  c.tau = sc.miet->bound.tau;
  c.min_dt = miet::min_inter_event(tr);
  const double loc_tol = 1e-9 * cfg.dt;

  auto fail = [&](const std::string& what, std::size_t row) {
    if (c.failures.size() < 5) c.failures.push_back(cfg.id + ": " + what + " at t=" + num(tr.times[row]));
  };
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    const double Z = tr.trigger_var[i];
    const double w = tr.omega[i];
    if (!(w <= -p.epsilon * (1.0 - 1e-9))) fail("omega above -eps", i);
    if (!(w >= (-b * (1.0 + Z) * (1.0 + Z) - p.epsilon) * (1.0 + 1e-9))) fail("omega below -b(1+Z)^2-eps", i);
    if (!(Z >= -1e-9 * p.Z_bar && Z <= p.Z_bar * (1.0 + 1e-12))) fail("Z outside [0, Zbar]", i);
    if (tr.is_event_row[i] && miet::norm(tr.errors[i]) != 0.0) fail("e != 0 after event", i);
    // With a disturbance W is only input-to-state bounded, not monotone.
    if (i > 0 && !cfg.disturbance) {
      const double rise = tr.lyapunov_W[i] - tr.lyapunov_W[i - 1];
      if (rise > 1e-8 * std::max(1.0, tr.lyapunov_W[i - 1])) fail("W increased by " + num(rise), i);
    }
  }
  if (!(c.min_dt >= c.tau - 10.0 * loc_tol)) {
    c.failures.push_back(cfg.id + ": min inter-event " + num(c.min_dt) + " below bound " + num(c.tau));
  }
  return c;
}

void property_suite(Outcome& o) {
  std::vector<miet::ScenarioConfig> cfgs;
  for (auto c : {miet::builtin::vdp(1.0), miet::builtin::vdp(3.0), miet::builtin::linear(),
                 miet::builtin::linear_sinusoid(1.0), miet::builtin::linear_decaying()}) {
    c.trace_stride = 1;
    cfgs.push_back(c);
  }
  const std::size_t reference_runs = cfgs.size();

  std::mt19937_64 rng(20240521);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 100; ++k) {
    for (bool linear : {false, true}) {
      const double zb = u(rng), eps = u(rng);
      auto c = linear ? miet::builtin::linear({10.0, 0.0}, zb, eps) : miet::builtin::vdp(zb, eps);
      c.id = (linear ? "linear_rand" : "vdp_rand") + std::to_string(k);
      c.horizon = 10.0;
      c.trace_stride = 1;
      // keep at least 20 steps inside the shortest possible interval
      const double b = linear ? 55.0 : miet::b_nonlinear(1.0, miet::builtin::vdp_M());
      c.dt = std::min(1e-4, miet::miet_lower_bound(b, eps, zb) / 20.0);
      cfgs.push_back(c);
    }
  }

  std::vector<TraceCheck> results(cfgs.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < cfgs.size(); start += workers) {
    std::vector<std::future<TraceCheck>> jobs;
    for (std::size_t i = start; i < std::min(cfgs.size(), start + workers); ++i) {
      jobs.push_back(std::async(std::launch::async, [&cfg = cfgs[i]] { return check_trace(cfg); }));
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      try {
        results[start + j] = jobs[j].get();
      } catch (const std::exception& e) {
        results[start + j].failures.push_back(cfgs[start + j].id + ": " + e.what());
      }
    }
  }

  double worst_margin = 1e300;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (const auto& f : results[i].failures) o.expect(false, f);
    if (i >= reference_runs && results[i].tau > 0.0) worst_margin = std::min(worst_margin, results[i].min_dt / results[i].tau);
  }
  o.detail << reference_runs << " reference + " << cfgs.size() - reference_runs
           << " randomized traces; smallest min/bound ratio " << num(worst_margin);
}

// 9 ----------------------------------------------------------------------------
void linalg(Outcome& o) {
  const auto p = miet::builtin::linear_plant();
  const Matrix acl = p.A + p.B * p.K;
  const Matrix P = miet::solve_lyapunov(acl, p.Q);
  double worst = miet::lyapunov_residual(acl, P, p.Q).max_abs() / miet::induced_two_norm(p.Q);
  o.expect(worst <= 1e-10, "reference pair residual " + num(worst));
  o.expect(std::abs(P(0, 0) - 1.0) <= 1e-10 && std::abs(P(0, 1) - 0.25) <= 1e-10 && std::abs(P(1, 1) - 1.0) <= 1e-10,
           "reference P not [[1, 0.25], [0.25, 1]]");

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = k % 2 ? 3 : 2;
    Matrix G(n, n), S(n, n), Q(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        G(i, j) = g(rng);
        S(i, j) = g(rng);
      }
    const Matrix A = -1.0 * (G * G.transpose() + 0.1 * Matrix::identity(n)) + (S - S.transpose());
    Q = S * S.transpose() + Matrix::identity(n);
    const Matrix X = miet::solve_lyapunov(A, Q);
    const double r = miet::lyapunov_residual(A, X, Q).max_abs() / miet::induced_two_norm(Q);
    worst = std::max(worst, r);
    o.expect(r <= 1e-10, "random system " + std::to_string(k) + " residual " + num(r));
  }

  // 2x2 closed forms: eigenvalues m -+ sqrt(((a-d)/2)^2 + b^2).
  auto lmin2 = [](const Matrix& m) {
    return 0.5 * (m(0, 0) + m(1, 1)) - std::sqrt(0.25 * std::pow(m(0, 0) - m(1, 1), 2) + m(0, 1) * m(0, 1));
  };
  const Matrix M{{1.0, 0.25}, {0.25, 1.0}};
  const struct {
    const char* name;
    double got, want;
  } rows[] = {
      {"lambda_min(M)", miet::sym_eig_min(M), lmin2(M)},
      {"|M|", miet::induced_two_norm(M), 1.25},
      {"lambda_min(P)", miet::sym_eig_min(*p.P), lmin2(*p.P)},
      {"lambda_min(Q)", miet::sym_eig_min(p.Q), lmin2(p.Q)},
      {"lambda_min(Q) literal", miet::sym_eig_min(p.Q), 1.0 - std::sqrt(0.3125)},
      {"|PBK|", miet::induced_two_norm(*p.P * p.B * p.K), std::sqrt(1.0625 * 17.0)},
  };
  for (const auto& r : rows) o.expect(std::abs(r.got - r.want) <= 1e-10, std::string(r.name) + " = " + num(r.got));
  o.detail << "51 Lyapunov solves, worst residual/|Q| " << num(worst) << "; 6 closed-form constants";
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "bound formula, nonlinear", bound_nonlinear},
      {2, "bound formula, linear", bound_linear},
      {3, "closed form vs ODE oracle", oracle_equivalence},
      {4, "linear simulation", linear_simulation},
      {5, "nonlinear simulation", nonlinear_simulation},
      {6, "periodicity", periodicity},
      {7, "robustness to disturbances", robustness},
      {8, "property suite", property_suite},
      {9, "linear algebra", linalg},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& c : all) selected.push_back(c.id);

  bool all_pass = true;
  for (int id : selected) {
    const auto it = std::find_if(all.begin(), all.end(), [id](const Criterion& c) { return c.id == id; });
    if (it == all.end()) {
      std::printf("C%d FAIL unknown criterion\n", id);
      all_pass = false;
      continue;
    }
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it->run(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.failures.empty();
    all_pass = all_pass && pass;
    std::printf("C%d %s %s (%.2f s): %s\n", it->id, pass ? "PASS" : "FAIL", it->title, secs, o.detail.str().c_str());
    for (const auto& f : o.failures) std::printf("    - %s\n", f.c_str());
  }
  return all_pass ? EXIT_SUCCESS : EXIT_FAILURE;
}
