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

#include "miet/trigger.hpp"

using Catch::Approx;
using miet::Errc;
using miet::Error;
using miet::Matrix;
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

const Matrix kM{{1.0, 0.25}, {0.25, 1.0}};
const Matrix kP{{1.0, 0.25}, {0.25, 1.0}};
const Matrix kQ{{0.5, 0.25}, {0.25, 1.5}};
constexpr double kPbk = 4.25;

}  // namespace

TEST_CASE("varpi, nonlinear flavour", "[trigger]") {
  CHECK(miet::varpi_nonlinear(Vector{0.0, 0.0}, Vector{0.3, -0.1}, 0.7, 1.0, kM) == 0.0);
  // |x|/|e| = 1
  CHECK(miet::varpi_nonlinear(Vector{3.0, 4.0}, Vector{0.0, 5.0}, 1.0, 1.0, kM) == Approx(-16.0 / 3.0).epsilon(1e-12));
  // |x|/|e| = 10
  CHECK(miet::varpi_nonlinear(Vector{10.0, 0.0}, Vector{1.0, 0.0}, 0.0, 1.0, kM) == Approx(100.0).epsilon(1e-12));
  CHECK(code_of([] { miet::varpi_nonlinear(Vector{1.0, 0.0}, Vector{0.0, 0.0}, 0.0, 1.0, kM); }) ==
        Errc::division_guard);
}

TEST_CASE("varpi, linear flavour", "[trigger]") {
  const double lq = 1.0 - std::sqrt(0.3125);
  CHECK(miet::varpi_linear(Vector{0.0, 0.0}, Vector{1.0, 0.0}, 3.0, kP, kQ, kPbk) == 0.0);
  CHECK(miet::varpi_linear(Vector{1.0, 0.0}, Vector{0.0, 1.0}, 1.0, kP, kQ, kPbk) ==
        Approx(lq / 0.75 - 2.0 * 2.0 * 4.25 / 0.75).epsilon(1e-12));
  CHECK(miet::varpi_linear(Vector{1.0, 0.0}, Vector{1.0, 0.0}, 1.0, kP, kQ, kPbk) == Approx(-22.079).margin(1e-3));
  CHECK(miet::varpi_linear(Vector{100.0, 0.0}, Vector{1.0, 0.0}, 0.0, kP, kQ, kPbk) == Approx(4746.4).margin(0.1));
  CHECK(code_of([] { miet::varpi_linear(Vector{1.0, 0.0}, Vector{0.0, 0.0}, 0.0, kP, kQ, kPbk); }) ==
        Errc::division_guard);
}

TEST_CASE("varpi minimum over the ratio is -b (1 + Z)^2", "[trigger][property]") {
  const auto c = miet::varpi_coefficients(1.0, kM);
  CHECK(c.implied_b() == Approx(1.25 * 1.25 / 0.75).epsilon(1e-12));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 50.0), z(0.0, 10.0);
  for (int k = 0; k < 2000; ++k) {
    const double r = u(rng), Z = z(rng);
    CHECK(miet::varpi(c, r, 1.0, Z) >= -c.implied_b() * (1.0 + Z) * (1.0 + Z) * (1.0 + 1e-12));
  }
}

TEST_CASE("omega", "[trigger]") {
  CHECK(miet::omega(100.0, 1.0, false) == -1.0);
  CHECK(miet::omega(-16.0 / 3.0, 1.0, false) == Approx(-19.0 / 3.0));
  CHECK(miet::omega(-5.0, 1.0, true) == -1.0);
  CHECK(miet::omega(1e300, 2.5, true) == -2.5);

  const auto c = miet::varpi_coefficients(1.0, kM);
  CHECK(miet::omega(c, 1.0, 5.0, 0.0, 0.5) == -1.0);  // e = 0 branch, no division
  CHECK(miet::error_is_zero(1.0, 1e-13));
  CHECK_FALSE(miet::error_is_zero(1.0, 1e-11));
}

TEST_CASE("omega stays in [-b (1+Z)^2 - eps, -eps]", "[trigger][property]") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0), z(0.0, 10.0), eps(0.1, 10.0);
  const auto c = miet::varpi_coefficients(kP, kQ, kPbk);
  const double b = c.implied_b();
  for (int k = 0; k < 2000; ++k) {
    const Vector x{u(rng), u(rng)};
    const Vector e{1e-3 * u(rng), u(rng)};
    const double Z = z(rng), ep = eps(rng);
    const double w = miet::omega(c, ep, miet::norm(x), miet::norm(e), Z);
    CHECK(w <= -ep);
    CHECK(w >= (-b * (1.0 + Z) * (1.0 + Z) - ep) * (1.0 + 1e-12));
  }
}

TEST_CASE("countdown trigger check", "[trigger]") {
  CHECK_FALSE(miet::miet_trigger_check(0.5, 1.0));
  CHECK(miet::miet_trigger_check(0.0, 1.0));
  CHECK(miet::miet_trigger_check(-1e-12, 1.0));
  CHECK_FALSE(miet::miet_trigger_check(1.0 + 1e-12, 1.0));
  CHECK(code_of([] { miet::miet_trigger_check(1.1, 1.0); }) == Errc::internal_consistency);
}

TEST_CASE("static trigger", "[trigger]") {
  const miet::StaticTriggerParams p;  // alpha = r^2/2, gamma = r, sigma = 0.5
  CHECK_FALSE(miet::static_trigger_check(Vector{1.0, 1.0}, Vector{0.0, 0.0}, p));
  CHECK(miet::static_trigger_check(Vector{0.0, 0.0}, Vector{0.1, 0.0}, p));
  CHECK_FALSE(miet::static_trigger_check(2.0, 0.4, p));
  CHECK(miet::static_trigger_check(2.0, 1.0, p));
}

TEST_CASE("dynamic trigger step", "[trigger]") {
  miet::DynamicTriggerParams p;  // alpha = r^2/2, gamma = r, sigma = 0.5, theta = 1, zeta = eta
  SECTION("e = 0 with eta > 0 does not fire") {
    const auto s = miet::dynamic_trigger_step(Vector{1.0, 0.0}, Vector{0.0, 0.0}, 0.5, 1e-3, p);
    CHECK_FALSE(s.fired);
    CHECK(s.eta > 0.0);
  }
  SECTION("x = 0 with e != 0 fires") {
    const auto s = miet::dynamic_trigger_step(Vector{0.0, 0.0}, Vector{0.5, 0.0}, 0.0, 1e-3, p);
    CHECK(s.fired);
  }
  SECTION("condition value by substitution") {
    CHECK(miet::dynamic_condition(1.0, 1.0, 2.0, p) == Approx(-0.75));
    const auto s = miet::dynamic_trigger_step(Vector{1.0, 0.0}, Vector{2.0, 0.0}, 1.0, 1e-6, p);
    CHECK(s.fired);
  }
  SECTION("eta follows its ODE with frozen x, e") {
    // eta' = -eta + c, c = 0.5*0.5 - 0.1 = 0.15; exact eta(h) = c + (eta0 - c) e^{-h}.
    const double h = 0.01;
    const auto s = miet::dynamic_trigger_step(Vector{1.0, 0.0}, Vector{0.1, 0.0}, 1.0, h, p);
    CHECK(s.eta == Approx(0.15 + 0.85 * std::exp(-h)).epsilon(1e-10));
  }
  SECTION("bad input") {
    CHECK(code_of([&] { miet::dynamic_trigger_step(Vector{1.0}, Vector{0.0}, 0.0, 0.0, p); }) == Errc::domain_error);
    CHECK(code_of([&] { miet::dynamic_trigger_step(Vector{1.0}, Vector{0.0}, -1.0, 1e-3, p); }) ==
          Errc::invariant_violation);
  }
}

TEST_CASE("comparison functions and parameter validation", "[trigger]") {
  const miet::ComparisonFn q{miet::ComparisonFn::Kind::quadratic, 2.0};
  const miet::ComparisonFn l{miet::ComparisonFn::Kind::linear, 3.0};
  CHECK(q(0.0) == 0.0);
  CHECK(q(3.0) == 18.0);
  CHECK(l(3.0) == 9.0);
  CHECK(miet::comparison_kind_from_string("quadratic") == miet::ComparisonFn::Kind::quadratic);
  CHECK(code_of([] { miet::comparison_kind_from_string("cubic"); }) == Errc::configuration);

  miet::StaticTriggerParams s;
  s.sigma = 1.0;
  CHECK(code_of([&] { s.validate(); }) == Errc::configuration);
  miet::DynamicTriggerParams d;
  d.theta = 0.0;
  CHECK(code_of([&] { d.validate(); }) == Errc::configuration);
  miet::MietTriggerParams m{0.0, 1.0, miet::NonlinearFlavor{1.0, kM}};
  CHECK(code_of([&] { m.validate(); }) == Errc::configuration);
}
