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

#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

namespace miet {

/// rhs(t, y, dydt)
template <class F>
concept OdeRhs = std::invocable<const F&, double, std::span<const double>, std::span<double>>;

/// Classical fourth-order Runge-Kutta with preallocated stage buffers.
class RungeKutta4 {
 public:
  explicit RungeKutta4(std::size_t n) : tmp_(n), k1_(n), k2_(n), k3_(n), k4_(n) {}

  std::size_t size() const noexcept { return tmp_.size(); }

  /// Advances @p y0 from t by h into @p y1 (may alias y0).
  template <OdeRhs F>
  void step(const F& rhs, double t, std::span<const double> y0, double h, std::span<double> y1) {
    const std::size_t n = tmp_.size();
    const double h2 = 0.5 * h;

    rhs(t, y0, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y0[i] + h2 * k1_[i];
    rhs(t + h2, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y0[i] + h2 * k2_[i];
    rhs(t + h2, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y0[i] + h * k3_[i];
    rhs(t + h, tmp_, k4_);

    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h6 * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
  }

 private:
  std::vector<double> tmp_, k1_, k2_, k3_, k4_;
};

}  // namespace miet
