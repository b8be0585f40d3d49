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

#include <stdexcept>
#include <string>
#include <string_view>

namespace miet {

enum class Errc {
  invalid_input,        // non-finite or malformed numeric input
  symmetry_violation,   // matrix expected symmetric is not
  no_solution,          // e.g. Lyapunov equation with non-Hurwitz A
  numerical_failure,    // singular system, eigensolver did not converge
  domain_error,         // argument outside the mathematical domain
  configuration,        // inconsistent dimensions or scenario values
  division_guard,       // ratio evaluated with a zero denominator
  internal_consistency, // a state the algorithm rules out was reached
  invariant_violation,  // a guaranteed invariant failed on a trace
  divergence,           // simulated state blew up
  insufficient_data,    // not enough samples for a statistic
  unsupported,          // operation not defined for this configuration
  parse,                // scenario file could not be parsed
  io,                   // file could not be read or written
};

constexpr std::string_view to_string(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_input: return "invalid input";
    case Errc::symmetry_violation: return "symmetry violation";
    case Errc::no_solution: return "no solution";
    case Errc::numerical_failure: return "numerical failure";
    case Errc::domain_error: return "domain error";
    case Errc::configuration: return "configuration error";
    case Errc::division_guard: return "division guard";
    case Errc::internal_consistency: return "internal consistency error";
    case Errc::invariant_violation: return "invariant violation";
    case Errc::divergence: return "divergence";
    case Errc::insufficient_data: return "insufficient data";
    case Errc::unsupported: return "unsupported operation";
    case Errc::parse: return "parse error";
    case Errc::io: return "i/o error";
  }
  return "unknown error";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map them onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace miet
