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
 * @file csv.hpp
 * @brief Trace and event CSV output.
 *
 * trace:  t,x_1..x_n,e_1..e_n,trigger_var,omega,W,cross_term
 * events: index,t,inter_event_dt,x_latched_1..x_latched_n
 *
 * One header line, numbers with 17 significant digits. omega is left empty
 * for non-countdown triggers and inter_event_dt for the first event.
 */

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "miet/error.hpp"
#include "miet/sim.hpp"

namespace miet {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  const std::size_t n = trace.state_dim;
  os << 't';
  for (std::size_t i = 1; i <= n; ++i) os << ",x_" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",e_" << i;
  os << ",trigger_var,omega,W,cross_term\n";
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    os << format_g17(trace.times[r]);
    for (double v : trace.states[r]) os << ',' << format_g17(v);
    for (double v : trace.errors[r]) os << ',' << format_g17(v);
    os << ',' << format_g17(trace.trigger_var[r]) << ',';
    if (!std::isnan(trace.omega[r])) os << format_g17(trace.omega[r]);
    os << ',' << format_g17(trace.lyapunov_W[r]) << ',' << format_g17(trace.cross_term[r]) << '\n';
  }
}

inline void write_events_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "index,t,inter_event_dt";
  for (std::size_t i = 1; i <= trace.state_dim; ++i) os << ",x_latched_" << i;
  os << '\n';
  for (const auto& ev : trace.events) {
    os << ev.index << ',' << format_g17(ev.time) << ',';
    if (ev.inter_event_dt) os << format_g17(*ev.inter_event_dt);
    for (double v : ev.x_latched) os << ',' << format_g17(v);
    os << '\n';
  }
}

inline void write_file(const std::filesystem::path& path, auto&& writer) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  writer(os);
  if (!os) throw Error(Errc::io, "write to " + path.string() + " failed");
}

}  // namespace miet
