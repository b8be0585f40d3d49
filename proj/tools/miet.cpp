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

// miet command-line front end.
//
//   miet run SCENARIO [--out DIR] [--dt DT] [--horizon T]
//   miet bound SCENARIO
//   miet reproduce {vdp|linear|robustness|period|all} [--out DIR]
//   miet sweep SCENARIO --zbar 1,2,3 --eps 1 [--out DIR]
//
// Exit status: 0 ok, 1 bad input, 2 simulation failure, 3 report failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miet/miet.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSimulation = 2;
constexpr int kExitReport = 3;

struct Common {
  std::string positional;
  std::string config;
  std::string out = ".";
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<unsigned long> seed;  // reserved, every scenario is deterministic

  std::string path() const {
    if (!config.empty() && !positional.empty() && config != positional) {
      throw miet::Error(miet::Errc::invalid_input, "give the scenario either positionally or with --config, not both");
    }
    const std::string p = config.empty() ? positional : config;
    if (p.empty()) throw miet::Error(miet::Errc::invalid_input, "no scenario file given");
    return p;
  }

  miet::ScenarioConfig load() const {
    miet::ScenarioConfig cfg = miet::load_scenario(path());
    if (dt) cfg.dt = *dt;
    if (horizon) cfg.horizon = *horizon;
    return cfg;
  }

  std::filesystem::path out_dir() const {
    std::filesystem::create_directories(out);
    return out;
  }
};

void add_scenario_options(CLI::App* app, Common& c, bool overrides) {
  app->add_option("scenario", c.positional, "Scenario file (.toml or .json)");
  app->add_option("--config", c.config, "Scenario file (.toml or .json)");
  if (overrides) {
    app->add_option("--dt", c.dt, "Override the integration step")->check(CLI::PositiveNumber);
    app->add_option("--horizon", c.horizon, "Override the simulated horizon")->check(CLI::PositiveNumber);
  }
  app->add_option("--seed", c.seed, "Reserved; scenarios are deterministic");
}


int run_cmd(const Common& c) {
  const miet::Scenario sc = miet::resolve(c.load());
  for (const auto& w : sc.warnings) std::cerr << "warning: " << w << '\n';
  miet::SimulationTrace tr;
  try {
    tr = miet::simulate(sc);
  } catch (const miet::Error& e) {
    std::cerr << "error: scenario " << sc.config.id << ": " << e.what() << '\n';
    return kExitSimulation;
  }
  const auto dir = c.out_dir();
  const auto trace_path = dir / (sc.config.id + "_trace.csv");
  const auto events_path = dir / (sc.config.id + "_events.csv");
  miet::write_file(trace_path, [&](std::ostream& os) { miet::write_trace_csv(os, tr); });
  miet::write_file(events_path, [&](std::ostream& os) { miet::write_events_csv(os, tr); });
  miet::print_summary(std::cout, miet::summarize(sc, tr));
  std::cout << "wrote " << trace_path.string() << '\n' << "wrote " << events_path.string() << '\n';
  return kExitOk;
}

int bound_cmd(const Common& c) {
  const miet::Scenario sc = miet::resolve(c.load());
  if (!sc.miet) throw miet::Error(miet::Errc::unsupported, "bound needs a countdown (miet) trigger");
  const miet::MietDesign& d = *sc.miet;
  std::cout << "b        " << miet::format_g17(d.b_formula) << '\n';
  if (d.b != d.b_formula) std::cout << "b used   " << miet::format_g17(d.b) << '\n';
  std::cout << "tau      " << miet::format_g17(d.bound.tau) << " s\n";
  std::cout << "tau_max  " << miet::format_g17(d.upper_limit) << " s\n";
  return kExitOk;
}

int reproduce_cmd(const std::string& suite, const std::string& out) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = miet::suite_names();
  } else {
    suites = {suite};
  }
  bool all_pass = true;
  std::filesystem::create_directories(out);
  for (const auto& s : suites) {
    const miet::ReproReport rep = miet::reproduce(s);
    miet::print_report(std::cout, rep);
    const auto path = std::filesystem::path(out) / (s + "_report.json");
    miet::write_file(path, [&](std::ostream& os) { os << rep.to_json().dump(2) << '\n'; });
    std::cout << "wrote " << path.string() << '\n';
    all_pass = all_pass && rep.overall();
  }
  return all_pass ? kExitOk : kExitReport;
}

int sweep_cmd(const Common& c, const std::vector<double>& zbars, const std::vector<double>& eps) {
  const miet::ScenarioConfig base = c.load();
  miet::resolve(base);  // surface validation errors before any run starts
  std::vector<miet::SweepRow> rows;
  try {
    rows = miet::sweep(base, zbars, eps);
  } catch (const miet::Error& e) {
    if (e.code() == miet::Errc::invalid_input || e.code() == miet::Errc::unsupported ||
        e.code() == miet::Errc::configuration) {
      throw;
    }
    std::cerr << "error: scenario " << base.id << ": " << e.what() << '\n';
    return kExitSimulation;
  }
  const auto path = c.out_dir() / (base.id + "_sweep.csv");
  miet::write_file(path, [&](std::ostream& os) { miet::write_sweep_csv(os, rows); });
  miet::write_sweep_csv(std::cout, rows);
  std::cout << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Countdown event-triggered control simulator"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Simulate a scenario and write trace/event CSV files");
  add_scenario_options(run, run_opts, true);
  run->add_option("--out", run_opts.out, "Output directory");

  Common bound_opts;
  auto* bound = app.add_subcommand("bound", "Print b, the inter-event lower bound and its limit");
  add_scenario_options(bound, bound_opts, false);

  std::string suite;
  std::string repro_out = ".";
  auto* repro = app.add_subcommand("reproduce", "Run a built-in experiment suite and check it");
  repro->add_option("suite", suite, "vdp, linear, robustness, period or all")
      ->required()
      ->check(CLI::IsMember({"vdp", "linear", "robustness", "period", "all"}));
  repro->add_option("--out", repro_out, "Directory for the JSON report");
  std::optional<unsigned long> repro_seed;
  repro->add_option("--seed", repro_seed, "Reserved; scenarios are deterministic");

  Common sweep_opts;
  std::vector<double> zbars;
  std::vector<double> eps;
  auto* sw = app.add_subcommand("sweep", "Run a scenario over a (Z_bar, epsilon) grid");
  add_scenario_options(sw, sweep_opts, true);
  sw->add_option("--out", sweep_opts.out, "Output directory");
  sw->add_option("--zbar", zbars, "Z_bar values")->delimiter(',')->required()->check(CLI::PositiveNumber);
  sw->add_option("--eps", eps, "epsilon values")->delimiter(',')->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*run) return run_cmd(run_opts);
    if (*bound) return bound_cmd(bound_opts);
    if (*repro) return reproduce_cmd(suite, repro_out);
    if (*sw) return sweep_cmd(sweep_opts, zbars, eps);
  } catch (const miet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
