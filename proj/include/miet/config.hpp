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
 * @file config.hpp
 * @brief Scenario files: TOML (or JSON) text <-> ScenarioConfig.
 *
 * Layout:
 *
 *     id = "linear"
 *     x0 = [10.0, 0.0]
 *     horizon = 20.0
 *     dt = 1e-4
 *     trace_stride = 10
 *     dt_policy = "error"        # or "warn"
 *     log_events = true
 *
 *     [plant]
 *     kind = "linear"            # or "vdp" (with lipschitz = 1.0)
 *     A = [[0.0, 1.0], [-2.0, 3.0]]
 *     B = [[0.0], [1.0]]
 *     K = [[1.0, -4.0]]
 *     Q = [[0.5, 0.25], [0.25, 1.5]]
 *     P = [[1.0, 0.25], [0.25, 1.0]]   # optional, solved from Q if absent
 *     H = [[0.0], [1.0]]               # optional disturbance channel
 *
 *     [trigger]
 *     kind = "miet"              # miet: Z_bar, epsilon, M, V, b_override
 *     Z_bar = 1.0                # static: sigma, alpha, gamma
 *     epsilon = 1.0              # dynamic: + theta, zeta_rate, eta0
 *
 *     [disturbance]              # optional
 *     kind = "sinusoid"          # constant | sinusoid | decaying-exponential | table
 *     bound = 1.0
 *     angular_frequency = 2.0
 *
 * Unknown keys are rejected so a typo cannot silently fall back to a default.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "miet/error.hpp"
#include "miet/sim.hpp"
#include "miet/toml_lite.hpp"

namespace miet {

namespace config_detail {

using json = nlohmann::ordered_json;

/// A problem with the value at a dotted key path.
struct FieldError {
  std::string path;
  std::string message;
};

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw FieldError{path_, "expected a table"};
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return obj_.contains(k); }

  const json& raw(const std::string& k) {
    used_.insert(k);
    if (!obj_.contains(k)) throw FieldError{key(k), "missing required key"};
    return obj_.at(k);
  }

  double number(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) throw FieldError{key(k), "expected a number"};
    return v.get<double>();
  }

  double number(const std::string& k, double fallback) { return has(k) ? number(k) : (used_.insert(k), fallback); }

  double positive(const std::string& k) {
    const double v = number(k);
    if (!(v > 0.0) || !std::isfinite(v)) throw FieldError{key(k), "must be positive, got " + std::to_string(v)};
    return v;
  }

  double positive(const std::string& k, double fallback) { return has(k) ? positive(k) : (used_.insert(k), fallback); }

  std::string string(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) throw FieldError{key(k), "expected a string"};
    return v.get<std::string>();
  }

  std::string string(const std::string& k, const std::string& fallback) {
    return has(k) ? string(k) : (used_.insert(k), fallback);
  }

  bool boolean(const std::string& k, bool fallback) {
    if (!has(k)) return fallback;
    const json& v = raw(k);
    if (!v.is_boolean()) throw FieldError{key(k), "expected true or false"};
    return v.get<bool>();
  }

  Vector vector(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array() || v.empty()) throw FieldError{key(k), "expected a non-empty array of numbers"};
    Vector out;
    for (const auto& item : v) {
      if (!item.is_number()) throw FieldError{key(k), "expected a non-empty array of numbers"};
      out.push_back(item.get<double>());
    }
    return out;
  }

  Matrix matrix(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array() || v.empty()) throw FieldError{key(k), "expected a nested array [[...], ...]"};
    std::vector<std::vector<double>> rows;
    for (const auto& r : v) {
      if (!r.is_array()) throw FieldError{key(k), "expected a nested array [[...], ...]"};
      std::vector<double> row;
      for (const auto& item : r) {
        if (!item.is_number()) throw FieldError{key(k), "matrix entries must be numbers"};
        row.push_back(item.get<double>());
      }
      rows.push_back(std::move(row));
    }
    try {
      return Matrix::from_rows(rows);
    } catch (const Error& e) {
      throw FieldError{key(k), e.what()};
    }
  }

  std::optional<Matrix> optional_matrix(const std::string& k) {
    if (!has(k)) return std::nullopt;
    return matrix(k);
  }

  Reader table(const std::string& k) { return Reader(raw(k), key(k)); }

  /// Rejects keys nobody asked for.
  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!used_.count(k)) throw FieldError{key(k), "unknown key"};
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

inline ComparisonFn read_comparison(Reader& parent, const std::string& k, ComparisonFn fallback) {
  if (!parent.has(k)) return fallback;
  Reader r = parent.table(k);
  ComparisonFn f;
  try {
    f.kind = comparison_kind_from_string(r.string("kind"));
  } catch (const Error& e) {
    throw FieldError{r.key("kind"), e.what()};
  }
  f.coeff = r.positive("coeff");
  r.finish();
  return f;
}

inline double read_sigma(Reader& r, double fallback) {
  const double s = r.number("sigma", fallback);
  if (!(s > 0.0 && s < 1.0)) throw FieldError{r.key("sigma"), "must lie in (0, 1)"};
  return s;
}

inline ScenarioConfig from_json(const json& root) {
  Reader r(root, "");
  ScenarioConfig cfg;
  cfg.id = r.string("id", "scenario");
  cfg.x0 = r.vector("x0");
  cfg.horizon = r.positive("horizon", cfg.horizon);
  cfg.dt = r.positive("dt", cfg.dt);
  {
    const double stride = r.number("trace_stride", cfg.trace_stride);
    if (!(stride >= 1.0) || stride != std::floor(stride)) {
      throw FieldError{r.key("trace_stride"), "must be a positive integer"};
    }
    cfg.trace_stride = static_cast<int>(stride);
  }
  {
    const std::string policy = r.string("dt_policy", "error");
    if (policy == "error") {
      cfg.dt_policy = DtPolicy::error;
    } else if (policy == "warn") {
      cfg.dt_policy = DtPolicy::warn;
    } else {
      throw FieldError{r.key("dt_policy"), "expected \"error\" or \"warn\""};
    }
  }
  cfg.log_events = r.boolean("log_events", true);

  {
    Reader p = r.table("plant");
    const std::string kind = p.string("kind");
    if (kind == "vdp") {
      cfg.plant = VdpPlantConfig{p.positive("lipschitz", 1.0)};
    } else if (kind == "linear") {
      LinearPlantConfig lc;
      lc.A = p.matrix("A");
      lc.B = p.matrix("B");
      lc.K = p.matrix("K");
      lc.Q = p.matrix("Q");
      lc.P = p.optional_matrix("P");
      lc.H = p.optional_matrix("H");
      cfg.plant = std::move(lc);
    } else {
      throw FieldError{p.key("kind"), "unknown plant '" + kind + "' (expected vdp or linear)"};
    }
    p.finish();
  }

  {
    Reader t = r.table("trigger");
    const std::string kind = t.string("kind");
    if (kind == "miet") {
      MietTriggerConfig mc;
      mc.Z_bar = t.positive("Z_bar");
      mc.epsilon = t.positive("epsilon");
      mc.M = t.optional_matrix("M");
      mc.V = t.optional_matrix("V");
      if (t.has("b_override")) mc.b_override = t.positive("b_override");
      cfg.trigger = std::move(mc);
    } else if (kind == "static") {
      StaticTriggerParams sp;
      sp.sigma = read_sigma(t, sp.sigma);
      sp.alpha = read_comparison(t, "alpha", sp.alpha);
      sp.gamma = read_comparison(t, "gamma", sp.gamma);
      cfg.trigger = sp;
    } else if (kind == "dynamic") {
      DynamicTriggerParams dp;
      dp.sigma = read_sigma(t, dp.sigma);
      dp.theta = t.positive("theta", dp.theta);
      dp.zeta_rate = t.positive("zeta_rate", dp.zeta_rate);
      dp.eta0 = t.number("eta0", dp.eta0);
      if (!(dp.eta0 >= 0.0)) throw FieldError{t.key("eta0"), "must be >= 0"};
      dp.alpha = read_comparison(t, "alpha", dp.alpha);
      dp.gamma = read_comparison(t, "gamma", dp.gamma);
      cfg.trigger = dp;
    } else {
      throw FieldError{t.key("kind"), "unknown trigger '" + kind + "' (expected miet, static or dynamic)"};
    }
    t.finish();
  }

  if (r.has("disturbance")) {
    Reader d = r.table("disturbance");
    Disturbance dist;
    try {
      dist.kind = disturbance_kind_from_string(d.string("kind"));
    } catch (const Error& e) {
      throw FieldError{d.key("kind"), e.what()};
    }
    dist.bound = d.number("bound", 0.0);
    if (!(dist.bound >= 0.0)) throw FieldError{d.key("bound"), "must be >= 0"};
    dist.angular_frequency = d.number("angular_frequency", dist.angular_frequency);
    dist.phase = d.number("phase", dist.phase);
    dist.decay_rate = d.positive("decay_rate", dist.decay_rate);
    if (d.has("table")) {
      const json& tab = d.raw("table");
      if (!tab.is_array()) throw FieldError{d.key("table"), "expected [[t, d], ...]"};
      for (const auto& row : tab) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
          throw FieldError{d.key("table"), "expected [[t, d], ...]"};
        }
        dist.table.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
    }
    d.finish();
    cfg.disturbance = std::move(dist);
  }

  r.finish();
  return cfg;
}

inline json matrix_json(const Matrix& m) { return json(m.to_rows()); }

inline json comparison_json(const ComparisonFn& f) {
  json j = json::object();
  j["kind"] = to_string(f.kind);
  j["coeff"] = f.coeff;
  return j;
}

}  // namespace config_detail

/// Canonical JSON form of a scenario (every field written explicitly).
inline nlohmann::ordered_json to_json(const ScenarioConfig& cfg) {
  using config_detail::json;
  using config_detail::matrix_json;
  json root = json::object();
  root["id"] = cfg.id;
  root["x0"] = cfg.x0;
  root["horizon"] = cfg.horizon;
  root["dt"] = cfg.dt;
  root["trace_stride"] = cfg.trace_stride;
  root["dt_policy"] = cfg.dt_policy == DtPolicy::error ? "error" : "warn";
  root["log_events"] = cfg.log_events;

  json plant = json::object();
  if (const auto* v = std::get_if<VdpPlantConfig>(&cfg.plant)) {
    plant["kind"] = "vdp";
    plant["lipschitz"] = v->lipschitz;
  } else {
    const auto& l = std::get<LinearPlantConfig>(cfg.plant);
    plant["kind"] = "linear";
    plant["A"] = matrix_json(l.A);
    plant["B"] = matrix_json(l.B);
    plant["K"] = matrix_json(l.K);
    plant["Q"] = matrix_json(l.Q);
    if (l.P) plant["P"] = matrix_json(*l.P);
    if (l.H) plant["H"] = matrix_json(*l.H);
  }
  root["plant"] = std::move(plant);

  json trig = json::object();
  if (const auto* m = std::get_if<MietTriggerConfig>(&cfg.trigger)) {
    trig["kind"] = "miet";
    trig["Z_bar"] = m->Z_bar;
    trig["epsilon"] = m->epsilon;
    if (m->M) trig["M"] = matrix_json(*m->M);
    if (m->V) trig["V"] = matrix_json(*m->V);
    if (m->b_override) trig["b_override"] = *m->b_override;
  } else if (const auto* s = std::get_if<StaticTriggerParams>(&cfg.trigger)) {
    trig["kind"] = "static";
    trig["sigma"] = s->sigma;
    trig["alpha"] = config_detail::comparison_json(s->alpha);
    trig["gamma"] = config_detail::comparison_json(s->gamma);
  } else {
    const auto& d = std::get<DynamicTriggerParams>(cfg.trigger);
    trig["kind"] = "dynamic";
    trig["sigma"] = d.sigma;
    trig["theta"] = d.theta;
    trig["zeta_rate"] = d.zeta_rate;
    trig["eta0"] = d.eta0;
    trig["alpha"] = config_detail::comparison_json(d.alpha);
    trig["gamma"] = config_detail::comparison_json(d.gamma);
  }
  root["trigger"] = std::move(trig);

  if (cfg.disturbance) {
    const Disturbance& d = *cfg.disturbance;
    json dj = json::object();
    dj["kind"] = to_string(d.kind);
    dj["bound"] = d.bound;
    dj["angular_frequency"] = d.angular_frequency;
    dj["phase"] = d.phase;
    dj["decay_rate"] = d.decay_rate;
    if (!d.table.empty()) {
      json tab = json::array();
      for (const auto& [t, v] : d.table) tab.push_back(json::array({t, v}));
      dj["table"] = std::move(tab);
    }
    root["disturbance"] = std::move(dj);
  }
  return root;
}

inline std::string to_toml(const ScenarioConfig& cfg) { return toml::dump(to_json(cfg)); }

/// Parses scenario text. JSON is accepted when @p source ends in ".json".
/// Errors carry "source:line: key: message".
inline ScenarioConfig parse_scenario(std::string_view text, const std::string& source = "<string>") {
  toml::Document doc;
  if (source.size() >= 5 && source.compare(source.size() - 5, 5, ".json") == 0) {
    try {
      doc.root = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::parse, source + ": " + e.what());
    }
  } else {
    doc = toml::parse(text, source);
  }
  try {
    return config_detail::from_json(doc.root);
  } catch (const config_detail::FieldError& fe) {
    std::string where = source;
    // Report the line of the key, or of the closest enclosing table.
    for (std::string p = fe.path; !p.empty();) {
      if (auto it = doc.lines.find(p); it != doc.lines.end()) {
        where += ":" + std::to_string(it->second);
        break;
      }
      const auto dot = p.rfind('.');
      p = dot == std::string::npos ? std::string() : p.substr(0, dot);
    }
    throw Error(Errc::configuration, where + ": " + (fe.path.empty() ? "" : fe.path + ": ") + fe.message);
  }
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

}  // namespace miet
