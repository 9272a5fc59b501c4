// Copyright 2026 The clockq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configuration files: one JSON document per experiment.
//
//   {
//     "experiment": "bell-parity",
//     "seed": 7,
//     "shots": 200,
//     "output": "out/bell",
//     "noise":   { ... NoiseContext fields ... },
//     "builder": { "clock_rabi_hz": 2100, "ramsey_detuning_hz": 0 },
//     "scan":    { "variable": "phase", "start": 0, "stop": 6.2832, "points": 24 },
//     "params":  { ... experiment specific ... }
//   }
//
// Unknown keys are rejected so typos surface as configuration errors.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clockq/builders.hpp"
#include "clockq/core.hpp"
#include "clockq/executor.hpp"
#include "clockq/noise.hpp"
#include "clockq/rydberg.hpp"

namespace clockq {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(allowed.count(it.key()) > 0, "unknown key '" + it.key() + "' in " + where);
}

// Typed getter mapping JSON type errors to ConfigError.
template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

inline ClockPsd psd_from_config(const json& j, const std::string& where) {
  check_keys(j, {"h0", "h_alpha", "alpha", "H", "f_min", "f_max", "table"}, where);
  try {
    return j.get<ClockPsd>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline NoiseContext noise_from_config(const json& j) {
  NoiseContext n;
  if (j.is_null()) return n;
  check_keys(j,
             {"clock_psd", "trajectory_rate_hz", "detuning_hz", "clock_rabi_hz", "thermal", "cz_mode", "cz_error",
              "pulse", "rydberg_noise", "shelving", "readout", "reuse_survival"},
             "noise");
  if (j.contains("clock_psd")) n.clock_psd = psd_from_config(j.at("clock_psd"), "noise.clock_psd");
  n.trajectory_rate = get_or(j, "trajectory_rate_hz", n.trajectory_rate);
  n.detuning = get_or(j, "detuning_hz", n.detuning);
  n.clock_rabi = get_or(j, "clock_rabi_hz", n.clock_rabi);
  if (j.contains("thermal")) {
    const auto& t = j.at("thermal");
    check_keys(t, {"nbar", "eta"}, "noise.thermal");
    n.thermal.nbar = get_or(t, "nbar", 0.0);
    n.thermal.eta = get_or(t, "eta", 0.0);
  }
  const std::string mode = get_or<std::string>(j, "cz_mode", "ideal");
  if (mode == "ideal") n.cz_mode = CzMode::kIdeal;
  else if (mode == "fast") n.cz_mode = CzMode::kFast;
  else if (mode == "mcwf") n.cz_mode = CzMode::kMcwf;
  else throw ConfigError("noise.cz_mode must be ideal, fast or mcwf");
  n.cz_error = get_or(j, "cz_error", 0.0);
  if (j.contains("pulse")) {
    try {
      n.pulse = j.at("pulse").get<RydbergPulse>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("noise.pulse: ") + e.what());
    }
  }
  if (j.contains("rydberg_noise")) {
    const auto& r = j.at("rydberg_noise");
    check_keys(r, {"intensity_rms", "freq_psd", "decay_rate", "branch_to_leak", "branch_to_one", "doppler_sigma"},
               "noise.rydberg_noise");
    if (r.contains("freq_psd")) (void)psd_from_config(r.at("freq_psd"), "noise.rydberg_noise.freq_psd");
    try {
      n.rydberg_noise = r.get<RydbergNoise>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("noise.rydberg_noise: ") + e.what());
    }
  }
  if (j.contains("shelving")) {
    const auto& s = j.at("shelving");
    check_keys(s, {"success_prob", "unshelve_coherence", "toggle_error"}, "noise.shelving");
    n.shelving.success_prob = get_or(s, "success_prob", 1.0);
    n.shelving.unshelve_coherence = get_or(s, "unshelve_coherence", 1.0);
    n.shelving.toggle_error = get_or(s, "toggle_error", 0.0);
  }
  if (j.contains("readout")) {
    const auto& r = j.at("readout");
    check_keys(r, {"f0", "f1"}, "noise.readout");
    n.readout.f0 = get_or(r, "f0", 1.0);
    n.readout.f1 = get_or(r, "f1", 1.0);
  }
  n.reuse_survival = get_or(j, "reuse_survival", n.reuse_survival);
  n.validate();
  if (n.cz_mode == CzMode::kMcwf) require(n.pulse.duration > 0.0, "cz_mode mcwf needs a calibrated noise.pulse");
  return n;
}

inline BuilderConfig builder_from_config(const json& j, const NoiseContext& noise) {
  BuilderConfig b;
  b.clock_rabi = noise.clock_rabi;
  if (j.is_null()) return b;
  check_keys(j, {"clock_rabi_hz", "cz_duration_s", "ramsey_detuning_hz", "transport"}, "builder");
  b.clock_rabi = get_or(j, "clock_rabi_hz", b.clock_rabi);
  b.cz_duration = get_or(j, "cz_duration_s", b.cz_duration);
  b.ramsey_detuning = get_or(j, "ramsey_detuning_hz", b.ramsey_detuning);
  if (j.contains("transport")) {
    const auto& t = j.at("transport");
    check_keys(t, {"lambda_m", "move_duration_s", "phase_move_duration_s", "displacement_phase"}, "builder.transport");
    b.transport.displacement_phase = get_or(t, "displacement_phase", b.transport.displacement_phase);
    b.transport.lambda = get_or(t, "lambda_m", b.transport.lambda);
    b.transport.move_duration = get_or(t, "move_duration_s", b.transport.move_duration);
    b.transport.phase_move_duration = get_or(t, "phase_move_duration_s", b.transport.phase_move_duration);
  }
  b.validate();
  return b;
}

struct ScanSpec {
  std::string variable;
  double start = 0.0, stop = 0.0;
  std::size_t points = 0;
  std::vector<double> values;  // explicit list overrides start/stop/points

  std::vector<double> grid() const {
    if (!values.empty()) return values;
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
      g[i] = points == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
  }
};

inline ScanSpec scan_from_config(const json& j) {
  ScanSpec s;
  check_keys(j, {"variable", "start", "stop", "points", "values"}, "scan");
  s.variable = get_or<std::string>(j, "variable", "");
  require(!s.variable.empty(), "scan.variable is required");
  s.values = get_or(j, "values", std::vector<double>{});
  if (s.values.empty()) {
    require(j.contains("start") && j.contains("stop") && j.contains("points"),
            "scan needs start, stop and points (or values)");
    s.start = get_or(j, "start", 0.0);
    s.stop = get_or(j, "stop", 0.0);
    const auto pts = get_or<long long>(j, "points", 0);
    require(pts >= 1, "scan.points must be >= 1");
    s.points = static_cast<std::size_t>(pts);
    require(std::isfinite(s.start) && std::isfinite(s.stop), "scan range must be finite");
    require(s.points == 1 || s.stop != s.start, "scan range must be non-empty");
  }
  return s;
}

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 1;
  std::size_t shots = 0;
  std::string output;
  NoiseContext noise;
  BuilderConfig builder;
  bool has_scan = false;
  ScanSpec scan;
  json params = json::object();
  json raw;  // the document as loaded (canonical dump feeds the config hash)
};

inline ExperimentConfig parse_config(const json& j) {
  check_keys(j, {"experiment", "seed", "shots", "output", "noise", "builder", "scan", "params", "description"},
             "config");
  ExperimentConfig c;
  c.raw = j;
  c.experiment = get_or<std::string>(j, "experiment", "");
  require(!c.experiment.empty(), "config.experiment is required");
  const auto seed = get_or<long long>(j, "seed", 1);
  require(seed >= 0, "seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  if (j.contains("shots")) {
    const auto s = get_or<long long>(j, "shots", 0);
    require(s >= 1, "shots must be >= 1");
    c.shots = static_cast<std::size_t>(s);
  }
  c.output = get_or<std::string>(j, "output", "out");
  c.noise = noise_from_config(j.contains("noise") ? j.at("noise") : json());
  c.builder = builder_from_config(j.contains("builder") ? j.at("builder") : json(), c.noise);
  if (j.contains("scan")) {
    c.has_scan = true;
    c.scan = scan_from_config(j.at("scan"));
  }
  if (j.contains("params")) {
    require(j.at("params").is_object(), "params must be a JSON object");
    c.params = j.at("params");
  }
  return c;
}

inline json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  try {
    return json::parse(f, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

// 64-bit FNV-1a over the canonical dump (sorted keys, no whitespace).
inline std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream o;
  o << std::hex << h;
  return o.str();
}

}  // namespace clockq
