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

// clockq command-line front-end.
//
//   clockq list-experiments
//   clockq validate --config cfg.json
//   clockq run --config cfg.json [--seed N] [--out DIR] [--deterministic] [--threads N]
//
// Exit codes: 0 ok, 2 configuration error, 3 runtime failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "clockq/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int list_experiments() {
  for (const auto& e : clockq::experiment_registry()) {
    std::cout << e.name;
    for (std::size_t i = e.name.size(); i < 18; ++i) std::cout << ' ';
    std::cout << e.description << '\n';
  }
  return kExitOk;
}

int validate(const std::string& path) {
  const auto doc = clockq::load_json_file(path);
  const auto diag = clockq::validate_config(doc);
  for (const auto& d : diag) std::cerr << path << ": " << d << '\n';
  if (!diag.empty()) return kExitConfig;
  std::cout << path << ": ok\n";
  return kExitOk;
}

int run(const std::string& path, std::optional<long long> seed, const std::string& out_flag, bool deterministic) {
  auto doc = clockq::load_json_file(path);
  if (seed) {
    if (*seed < 0) throw clockq::ConfigError("--seed must be >= 0");
    doc["seed"] = *seed;
  }
  std::string out = out_flag;
  if (out.empty()) out = doc.value("output", std::string("out"));
  const auto manifest = clockq::run_experiment(doc, out, deterministic);
  std::cout << "wrote " << manifest["artifacts"].size() + 1 << " files to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clockq: optical clock qubit circuit simulator and analysis toolkit"};
  app.require_subcommand(1);
  std::string config, out;
  std::optional<long long> seed;
  bool deterministic = false;
  int threads = 1;

  auto* list_cmd = app.add_subcommand("list-experiments", "List the named experiments");
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file and print diagnostics");
  validate_cmd->add_option("--config", config, "Experiment config (JSON)")->required();
  auto* run_cmd = app.add_subcommand("run", "Run an experiment and write its artifacts");
  run_cmd->add_option("--config", config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--out", out, "Output directory (overrides config output)");
  run_cmd->add_flag("--deterministic", deterministic, "Suppress timestamps so outputs are byte-identical");
  run_cmd->add_option("--threads", threads, "Worker threads (0 = all cores); outputs do not depend on it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (threads < 0) throw clockq::ConfigError("--threads must be >= 0");
    clockq::set_threads(threads);
    if (*list_cmd) return list_experiments();
    if (*validate_cmd) return validate(config);
    if (*run_cmd) return run(config, seed, out, deterministic);
  } catch (const clockq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
