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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clockq/experiments.hpp"

namespace {

using namespace clockq;
namespace fs = std::filesystem;

json load_shipped(const std::string& name) { return load_json_file(std::string(CLOCKQ_SOURCE_DIR) + "/configs/" + name); }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("clockq_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CLOCKQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_json(const json& j, const fs::path& p) { std::ofstream(p) << j.dump(2); }

TEST(Config, ShippedConfigsAreValid) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(std::string(CLOCKQ_SOURCE_DIR) + "/configs")) {
    if (e.path().extension() != ".json") continue;
    EXPECT_TRUE(validate_config(load_json_file(e.path().string())).empty()) << e.path();
    ++n;
  }
  EXPECT_EQ(n, 17u);
}

TEST(Config, ParseErrorsAreConfigErrors) {
  json j = load_shipped("bell_parity.json");
  j["colour"] = "blue";
  EXPECT_THROW(parse_config(j), ConfigError);
  j = load_shipped("bell_parity.json");
  j["shots"] = 0;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = load_shipped("bell_parity.json");
  j["noise"]["clock_psd"]["h0"] = -1.0;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = load_shipped("bell_parity.json");
  j["seed"] = "eleven";
  EXPECT_THROW(parse_config(j), ConfigError);
  j = load_shipped("bell_parity.json");
  j["scan"].erase("points");
  EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, ParsesScanAndNoise) {
  const ExperimentConfig c = parse_config(load_shipped("bell_parity.json"));
  EXPECT_EQ(c.experiment, "bell-parity");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.shots, 200u);
  ASSERT_TRUE(c.has_scan);
  EXPECT_EQ(c.scan.grid().size(), 24u);
  EXPECT_DOUBLE_EQ(c.scan.grid().back(), kTwoPi);
  EXPECT_EQ(c.noise.cz_mode, CzMode::kFast);
  EXPECT_DOUBLE_EQ(c.noise.readout.f1, 0.99995);
}

TEST(Config, ValidateReportsMissingPieces) {
  json j = load_shipped("bell_parity.json");
  j.erase("shots");
  auto d = validate_config(j);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].find("requires shots"), std::string::npos);
  j = load_shipped("bell_parity.json");
  j.erase("scan");
  d = validate_config(j);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].find("requires a scan"), std::string::npos);
  j = load_shipped("bell_parity.json");
  j["scan"]["variable"] = "idle_time_s";
  EXPECT_EQ(validate_config(j).size(), 1u);
  j["experiment"] = "teleportation";
  EXPECT_NE(validate_config(j).at(0).find("unknown experiment"), std::string::npos);
}

TEST(Config, HashIsCanonical) {
  const json a = json::parse(R"({"b": 1, "a": [1, 2]})"), b = json::parse(R"({"a":[1,2],"b":1})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(json::parse(R"({"a":[2,1],"b":1})")));
}

TEST(Experiments, DeterministicRunWritesManifestWithoutTimestamp) {
  TempDir dir("manifest");
  const json m = run_experiment(load_shipped("spam.json"), dir.path(), true);
  EXPECT_FALSE(m.contains("created_utc"));
  EXPECT_TRUE(fs::exists(dir.path() / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "summary.json"));
  for (const auto& a : m.at("artifacts")) EXPECT_TRUE(fs::exists(dir.path() / a.get<std::string>())) << a;
  const json m2 = run_experiment(load_shipped("spam.json"), dir.path() / "again", false);
  EXPECT_TRUE(m2.contains("created_utc"));
  EXPECT_EQ(m.at("config_hash"), m2.at("config_hash"));
}

TEST(Experiments, RegistryNamesAreUnique) {
  std::set<std::string> names;
  for (const auto& e : experiment_registry()) EXPECT_TRUE(names.insert(e.name).second) << e.name;
  EXPECT_NE(find_experiment("ghz8"), nullptr);
  EXPECT_EQ(find_experiment("ghz9"), nullptr);
}

TEST(Cli, ListAndValidate) {
  EXPECT_EQ(run_cli("list-experiments"), 0);
  EXPECT_EQ(run_cli("validate --config " + std::string(CLOCKQ_SOURCE_DIR) + "/configs/ghz8.json"), 0);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("run"), 2);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  TempDir dir("cli_config");
  json j = load_shipped("bell_parity.json");
  j["shots"] = -5;
  write_json(j, dir.path() / "bad.json");
  EXPECT_EQ(run_cli("validate --config " + (dir.path() / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("run --config " + (dir.path() / "bad.json").string() + " --out " + dir.path().string()), 2);
  EXPECT_EQ(run_cli("run --config " + (dir.path() / "missing.json").string()), 2);
  std::ofstream(dir.path() / "broken.json") << "{ \"experiment\": ";
  EXPECT_EQ(run_cli("run --config " + (dir.path() / "broken.json").string()), 2);
  EXPECT_EQ(run_cli("run --threads -1 --config " + std::string(CLOCKQ_SOURCE_DIR) + "/configs/spam.json --out " +
                    (dir.path() / "t").string()),
            2);
}

TEST(Cli, RuntimeFailureExitsWithThree) {
  // A two-second idle exceeds the one-second laser trajectory window.
  TempDir dir("cli_runtime");
  json j = load_shipped("ghz4_idle.json");
  j["shots"] = 4;
  j["scan"]["values"] = {2.0};
  write_json(j, dir.path() / "long_idle.json");
  EXPECT_EQ(run_cli("validate --config " + (dir.path() / "long_idle.json").string()), 0);
  EXPECT_EQ(run_cli("run --config " + (dir.path() / "long_idle.json").string() + " --out " +
                    (dir.path() / "o").string()),
            3);
}

TEST(Cli, DeterministicRerunsAreByteIdentical) {
  TempDir dir("cli_rerun");
  const std::string cfg = std::string(CLOCKQ_SOURCE_DIR) + "/configs/cluster_bell.json";
  ASSERT_EQ(run_cli("run --deterministic --threads 1 --config " + cfg + " --out " + (dir.path() / "a").string()), 0);
  ASSERT_EQ(run_cli("run --deterministic --threads 2 --config " + cfg + " --out " + (dir.path() / "b").string()), 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path() / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir.path() / "a");
    EXPECT_EQ(slurp(e.path()), slurp(dir.path() / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 1u);
  // A different seed changes the shots.
  ASSERT_EQ(run_cli("run --deterministic --seed 99 --config " + cfg + " --out " + (dir.path() / "c").string()), 0);
  EXPECT_NE(slurp(dir.path() / "a" / "summary.json"), slurp(dir.path() / "c" / "summary.json"));
}

}  // namespace
