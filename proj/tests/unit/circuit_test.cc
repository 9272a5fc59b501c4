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

#include <filesystem>

#include "clockq/builders.hpp"
#include "clockq/circuit.hpp"
#include "clockq/shots.hpp"

namespace {

using namespace clockq;

TEST(Circuit, TextRoundTripIsExact) {
  for (const Circuit& c : {build_bell_circuit({}, 0.37), build_ghz8({}, 1.1), build_cluster_bell(),
                           build_weight2_parity({}, 3e-5, 0.2), build_repeated_qls({}, {1e-4, 2e-4}, 0.5)}) {
    const Circuit back = from_text(to_text(c));
    EXPECT_EQ(back, c) << c.name;
  }
}

TEST(Circuit, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "clockq_circuit_roundtrip.txt";
  const Circuit c = build_ghz_cascade();
  write_circuit(c, path.string());
  EXPECT_EQ(read_circuit(path.string()), c);
  std::filesystem::remove(path);
}

TEST(Circuit, DurationAndCounts) {
  const BuilderConfig cfg;
  const Circuit c = build_bell_circuit(cfg);
  EXPECT_EQ(c.count(OpKind::kCz), 1u);
  EXPECT_EQ(c.count(OpKind::kGlobalRotation), 2u);
  EXPECT_NEAR(c.duration(), cfg.rotation_time(kPi / 2) + cfg.cz_duration + cfg.rotation_time(kPi / 4), 1e-15);
}

TEST(Circuit, ValidationRejectsMalformedOps) {
  Circuit c;
  c.num_atoms = 2;
  c.ops.push_back({OpKind::kCz, {0}, {}, 0.0});
  EXPECT_THROW(c.validate(), ConfigError);
  c.ops = {{OpKind::kLocalRotation, {2}, {1.0, 0.0}, 0.0}};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ops = {{OpKind::kGlobalRotation, {}, {1.0}, 0.0}};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ops = {{OpKind::kIdle, {}, {}, -1.0}};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Circuit, ParserDiagnostics) {
  EXPECT_THROW(from_text(""), ConfigError);
  EXPECT_THROW(from_text("global_rotation - 1,0 0\n"), ConfigError);
  EXPECT_THROW(from_text("circuit x 2\nteleport - - 0\n"), ConfigError);
  EXPECT_THROW(from_text("circuit x 2\ncz 0,a - 0\n"), ConfigError);
  EXPECT_THROW(read_circuit("/nonexistent/circuit.txt"), ConfigError);
  const Circuit c = from_text("# comment\ncircuit x 2\n\ncz 0,1 - 1e-7\nfinal_measure - - 0\n");
  EXPECT_EQ(c.ops.size(), 2u);
}

TEST(Circuit, OpNamesRoundTrip) {
  for (int k = 0; k <= static_cast<int>(OpKind::kFinalMeasure); ++k)
    EXPECT_EQ(op_from_name(op_name(static_cast<OpKind>(k))), static_cast<OpKind>(k));
}

TEST(Shots, TableFilterCountsAndParity) {
  ShotTable t;
  t.num_atoms = 2;
  auto rec = [](std::uint8_t a, std::uint8_t b, std::uint8_t h) {
    ShotRecord r;
    r.bits = {a, b};
    r.herald = {h, 1};
    r.leaked = {0, 0};
    return r;
  };
  t.shots = {rec(0, 0, 1), rec(1, 1, 1), rec(0, 1, 0), rec(1, 1, 1)};
  EXPECT_EQ(t.counts().at("11"), 2u);
  EXPECT_EQ(t.heralded().size(), 3u);
  EXPECT_EQ(t.even_parity_count(), 3u);
  EXPECT_EQ(t.even_parity_count({1}), 1u);
  EXPECT_DOUBLE_EQ(t.probability("11"), 0.5);
  EXPECT_DOUBLE_EQ(t.probability("1", {0}), 0.5);
  const ShotTable m = ShotTable::merge(t, t);
  EXPECT_EQ(m.size(), 8u);
}

TEST(Shots, CsvRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path();
  ShotTable t;
  t.num_atoms = 3;
  for (std::uint64_t i = 0; i < 5; ++i) {
    ShotRecord r;
    r.index = i;
    r.bits = {static_cast<std::uint8_t>(i & 1), 1, 0};
    r.herald = {1, 1, static_cast<std::uint8_t>(i != 2)};
    r.leaked = {0, static_cast<std::uint8_t>(i == 3), 0};
    r.ancilla = {static_cast<std::int8_t>(i % 2), -1};
    t.shots.push_back(r);
  }
  t.metadata = {{"seed", 4}};
  const auto csv = (dir / "clockq_shots.csv").string(), js = (dir / "clockq_shots.json").string();
  write_shot_csv(t, csv, js);
  const ShotTable back = read_shot_csv(csv, js);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.shots[i].bits, t.shots[i].bits);
    EXPECT_EQ(back.shots[i].herald, t.shots[i].herald);
    EXPECT_EQ(back.shots[i].leaked, t.shots[i].leaked);
    EXPECT_EQ(back.shots[i].ancilla, t.shots[i].ancilla);
  }
  EXPECT_EQ(back.metadata.at("seed"), 4);
  std::filesystem::remove(csv);
  std::filesystem::remove(js);
}

}  // namespace
