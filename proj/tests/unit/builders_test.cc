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

#include <cmath>

#include "clockq/builders.hpp"
#include "clockq/executor.hpp"

namespace {

using namespace clockq;

double parity_of(const Circuit& c, const std::vector<std::size_t>& atoms = {}) {
  return expectation(ideal_state(c).first, Observable::parity(atoms));
}

TEST(Builders, BellCircuitPreparesEvenBellState) {
  const QuantumState s = ideal_state(build_bell_circuit()).first;
  EXPECT_NEAR(expectation(s, Observable::population("00")) + expectation(s, Observable::population("11")), 1.0,
              1e-12);
  // Full-contrast parity fringe at frequency 2 in the analysis phase.
  double lo = 1.0, hi = -1.0;
  for (int i = 0; i < 32; ++i) {
    const double p = parity_of(build_bell_circuit({}, kTwoPi * i / 32.0));
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    EXPECT_NEAR(p, parity_of(build_bell_circuit({}, kTwoPi * i / 32.0 + kPi)), 1e-12);
  }
  EXPECT_NEAR(hi, 1.0, 1e-9);
  EXPECT_NEAR(lo, -1.0, 1e-9);
}

TEST(Builders, CascadeGroupsAreGhzStates) {
  const QuantumState s = ideal_state(build_ghz_cascade()).first;
  const auto groups = cascade_groups();
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(s.num_atoms, 7u);
  // Each GHZ group of size K >= 2 has P(all 0) + P(all 1) = 1 on its atoms.
  for (std::size_t g = 1; g < groups.size(); ++g) {
    double p_even_extreme = 0.0;
    const auto probs = probabilities(s);
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
      std::size_t ones = 0;
      for (auto a : groups[g]) ones += s.level_of(idx, a);
      if (ones == 0 || ones == groups[g].size()) p_even_extreme += probs[idx];
    }
    EXPECT_NEAR(p_even_extreme, 1.0, 1e-12) << "group " << g;
  }
}

TEST(Builders, CascadeParityFrequenciesDoubleAcrossGroups) {
  const auto groups = cascade_groups();
  auto parity = [&](std::size_t g, double phi) {
    CascadeOptions o;
    o.analysis_phase = phi;
    return parity_of(build_ghz_cascade({}, o), groups[g]);
  };
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double period = kTwoPi / static_cast<double>(groups[g].size());
    for (double phi : {0.1, 0.7, 2.0}) EXPECT_NEAR(parity(g, phi), parity(g, phi + period), 1e-12);
    if (groups[g].size() > 1) {
      EXPECT_GT(std::abs(parity(g, 0.3) - parity(g, 0.3 + period / 2.0)), 0.1);
    }
  }
}

TEST(Builders, DualQuadratureCopiesAreQuarterPeriodApart) {
  // Copy 2 at phase phi equals copy 1 at phi + (pi/2)/4 (or minus).
  auto copies = [](double phi) {
    const QuantumState s = ideal_state(build_dual_quadrature({}, phi)).first;
    return std::pair{expectation(s, Observable::parity({0, 1, 2, 3})), expectation(s, Observable::parity({4, 5, 6, 7}))};
  };
  const double q = kPi / 8.0;
  for (double phi : {0.05, 0.3, 0.6}) {
    const double c2 = copies(phi).second;
    const double plus = copies(phi + q).first, minus = copies(phi - q).first;
    EXPECT_LT(std::min(std::abs(c2 - plus), std::abs(c2 - minus)), 1e-9);
  }
}

TEST(Builders, Ghz8IsGhzAndUsesThreeCzLayers) {
  std::vector<LayerGeometry> geo;
  const Circuit c = build_ghz8({}, kNoAnalysis, &geo);
  EXPECT_TRUE(check_adjacency(c, geo));
  const QuantumState s = ideal_state(c).first;
  EXPECT_NEAR(expectation(s, Observable::population("00000000")) + expectation(s, Observable::population("11111111")),
              1.0, 1e-12);
  EXPECT_EQ(cz_depth(c), 3u);
}

TEST(Builders, Ghz4IdleAddsIdleTime) {
  const BuilderConfig cfg;
  const Circuit a = build_ghz4_idle(cfg, 0.0), b = build_ghz4_idle(cfg, 5e-4);
  EXPECT_NEAR(b.duration() - a.duration(), 5e-4, 1e-12);
  EXPECT_NEAR(expectation(ideal_state(b).first, Observable::population("0000")) +
                  expectation(ideal_state(b).first, Observable::population("1111")),
              1.0, 1e-12);
}

TEST(Builders, Weight2ParityAncillaTracksPairParity) {
  BuilderConfig cfg;
  cfg.ramsey_detuning = 1000.0;
  for (double t : {0.0, 1e-4, 2.5e-4, 3.3e-4}) {
    const double p1 = ideal_state(build_weight2_parity(cfg, t), {1}).second;
    const double direct = parity_of(build_weight2_parity(cfg, t, 0.0, true), {0, 1});
    EXPECT_NEAR(2.0 * p1 - 1.0, direct, 1e-9) << "t = " << t;
  }
}

TEST(Builders, ClusterBellBranchesAreEquallyLikely) {
  const Circuit c = build_cluster_bell();
  EXPECT_NEAR(ideal_state(c, {0}).second, 0.5, 1e-12);
  EXPECT_NEAR(ideal_state(c, {1}).second, 0.5, 1e-12);
  EXPECT_EQ(c.count(OpKind::kMidCircuitMeasure), 1u);
}

TEST(Builders, QlsRoundsCarryOneAncillaOutcomeEach) {
  const Circuit c = build_repeated_qls({}, {1e-4, 2e-4, 3e-4}, 0.0);
  EXPECT_EQ(c.count(OpKind::kMidCircuitMeasure), 3u);
  const ShotTable t = execute(c, NoiseContext{}, 20, 1);
  for (const auto& s : t.shots) EXPECT_EQ(s.ancilla.size(), 3u);
}

TEST(Builders, MinimalJerkProfile) {
  EXPECT_DOUBLE_EQ(minimal_jerk_position(0.0), 0.0);
  EXPECT_DOUBLE_EQ(minimal_jerk_position(1.0), 1.0);
  EXPECT_NEAR(minimal_jerk_position(0.5), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(minimal_jerk_velocity(0.0), 0.0);
  EXPECT_DOUBLE_EQ(minimal_jerk_velocity(1.0), 0.0);
  EXPECT_NEAR(minimal_jerk_acceleration(0.5), 0.0, 1e-12);
}

TEST(Builders, ConfigValidation) {
  BuilderConfig cfg;
  cfg.clock_rabi = 0.0;
  EXPECT_THROW(build_bell_circuit(cfg), ConfigError);
}

}  // namespace
