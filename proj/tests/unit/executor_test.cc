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

#include "clockq/analysis.hpp"
#include "clockq/builders.hpp"
#include "clockq/executor.hpp"
#include "clockq/rydberg.hpp"

namespace {

using namespace clockq;

NoiseContext noisy() {
  NoiseContext n;
  n.clock_psd.h0 = 0.5;
  n.clock_psd.h_alpha = 50.0;
  n.clock_psd.H = 1e3;
  n.clock_psd.f_min = 1.0;
  n.clock_psd.f_max = 1e5;
  n.thermal = {0.24, 0.15};
  n.cz_mode = CzMode::kFast;
  n.cz_error = 0.004;
  return n;
}

TEST(Executor, NoiselessBellGivesOnlyCorrelatedOutcomes) {
  const ShotTable t = execute(build_bell_circuit(), NoiseContext{}, 2000, 1);
  const auto c = t.counts();
  EXPECT_EQ(c.count("01") + c.count("10"), 0u);
  EXPECT_NEAR(t.probability("00"), 0.5, 0.04);
}

TEST(Executor, SameSeedSameShotsAndThreadIndependent) {
  const Circuit c = build_ghz_cascade({}, CascadeOptions{0.4});
  set_threads(1);
  const ShotTable a = execute(c, noisy(), 300, 17);
  set_threads(3);
  const ShotTable b = execute(c, noisy(), 300, 17);
  set_threads(1);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.shots[i].bits, b.shots[i].bits);
  const ShotTable d = execute(c, noisy(), 300, 18);
  EXPECT_NE(a.counts(), d.counts());
}

TEST(Executor, ReadoutErrorsFlipAtConfiguredRates) {
  NoiseContext n;
  n.readout = {0.9, 0.8};
  Circuit c;
  c.num_atoms = 1;
  c.ops = {{OpKind::kFinalMeasure, {}, {}, 0.0}};  // register starts in |1>
  EXPECT_NEAR(execute(c, n, 20000, 3).probability("0"), 0.2, 0.01);
  c.ops.insert(c.ops.begin(), CircuitOp{OpKind::kGlobalRotation, {}, {kPi, 0.0}, 0.0});
  EXPECT_NEAR(execute(c, n, 20000, 3).probability("1"), 0.1, 0.01);
}

TEST(Executor, NoiseReducesBellContrast) {
  std::vector<ParityPoint> clean, dirty;
  for (int i = 0; i < 16; ++i) {
    const double phi = kPi * i / 16.0;
    clean.push_back(parity_point(execute(build_bell_circuit({}, phi), NoiseContext{}, 400, derive_seed(1, i)), phi));
    dirty.push_back(parity_point(execute(build_bell_circuit({}, phi), noisy(), 400, derive_seed(1, i)), phi));
  }
  const double cc = mle_parity_fit(clean, {2.0, true}).contrast, cd = mle_parity_fit(dirty, {2.0, true}).contrast;
  EXPECT_GT(cc, 0.99);
  EXPECT_LT(cd, cc);
}

TEST(Executor, DeterministicDetuningRotatesRamseyPhase) {
  NoiseContext n;
  n.detuning = 1000.0;
  BuilderConfig cfg;
  cfg.clock_rabi = 1e6;  // 0.25 us pulses: detuning acts only during the idle
  CircuitBuilder b("ramsey", 1, cfg);
  b.global(kPi / 2, 0.0).idle(2.5e-4).global(kPi / 2, 0.0).measure();
  // 2 pi * 1 kHz * 250 us = pi/2 extra phase: P(1) moves from 0 to 1/2.
  const ShotTable t = execute(b.build(), n, 4000, 2);
  EXPECT_NEAR(t.probability("1"), 0.5, 0.03);
  EXPECT_NEAR(execute(b.build(), NoiseContext{}, 500, 2).probability("1"), 0.0, 1e-12);
  // With 2.1 kHz pulses (119 us each) the detuning also acts while driving:
  // the effective dark time grows to T + 4 tau / pi and P(1) rises to ~0.9.
  CircuitBuilder slow("ramsey", 1, BuilderConfig{});
  slow.global(kPi / 2, 0.0).idle(2.5e-4).global(kPi / 2, 0.0).measure();
  EXPECT_GT(execute(slow.build(), n, 4000, 2).probability("1"), 0.8);
}

TEST(Executor, ForcedMidCircuitOutcomeAndBranchProbability) {
  const auto [s0, p0] = ideal_state(build_cluster_bell(), {0});
  const auto [s1, p1] = ideal_state(build_cluster_bell(), {1});
  EXPECT_NEAR(p0 + p1, 1.0, 1e-12);
  EXPECT_NEAR(s0.norm2(), 1.0, 1e-12);
  // Atom 1 starts in |1>; forcing |0> on an unrotated register is impossible.
  Circuit c;
  c.num_atoms = 2;
  c.ops = {{OpKind::kMidCircuitMeasure, {1}, {}, 0.0}, {OpKind::kFinalMeasure, {}, {}, 0.0}};
  EXPECT_THROW(ideal_state(c, {0}), RuntimeFailure);
}

TEST(Executor, ShelvingHeraldFailuresAreRecorded) {
  NoiseContext n;
  n.shelving.success_prob = 0.7;
  const ShotTable t = execute(build_cluster_bell(), n, 4000, 5);
  const double kept = static_cast<double>(t.heralded().size()) / static_cast<double>(t.size());
  EXPECT_NEAR(kept, 0.49, 0.03);  // two shelved atoms
}

TEST(Executor, ScaleSingleQubitErrors) {
  const NoiseContext n = noisy();
  const NoiseContext k = scale_single_qubit_errors(n, 16.0);
  EXPECT_NEAR(k.thermal.eta, 2.0 * n.thermal.eta, 1e-12);
  EXPECT_NEAR(psd_value_unchecked(k.clock_psd, 300.0), 16.0 * psd_value_unchecked(n.clock_psd, 300.0), 1e-9);
  EXPECT_DOUBLE_EQ(k.cz_error, n.cz_error);
}

TEST(Executor, TrajectoryGuardIsRuntimeFailure) {
  NoiseContext n = noisy();
  n.max_trajectory_duration = 1e-3;
  EXPECT_THROW(execute(build_ghz4_idle({}, 2e-3), n, 1, 1), RuntimeFailure);
}

TEST(Executor, ValidationRejectsBadContext) {
  NoiseContext n;
  n.readout.f0 = 0.4;
  EXPECT_THROW(execute(build_bell_circuit(), n, 1, 1), ConfigError);
  n = NoiseContext{};
  n.cz_error = 0.9;
  EXPECT_THROW(execute(build_bell_circuit(), n, 1, 1), ConfigError);
}

TEST(Executor, McwfCzModeMatchesIdealWithoutNoise) {
  NoiseContext n;
  n.cz_mode = CzMode::kMcwf;
  n.pulse = calibrate_pulse(5.4e6, 0.0);
  const ShotTable t = execute(build_bell_circuit(), n, 1000, 4);
  const auto c = t.counts();
  EXPECT_LE(c.count("01") ? c.at("01") : 0u, 2u);
  EXPECT_LE(c.count("10") ? c.at("10") : 0u, 2u);
}

}  // namespace
