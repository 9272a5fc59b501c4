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

#include "clockq/benchmarking.hpp"
#include "clockq/executor.hpp"

namespace {

using namespace clockq;

double return_probability(const Circuit& c) {
  const QuantumState s = ideal_state(c).first;
  return expectation(s, Observable::population(std::string(c.num_atoms, '1')));
}

TEST(Stabilizers, CensusSizes) {
  EXPECT_EQ(clifford_group().size(), 24u);
  EXPECT_EQ(enumerate_two_qubit_stabilizers().size(), 60u);
  EXPECT_EQ(swap_symmetric_stabilizers().size(), 15u);
  EXPECT_EQ(symmetric_stabilizers().states.size(), 12u);
}

TEST(Stabilizers, ActionTablesArePermutations) {
  const auto& set = symmetric_stabilizers();
  auto is_perm = [](const std::vector<std::size_t>& v) {
    std::vector<bool> seen(v.size(), false);
    for (auto x : v) {
      if (x >= v.size() || seen[x]) return false;
      seen[x] = true;
    }
    return true;
  };
  for (const auto& row : set.clifford_actions) EXPECT_TRUE(is_perm(row));
  EXPECT_TRUE(is_perm(set.cz_action));
}

TEST(Stabilizers, BellStatesOutsideTheBenchmarkOrbit) {
  const auto& set = symmetric_stabilizers();
  const double r = 1.0 / std::sqrt(2.0);
  for (const Vec4& v : {Vec4{r, 0, 0, r}, Vec4{r, 0, 0, -r}, Vec4{0, r, r, 0}})
    EXPECT_THROW(set.find(v), RuntimeFailure);
  EXPECT_EQ(set.find(Vec4{0, 0, 0, 1}), 0u);
}

TEST(Benchmark, NoiselessSsbAndEchoReturnToStart) {
  for (std::size_t depth : {0u, 1u, 5u, 20u}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      EXPECT_NEAR(return_probability(build_ssb_circuit(depth, seed).circuit), 1.0, 1e-9);
      EXPECT_NEAR(return_probability(build_ssb_circuit(depth, seed, 20).circuit), 1.0, 1e-9);
      EXPECT_NEAR(return_probability(build_echo_circuit(depth, seed).circuit), 1.0, 1e-9);
      EXPECT_NEAR(return_probability(build_pi2_benchmark(depth, Pi2Mode::kRandomAxes, seed)), 1.0, 1e-9);
      EXPECT_NEAR(return_probability(build_pi2_benchmark(depth, Pi2Mode::kSamePhase, seed)), 1.0, 1e-9);
    }
  }
}

TEST(Benchmark, SsbCircuitCountsCzAndTracesStates) {
  const BenchmarkCircuit c = build_ssb_circuit(7, 3, 10);
  EXPECT_EQ(c.circuit.count(OpKind::kCz), 7u);
  EXPECT_EQ(c.trace.size(), 11u);
  EXPECT_THROW(build_ssb_circuit(5, 1, 3), ConfigError);
}

TEST(Benchmark, LayerCensusIsUniform) {
  std::vector<BenchmarkCircuit> circuits;
  for (std::uint64_t s = 0; s < 3000; ++s) circuits.push_back(build_ssb_circuit(6, derive_seed(77, s)));
  const auto census = layer_census(circuits);
  ASSERT_EQ(census.size(), 7u);
  for (const auto& row : census) EXPECT_GT(uniformity_p_value(row), 1e-3);
}

TEST(Benchmark, UniformityTestRejectsSkew) {
  EXPECT_GT(uniformity_p_value(std::vector<std::size_t>(12, 100)), 0.99);
  std::vector<std::size_t> skew(12, 100);
  skew[0] = 200;
  EXPECT_LT(uniformity_p_value(skew), 1e-6);
}

TEST(Benchmark, FitDecayRecoversSyntheticParameters) {
  BenchmarkRun run;
  for (std::size_t d : {0u, 4u, 8u, 12u, 16u, 20u}) {
    run.depths.push_back(d);
    run.return_prob.push_back(0.97 * std::pow(0.985, static_cast<double>(d)));
    run.err.push_back(1e-3);
  }
  const DecayFit f = fit_decay(run);
  EXPECT_NEAR(f.p, 0.985, 1e-6);
  EXPECT_NEAR(f.amplitude, 0.97, 1e-6);
  EXPECT_FALSE(f.capped);
  run.depths.resize(2);
  EXPECT_THROW(fit_decay(run), ConfigError);
}

TEST(Benchmark, CzErrorLowersPerGateFidelity) {
  NoiseContext n;
  n.cz_mode = CzMode::kFast;
  n.cz_error = 0.01;
  BenchmarkOptions o;
  o.depths = {0, 5, 10, 15};
  o.circuits_per_depth = 40;
  o.shots_per_circuit = 20;
  o.exact_readout = true;
  const DecayFit f = fit_decay(run_benchmark(BenchmarkFamily::kSsb, o, n));
  // Pauli channel at process infidelity 1.25 e: a fraction of the errors is
  // invisible in the return probability, so p lies between 1 - 1.25 e and 1.
  EXPECT_LT(f.p, 1.0);
  EXPECT_GT(f.p, 1.0 - 1.25 * 0.01 - 0.005);
}

TEST(Benchmark, RunIsSeedReproducible) {
  NoiseContext n;
  n.cz_mode = CzMode::kFast;
  n.cz_error = 0.02;
  BenchmarkOptions o;
  o.depths = {0, 2, 4};
  o.circuits_per_depth = 5;
  o.shots_per_circuit = 10;
  const auto a = run_benchmark(BenchmarkFamily::kEcho, o, n), b = run_benchmark(BenchmarkFamily::kEcho, o, n);
  EXPECT_EQ(a.return_prob, b.return_prob);
  o.depths = {0, 1};
  EXPECT_THROW(run_benchmark(BenchmarkFamily::kEcho, o, n), ConfigError);
}

TEST(Benchmark, LeakageCorrection) {
  const auto c = leakage_correct(0.995, 0.001, 3e-4, 4e-4);
  EXPECT_NEAR(c.value, 0.994, 1e-12);
  EXPECT_NEAR(c.err, 5e-4, 1e-12);
  EXPECT_THROW(leakage_correct(0.99, 0.1), ConfigError);
}

TEST(Benchmark, FamilyNamesRoundTrip) {
  for (auto f : {BenchmarkFamily::kSsb, BenchmarkFamily::kEcho, BenchmarkFamily::kPi2Train, BenchmarkFamily::kPi2Random})
    EXPECT_EQ(family_from_name(family_name(f)), f);
  EXPECT_THROW(family_from_name("rb"), ConfigError);
}

}  // namespace
