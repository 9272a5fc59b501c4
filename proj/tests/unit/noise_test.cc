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
#include <numeric>
#include <vector>

#include "clockq/noise.hpp"

namespace {

using namespace clockq;

ClockPsd white(double h0, double cap, double fmin = 1.0, double fmax = 1e5) {
  ClockPsd p;
  p.h0 = h0;
  p.H = cap;
  p.f_min = fmin;
  p.f_max = fmax;
  return p;
}

TEST(Psd, PowerLawWithCap) {
  ClockPsd p;
  p.h0 = 0.5;
  p.h_alpha = 50.0;
  p.alpha = 1.0;
  p.H = 10.0;
  EXPECT_DOUBLE_EQ(psd_value_unchecked(p, 100.0), 1.0);
  EXPECT_DOUBLE_EQ(psd_value_unchecked(p, 1.0), 10.0);  // capped
  p.f_min = 1.0;
  p.f_max = 1e3;
  EXPECT_THROW(psd_eval(p, 1e4), ConfigError);
}

TEST(Psd, ScaledMultipliesEverywhere) {
  ClockPsd p;
  p.h0 = 0.2;
  p.h_alpha = 30.0;
  p.alpha = 2.0;
  p.H = 1e6;
  const ClockPsd q = p.scaled(7.0);
  for (double f : {1.0, 10.0, 300.0, 1e4}) EXPECT_NEAR(psd_value_unchecked(q, f), 7.0 * psd_value_unchecked(p, f), 1e-9);
}

TEST(Psd, TableInterpolatesLogLog) {
  ClockPsd p;
  p.table = {{10.0, 1.0}, {1000.0, 100.0}};
  EXPECT_NEAR(psd_value_unchecked(p, 100.0), 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(psd_value_unchecked(p, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(psd_value_unchecked(p, 1e4), 100.0);
}

TEST(Psd, ValidationRejectsNegativeAndBadBands) {
  ClockPsd p;
  p.h0 = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.h0 = 1.0;
  p.f_min = 10.0;
  p.f_max = 5.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.f_max = 50.0;
  p.table = {{5.0, 1.0}, {2.0, 1.0}};
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Trajectory, ZeroPsdGivesZeroTrajectory) {
  const auto tr = sample_trajectory(ClockPsd{}, 0.01, 1e4, 1);
  EXPECT_TRUE(std::all_of(tr.samples.begin(), tr.samples.end(), [](double x) { return x == 0.0; }));
}

TEST(Trajectory, SeedReproducible) {
  const ClockPsd p = white(1.0, 1e3);
  const auto a = sample_trajectory(p, 0.05, 2e4, 3), b = sample_trajectory(p, 0.05, 2e4, 3),
             c = sample_trajectory(p, 0.05, 2e4, 4);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Trajectory, VarianceMatchesIntegratedPsd) {
  // Band-limited white noise: variance = h0 * (f_max - f_min).
  const ClockPsd p = white(2.0, 10.0, 10.0, 1e3);
  double var = 0.0;
  const int m = 200;
  for (int k = 0; k < m; ++k) {
    const auto tr = sample_trajectory(p, 0.1, 1e4, derive_seed(8, k));
    double s2 = 0.0;
    for (double x : tr.samples) s2 += x * x;
    var += s2 / static_cast<double>(tr.samples.size()) / m;
  }
  EXPECT_NEAR(var / (2.0 * (1e3 - 10.0)), 1.0, 0.03);
}

TEST(Trajectory, PeriodogramAverageRecoversPsd) {
  ClockPsd p;
  p.h0 = 1.0;
  p.h_alpha = 200.0;
  p.alpha = 1.0;
  p.H = 1e3;
  p.f_min = 10.0;
  p.f_max = 4e3;
  const int m = 300;
  std::vector<double> acc;
  double df = 0.0;
  for (int k = 0; k < m; ++k) {
    const auto tr = sample_trajectory(p, 0.2, 1e4, derive_seed(21, k));
    const auto pg = periodogram(tr);
    df = tr.sample_rate / static_cast<double>(tr.samples.size());
    if (acc.empty()) acc.assign(pg.size(), 0.0);
    for (std::size_t i = 0; i < pg.size(); ++i) acc[i] += pg[i] / m;
  }
  // Octave bands inside the PSD band.
  for (double lo = 20.0; lo * 2.0 <= 4e3; lo *= 2.0) {
    double sp = 0.0, st = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
      const double f = df * static_cast<double>(i + 1);
      if (f >= lo && f < 2.0 * lo) {
        sp += acc[i];
        st += psd_value_unchecked(p, f);
      }
    }
    EXPECT_NEAR(sp / st, 1.0, 0.1) << "band starting at " << lo << " Hz";
  }
}

TEST(Trajectory, PhaseIntegratesPiecewiseConstantDetuning) {
  FrequencyTrajectory tr;
  tr.sample_rate = 10.0;
  tr.samples = {1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(tr.phase(0.0, 0.2), kTwoPi * 0.3, 1e-12);
  EXPECT_NEAR(tr.phase(0.05, 0.15), kTwoPi * 0.15, 1e-12);
  EXPECT_DOUBLE_EQ(tr.phase(0.2, 0.1), 0.0);
}

TEST(Ramsey, WhiteNoiseCoherenceTimeIsOneOverPiSquaredH) {
  for (double h : {20.0, 60.0}) {
    const ClockPsd p = white(1e6, h, 1.0, 1e5);
    const double t0 = 1.0 / (kPi * kPi * h);
    std::vector<double> t;
    for (int i = 1; i <= 30; ++i) t.push_back(0.1 * t0 * i);
    RamseyOptions o;
    o.seed = 12;
    // 2000 shots: about 4% statistical scatter on the 1/e time.
    const auto c = ramsey_contrast_curve(p, t, 2000, o);
    EXPECT_NEAR(coherence_time_1e(t, c) / t0, 1.0, 0.12) << "H = " << h;
  }
}

TEST(Ramsey, ContrastIsOneWithoutNoise) {
  EXPECT_DOUBLE_EQ(simulate_ramsey(ClockPsd{}, 1e-3, 10), 1.0);
}

TEST(Ramsey, CoherenceTimeInterpolates) {
  const std::vector<double> t{1, 2, 3}, c{0.9, std::exp(-1.0), 0.1};
  EXPECT_NEAR(coherence_time_1e(t, c), 2.0, 1e-9);
  EXPECT_DOUBLE_EQ(coherence_time_1e(t, {0.9, 0.8, 0.7}), 3.0);
}

TEST(SpinLock, RateGrowsWithPsdAndVanishesWithoutNoise) {
  const ClockPsd p = white(0.1, 1e3);
  SpinLockOptions o;
  o.points = 200;
  o.seed = 2;
  // 400 shots keep the shot-to-shot scatter of the rate ratio near 5%.
  const double r1 = simulate_spin_lock(p, 2100.0, 0.3, 400, o).rate;
  const double r4 = simulate_spin_lock(p.scaled(4.0), 2100.0, 0.3, 400, o).rate;
  EXPECT_GT(r1, 0.0);
  EXPECT_NEAR(r4 / r1, 4.0, 0.6);
  const SpinLockResult quiet = simulate_spin_lock(ClockPsd{}, 2100.0, 0.05, 4, o);
  EXPECT_FALSE(quiet.decaying);
  EXPECT_NEAR(quiet.rate, 0.0, 1e-6);
  EXPECT_THROW(simulate_spin_lock(white(0.1, 1e3, 1.0, 100.0), 2100.0, 0.1, 4, o), ConfigError);
}

TEST(Thermal, MeanRabiReduction) {
  const ThermalMotion m{0.5, 0.2};
  Rng rng = make_rng(4, 0);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += sample_thermal_rabi(m, 1.0, rng);
  EXPECT_NEAR(acc / n, 1.0 - 0.04 * (0.5 + 0.5), 2e-3);
  EXPECT_DOUBLE_EQ(sample_thermal_rabi(ThermalMotion{0.0, 0.1}, 2.0, 1u), 2.0 * (1.0 - 0.01 * 0.5));
  EXPECT_THROW(sample_thermal_rabi(ThermalMotion{0.1, 1.5}, 1.0, 1u), ConfigError);
}

}  // namespace
