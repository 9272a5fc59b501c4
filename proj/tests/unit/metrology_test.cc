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

#include "clockq/metrology.hpp"

namespace {

using namespace clockq;

GainProblem cascade(std::size_t groups, std::size_t copies, ContrastModel c = ContrastModel::perfect()) {
  GainProblem p;
  p.layout = cascade_layout(groups, {copies});
  p.contrast = std::move(c);
  return p;
}

TEST(Metrology, CopiesRequiredRoundsToNearest) {
  EXPECT_EQ(copies_required(1), 1u);
  EXPECT_EQ(copies_required(2), 1u);    // 1.12
  EXPECT_EQ(copies_required(42), 6u);   // 6.06
  EXPECT_EQ(copies_required(100), 7u);  // 7.47
  EXPECT_THROW(copies_required(0), ConfigError);
  EXPECT_NEAR(asymptotic_gain(64), kPi * kPi * 64.0 / (64.0 * std::log(64.0)), 1e-12);
}

TEST(Metrology, LayoutsAndChannels) {
  const CascadeLayout l = cascade_layout(3, {3, 2, 1});
  EXPECT_EQ(l.sizes, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(l.total_atoms(), 3u + 4u + 4u);
  const auto ch = channels_of(l, ContrastModel::fidelity(0.9));
  ASSERT_EQ(ch.size(), 5u);  // 2X+1Y, 1X+1Y, 1X
  EXPECT_FALSE(ch[0].y_quadrature);
  EXPECT_TRUE(ch[1].y_quadrature);
  EXPECT_NEAR(ch[4].contrast, std::pow(0.9, 4.0), 1e-12);
  EXPECT_THROW(cascade_layout(2, {1, 2, 3}), ConfigError);
  EXPECT_THROW(ContrastModel::list({1.2}).at(0, 1), ConfigError);
}

TEST(Metrology, ChannelLikelihoodIsNormalized) {
  for (double c : {0.0, 0.5, 1.0}) {
    for (double phi : {-2.0, 0.0, 0.4, kPi}) {
      const Channel ch{4, c, 5, true};
      const auto l = channel_likelihood(ch, phi);
      EXPECT_NEAR(std::accumulate(l.begin(), l.end(), 0.0), 1.0, 1e-12);
      for (double v : l) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(Metrology, ZeroContrastLeavesThePrior) {
  const CascadeLayout l = uncorrelated_layout(4);
  const PhaseGrid g = make_grid(0.7, PriorMode::kTruncated, 4000);
  const double prior_var = bayes_risk({}, g, CostMode::kSquared);
  EXPECT_NEAR(prior_var, 0.49, 1e-3);
  EXPECT_NEAR(channel_risk(l, ContrastModel::list({0.0}), 0.7, PriorMode::kTruncated, CostMode::kSquared, 4000),
              prior_var, 1e-12);
  EXPECT_LT(channel_risk(l, ContrastModel::perfect(), 0.7, PriorMode::kTruncated, CostMode::kSquared, 4000), prior_var);
}

TEST(Metrology, UncorrelatedLayoutHasUnitGain) {
  GainProblem p;
  p.layout = uncorrelated_layout(12);
  EXPECT_NEAR(estimate_gain(p).gain, 1.0, 1e-12);
}

TEST(Metrology, GainIncreasesWithContrast) {
  double last = 0.0;
  for (double f : {0.95, 0.97, 0.99, 1.0}) {
    const double g = estimate_gain(cascade(3, 6, ContrastModel::fidelity(f))).gain;
    EXPECT_GT(g, last) << "F0 = " << f;
    last = g;
  }
  EXPECT_GT(last, 1.0);
  // Too few copies per size: phase-wrap errors outweigh the GHZ advantage.
  EXPECT_LT(estimate_gain(cascade(3, 2)).gain, 1.0);
}

TEST(Metrology, YQuadratureMirrorsPosterior) {
  // phi -> -phi flips sin(k phi): the Y outcome m maps to n - m and the
  // posterior mean changes sign.
  GainProblem p;
  p.layout = uncorrelated_layout(4);  // two X, two Y copies
  for (std::size_t x = 0; x <= 2; ++x) {
    for (std::size_t y = 0; y <= 2; ++y) {
      EXPECT_NEAR(posterior_stats(p, {x, y}).mean, -posterior_stats(p, {x, 2 - y}).mean, 1e-12);
    }
  }
  EXPECT_LT(posterior_stats(p, {2, 0}).mean, 0.0);
}

TEST(Metrology, MonteCarloMatchesExactRisk) {
  const GainProblem p = cascade(3, 2);
  const GainResult exact = estimate_gain(p);
  for (CostMode cost : {CostMode::kSquared, CostMode::kCircular}) {
    const double risk = channel_risk(p.layout, p.contrast, p.prior_width, p.prior, cost, 0);
    const MonteCarloRisk mc = monte_carlo_risk(p.layout, p.contrast, p.prior_width, p.prior, cost, 20000, 9);
    EXPECT_NEAR(mc.mean, risk, 4.0 * mc.sem) << cost_name(cost);
  }
  EXPECT_NEAR(exact.dphi_c * exact.dphi_c, exact.mse_c, 1e-15);
}

TEST(Metrology, PosteriorStatsForSingleOutcome) {
  GainProblem p;
  p.layout = uncorrelated_layout(1);
  // One X-readout atom with outcome "+": the posterior favours phi near 0.
  const PosteriorStats s = posterior_stats(p, {1});
  EXPECT_NEAR(s.mean, 0.0, 1e-9);
  EXPECT_GT(s.evidence, 0.5);
  EXPECT_THROW(posterior_stats(p, {2}), ConfigError);
}

TEST(Metrology, ThresholdSearchBracketsGainOfOne) {
  const auto family = [](double f) { return cascade(3, 6, ContrastModel::fidelity(f)); };
  const ThresholdResult r = threshold_search(family, 0.90, 1.0, 1e-3);
  EXPECT_LT(r.gain_lo, 1.0);
  EXPECT_GT(r.gain_hi, 1.0);
  EXPECT_GT(r.value, 0.90);
  EXPECT_LT(r.value, 1.0);
  EXPECT_THROW(threshold_search(family, 0.99, 1.0), RuntimeFailure);
}

}  // namespace
