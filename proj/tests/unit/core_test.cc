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
#include <set>
#include <vector>

#include "clockq/core.hpp"
#include "clockq/fitting.hpp"

namespace {

using namespace clockq;

TEST(Seeds, DeriveSeedIsDeterministicAndStreamSensitive) {
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(42, 8));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(5, s));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Seeds, StreamsReproduceDraws) {
  Rng a = make_rng(9, 3), b = make_rng(9, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(uniform01(a), uniform01(b));
}

TEST(Random, UniformAndNormalMoments) {
  Rng rng = make_rng(1, 0);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = std_normal(rng);
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(Random, UniformIndexCoversRange) {
  Rng rng = make_rng(2, 0);
  std::vector<int> hits(12, 0);
  for (int i = 0; i < 12000; ++i) ++hits[uniform_index(rng, 12)];
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Phase, WrapIntoPrincipalRange) {
  for (double x : {0.0, 1.0, -1.0, 3.0, -3.0, 7.0, -7.0, 100.0}) {
    const double w = wrap_phase(x);
    EXPECT_GT(w, -kPi - 1e-12);
    EXPECT_LE(w, kPi + 1e-12);
    EXPECT_NEAR(std::remainder(w - x, kTwoPi), 0.0, 1e-9);
  }
}

TEST(Require, ThrowsConfigError) {
  EXPECT_NO_THROW(require(true, "fine"));
  EXPECT_THROW(require(false, "bad"), ConfigError);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  auto run = [](int threads) {
    set_threads(threads);
    std::vector<double> out(257);
    parallel_for(out.size(), [&](std::size_t i) {
      Rng r = make_rng(11, i);
      out[i] = uniform01(r);
    });
    set_threads(1);
    return out;
  };
  EXPECT_EQ(run(1), run(3));
}

TEST(Fitting, LineFitExact) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const LineFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Fitting, SimplexFindsQuadraticMinimum) {
  const auto r = simplex_minimize(
      [](const std::vector<double>& x) { return (x[0] - 1.5) * (x[0] - 1.5) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5); },
      {0.0, 0.0}, {0.5, 0.5}, 2000, 1e-8);
  EXPECT_NEAR(r.x[0], 1.5, 1e-3);
  EXPECT_NEAR(r.x[1], -0.5, 1e-3);
}

TEST(Fitting, LeastSquaresRecoversExponential) {
  std::vector<double> t, y;
  for (int i = 0; i < 20; ++i) {
    t.push_back(i);
    y.push_back(0.8 * std::exp(-0.1 * i));
  }
  const auto r = least_squares(
      [&](const std::vector<double>& x, std::vector<double>& res) {
        for (std::size_t i = 0; i < t.size(); ++i) res[i] = y[i] - x[0] * std::exp(-x[1] * t[i]);
      },
      {1.0, 0.2}, t.size(), false);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 0.8, 1e-6);
  EXPECT_NEAR(r.x[1], 0.1, 1e-6);
}

}  // namespace
