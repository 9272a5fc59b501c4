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

// Standalone oracle verification: prints a pass/fail table of the
// reference implementations' self-consistency checks. Uses no library code.

#include <cmath>
#include <cstdio>
#include <string>

#include "oracles.hpp"

namespace {

int failures = 0;

void row(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%-4s  %-58s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  failures += !ok;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

int main() {
  using namespace oracle;
  std::printf("oracle verification table\n");

  const auto states = enumerate_all_stabilizer_states();
  row("two-qubit stabilizer states enumerated by tableau", states.size() == 60,
      fmt("count = %.0f (expected 60)", static_cast<double>(states.size())));

  bool roundtrip = true;
  for (const auto& s : states) roundtrip &= stabilizes(s.g1, s.vector) && stabilizes(s.g2, s.vector);
  row("tableau -> state vector round trip (g|psi> = |psi>)", roundtrip, "all generators stabilize their state");

  bool distinct = true;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) distinct &= overlap2(states[i].vector, states[j].vector) < 1 - 1e-9;
  row("distinct stabilizer groups give distinct rays", distinct, "pairwise |<a|b>|^2 < 1");

  const double r = 1 / std::sqrt(2.0);
  const Vec4 bells[4] = {{r, 0, 0, r}, {r, 0, 0, -r}, {0, r, r, 0}, {0, r, -r, 0}};
  int found = 0;
  for (const auto& b : bells)
    for (const auto& s : states) found += overlap2(b, s.vector) > 1 - 1e-12;
  row("all four Bell states are stabilizer states", found == 4, fmt("found %.0f of 4", found));

  int sym = 0;
  for (const auto& s : states) sym += swap_symmetric(s);
  row("swap-symmetric states (SWAP|psi> = |psi>)", sym == 15,
      fmt("count = %.0f (6 product + 9 entangled)", sym));

  const auto ideal = forward_spam_tree(0, 0);
  row("forward SPAM tree, eps = 0 is the identity",
      std::abs(ideal.p00 - 0.5) < 1e-12 && std::abs(ideal.p11 - 0.5) < 1e-12 && std::abs(ideal.contrast - 1) < 1e-12,
      fmt("P00 = %.6f, C = %.6f", ideal.p00, ideal.contrast));

  const double el = 1e-4;
  const auto loss = forward_spam_tree(el, 0);
  const double w = (loss.p00 - 0.5 * (1 - 2 * el)) / (2 * el);
  const double c8 = std::pow(std::cos(kPi / 8), 2);
  row("lost-atom branch adds cos^2(pi/8) weight to P00", std::abs(w - c8) < 1e-3,
      fmt("weight = %.6f, cos^2(pi/8) = %.6f", w, c8));

  const double ed = 1e-4;
  const auto dec = forward_spam_tree(0, ed);
  row("decay branch: +eps_d/2 on P00 and P11, -eps_d on contrast",
      std::abs((dec.p11 - 0.5 * (1 - 2 * ed)) / ed - 0.5) < 1e-3 &&
          std::abs((dec.contrast - (1 - 2 * ed)) / ed + 1.0) < 1e-3,
      fmt("dP11/eps = %.4f, dC/eps = %.4f", (dec.p11 - 0.5 * (1 - 2 * ed)) / ed, (dec.contrast - (1 - 2 * ed)) / ed));

  row("closed-form parity, N = 1 single-atom fringe",
      std::abs(closed_form_parity(1, 1, 0.3) + std::sin(0.3)) < 1e-12, "P(phi) = -sin(phi)");
  row("closed-form parity, N = 4 zero crossing at pi/8", std::abs(closed_form_parity(4, 1, kPi / 8)) < 1e-12,
      "quarter period");

  const double mc = brute_force_mse(cascade_copies(2, 2), 0.7);
  const double mu = brute_force_mse(uncorrelated_copies(6), 0.7);
  row("brute-force gain, {1,2} x 2 copies vs 6 atoms", mc > 0 && mu > 0 && std::isfinite(mu / mc),
      fmt("mse_c = %.6f, g = %.4f", mc, mu / mc));
  const double mc2 = brute_force_mse(cascade_copies(2, 2), 0.7, 8000);
  row("brute-force quadrature converged", std::abs(mc2 - mc) < 1e-9 * mc + 1e-12, fmt("delta = %.2e", mc2 - mc));

  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
