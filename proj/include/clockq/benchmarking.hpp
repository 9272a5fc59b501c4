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

#pragma once

// Randomized CZ benchmarking on two clock qubits.
//
// Symmetric stabilizer benchmarking (SSB) keeps the two-qubit state inside
// the 12 swap-symmetric stabilizer states. Every layer is a single-qubit
// Clifford applied identically to both atoms, optionally followed by a CZ;
// both act as permutations of the 12-state set, so a uniformly random
// initial member stays uniformly distributed at every depth. The number of
// Clifford layers is fixed while the number of CZ gates varies, which
// removes the single-qubit error budget from the fitted decay base.
//
// Echo benchmarking interleaves random global pi/2 pulses, a global pi echo
// pulse and a CZ per layer; the single-qubit gate count grows with N_CZ.
//
// Single-qubit Cliffords are compiled into global pi/2 pulses with phases
// in {0, pi/2, pi, 3pi/2} by breadth-first search.

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "clockq/builders.hpp"
#include "clockq/circuit.hpp"
#include "clockq/core.hpp"
#include "clockq/executor.hpp"
#include "clockq/fitting.hpp"
#include "clockq/statevec.hpp"

namespace clockq {

using Vec4 = std::array<cplx, 4>;  // two-qubit amplitudes, atom 0 most significant

namespace detail {

inline cplx inner(const Vec4& a, const Vec4& b) {
  cplx s{0.0, 0.0};
  for (int i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline bool same_ray(const Vec4& a, const Vec4& b, double tol = 1e-9) {
  return std::abs(std::abs(inner(a, b)) - 1.0) < tol;
}

inline bool same_op(const Mat2& a, const Mat2& b, double tol = 1e-9) {
  // Equal up to a global phase: |tr(a^dag b)| = 2.
  const cplx t = std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2] +
                 std::conj(a[3]) * b[3];
  return std::abs(std::abs(t) - 2.0) < tol;
}

inline Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

inline Vec4 apply_both(const Mat2& m, const Vec4& v) {
  Vec4 w{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) w[2 * i + j] += m[2 * i + k] * m[2 * j + l] * v[2 * k + l];
  return w;
}

inline Vec4 apply_cz(Vec4 v) {
  v[3] = -v[3];
  return v;
}

}  // namespace detail

// A single-qubit Clifford as a sequence of pi/2 pulse phases (in units of
// pi/2, applied left to right) together with its unitary.
struct Clifford1 {
  std::vector<int> pulses;
  Mat2 unitary{1.0, 0.0, 0.0, 1.0};
};

inline Mat2 pi2_pulse(int quarter) { return rotation_matrix(kPi / 2, quarter * kPi / 2); }

// The 24 single-qubit Cliffords with shortest pi/2-pulse compilations.
inline const std::vector<Clifford1>& clifford_group() {
  static const std::vector<Clifford1> group = [] {
    std::vector<Clifford1> g{Clifford1{}};
    for (std::size_t head = 0; head < g.size(); ++head) {
      for (int q = 0; q < 4; ++q) {
        Clifford1 next = g[head];
        next.pulses.push_back(q);
        next.unitary = detail::mul(pi2_pulse(q), g[head].unitary);
        const bool seen = std::any_of(g.begin(), g.end(),
                                      [&](const Clifford1& c) { return detail::same_op(c.unitary, next.unitary); });
        if (!seen) g.push_back(std::move(next));
      }
    }
    if (g.size() != 24) throw RuntimeFailure("single-qubit Clifford closure is not 24 elements");
    return g;
  }();
  return group;
}

// All 60 two-qubit stabilizer states, as the orbit of |00> under
// {H, S on either atom, CZ}, each canonicalized to a real positive leading
// amplitude.
inline std::vector<Vec4> enumerate_two_qubit_stabilizers() {
  const double r = 1.0 / std::sqrt(2.0);
  const Mat2 h{r, r, r, -r}, s{1.0, 0.0, 0.0, kI}, id{1.0, 0.0, 0.0, 1.0};
  auto kron_apply = [](const Mat2& a, const Mat2& b, const Vec4& v) {
    Vec4 w{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) w[2 * i + j] += a[2 * i + k] * b[2 * j + l] * v[2 * k + l];
    return w;
  };
  auto canonical = [](Vec4 v) {
    for (const auto& a : v) {
      if (std::abs(a) > 1e-9) {
        const cplx ph = std::conj(a) / std::abs(a);
        for (auto& x : v) x *= ph;
        break;
      }
    }
    return v;
  };
  std::vector<Vec4> states{Vec4{1.0, 0.0, 0.0, 0.0}};
  for (std::size_t head = 0; head < states.size(); ++head) {
    const Vec4 v = states[head];
    const std::array<Vec4, 5> next{kron_apply(h, id, v), kron_apply(id, h, v), kron_apply(s, id, v),
                                   kron_apply(id, s, v), detail::apply_cz(v)};
    for (const auto& n : next) {
      const bool seen = std::any_of(states.begin(), states.end(), [&](const Vec4& x) { return detail::same_ray(x, n); });
      if (!seen) states.push_back(canonical(n));
    }
  }
  return states;
}

inline bool swap_symmetric(const Vec4& v, double tol = 1e-12) { return std::abs(v[1] - v[2]) < tol; }

// Swap-symmetric subset of the 60 stabilizer states. There are 15: the 12
// reachable from |11> by the benchmark gates plus the three triplet states
// with zero spin projection on the X, Y or Z axis (Phi-, Phi+ and Psi+ in
// this phase convention), which no symmetric Clifford or CZ connects to
// the rest.
inline std::vector<Vec4> swap_symmetric_stabilizers() {
  std::vector<Vec4> out;
  for (const auto& v : enumerate_two_qubit_stabilizers())
    if (swap_symmetric(v)) out.push_back(v);
  return out;
}

// Index 0 of the set is |11>, the benchmark start and return state.
struct SymmetricStabilizerSet {
  std::vector<Vec4> states;
  std::vector<std::vector<std::size_t>> clifford_actions;  // [clifford][state] -> state
  std::vector<std::size_t> cz_action;                      // [state] -> state
  std::vector<std::vector<std::size_t>> pulse_actions;     // [quarter 0..3][state], global pi/2
  std::vector<std::size_t> echo_action;                    // global pi pulse, phase 0

  std::size_t size() const { return states.size(); }

  std::size_t find(const Vec4& v) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (detail::same_ray(states[i], v, 1e-8)) return i;
    throw RuntimeFailure("state left the symmetric stabilizer set");
  }
};

// The benchmark set: swap-symmetric stabilizer states in the orbit of |11>
// under {g (x) g for single-qubit Cliffords g, CZ}.
inline SymmetricStabilizerSet enumerate_symmetric_stabilizers() {
  const auto& cl = clifford_group();
  std::vector<Vec4> orbit{Vec4{0.0, 0.0, 0.0, 1.0}};
  for (std::size_t head = 0; head < orbit.size(); ++head) {
    std::vector<Vec4> next;
    for (const auto& c : cl) next.push_back(detail::apply_both(c.unitary, orbit[head]));
    next.push_back(detail::apply_cz(orbit[head]));
    for (const auto& n : next)
      if (std::none_of(orbit.begin(), orbit.end(), [&](const Vec4& x) { return detail::same_ray(x, n); }))
        orbit.push_back(n);
  }
  SymmetricStabilizerSet set;
  set.states.push_back(orbit[0]);
  for (const auto& v : swap_symmetric_stabilizers()) {
    if (detail::same_ray(v, set.states[0])) continue;
    if (std::any_of(orbit.begin(), orbit.end(), [&](const Vec4& x) { return detail::same_ray(x, v); }))
      set.states.push_back(v);
  }
  if (set.states.size() != 12 || orbit.size() != 12)
    throw RuntimeFailure("symmetric stabilizer enumeration found " + std::to_string(set.states.size()) +
                         " states, expected 12");
  set.clifford_actions.assign(cl.size(), std::vector<std::size_t>(12));
  for (std::size_t g = 0; g < cl.size(); ++g)
    for (std::size_t i = 0; i < 12; ++i)
      set.clifford_actions[g][i] = set.find(detail::apply_both(cl[g].unitary, set.states[i]));
  set.cz_action.resize(12);
  set.echo_action.resize(12);
  set.pulse_actions.assign(4, std::vector<std::size_t>(12));
  for (std::size_t i = 0; i < 12; ++i) {
    set.cz_action[i] = set.find(detail::apply_cz(set.states[i]));
    set.echo_action[i] = set.find(detail::apply_both(rotation_matrix(kPi, 0.0), set.states[i]));
    for (int q = 0; q < 4; ++q) set.pulse_actions[q][i] = set.find(detail::apply_both(pi2_pulse(q), set.states[i]));
  }
  return set;
}

inline const SymmetricStabilizerSet& symmetric_stabilizers() {
  static const SymmetricStabilizerSet set = enumerate_symmetric_stabilizers();
  return set;
}

// A short (Clifford, optional CZ, Clifford) move between two members.
struct SetMove {
  std::size_t g1 = 0;
  bool cz = false;
  std::size_t g2 = 0;
  std::size_t pulses = 0;
};

// Cheapest move (fewest pi/2 pulses, then no CZ) from state a to state b.
inline SetMove find_move(std::size_t a, std::size_t b) {
  const auto& set = symmetric_stabilizers();
  const auto& cl = clifford_group();
  SetMove best;
  bool found = false;
  for (int use_cz = 0; use_cz < 2; ++use_cz) {
    for (std::size_t g1 = 0; g1 < cl.size(); ++g1) {
      std::size_t s = set.clifford_actions[g1][a];
      if (use_cz) s = set.cz_action[s];
      for (std::size_t g2 = 0; g2 < (use_cz ? cl.size() : 1); ++g2) {
        if (set.clifford_actions[g2][s] != b) continue;
        const std::size_t cost = cl[g1].pulses.size() + cl[g2].pulses.size() + (use_cz ? 100 : 0);
        if (!found || cost < best.pulses + (best.cz ? 100 : 0)) {
          best = {g1, use_cz == 1, g2, cl[g1].pulses.size() + cl[g2].pulses.size()};
          found = true;
        }
      }
    }
  }
  if (!found) throw RuntimeFailure("no (Clifford, CZ, Clifford) move between set members");
  return best;
}

namespace detail {

inline void emit_clifford(CircuitBuilder& b, std::size_t g) {
  for (int q : clifford_group()[g].pulses) b.global(kPi / 2, q * kPi / 2);
}

inline void emit_move(CircuitBuilder& b, const SetMove& m) {
  emit_clifford(b, m.g1);
  if (m.cz) b.cz({0, 1});
  if (m.cz) emit_clifford(b, m.g2);
}

}  // namespace detail

// A generated benchmark circuit with its noiseless layer-wise state trace
// (index into the symmetric set before each Clifford layer).
struct BenchmarkCircuit {
  Circuit circuit;
  std::vector<std::size_t> trace;
  std::size_t n_cz = 0;
};

// SSB circuit: Uinit prepares a uniformly random set member from |11>;
// `layers` Clifford layers follow, the first n_cz of which carry a CZ;
// Urec returns to |11>. layers defaults to n_cz (no CZ-free layers).
inline BenchmarkCircuit build_ssb_circuit(std::size_t n_cz, std::uint64_t seed, std::size_t layers = 0,
                                          const BuilderConfig& cfg = {}) {
  if (layers == 0) layers = n_cz;
  require(layers >= n_cz, "SSB needs at least as many Clifford layers as CZ gates");
  const auto& set = symmetric_stabilizers();
  Rng rng = make_rng(seed, 0x55b);
  BenchmarkCircuit out;
  out.n_cz = n_cz;
  CircuitBuilder b("ssb", 2, cfg);
  std::size_t s = uniform_index(rng, set.size());
  detail::emit_move(b, find_move(0, s));
  for (std::size_t l = 0; l < layers; ++l) {
    out.trace.push_back(s);
    const std::size_t g = uniform_index(rng, clifford_group().size());
    detail::emit_clifford(b, g);
    s = set.clifford_actions[g][s];
    if (l < n_cz) {
      b.cz({0, 1});
      s = set.cz_action[s];
    }
  }
  out.trace.push_back(s);
  detail::emit_move(b, find_move(s, 0));
  out.circuit = b.measure().build();
  return out;
}

// Echo circuit: from |11>, each layer is a random global pi/2 pulse about
// +-X or +-Y, a global X pi echo pulse and a CZ; a set move returns to |11>.
inline BenchmarkCircuit build_echo_circuit(std::size_t n_cz, std::uint64_t seed, const BuilderConfig& cfg = {}) {
  const auto& set = symmetric_stabilizers();
  Rng rng = make_rng(seed, 0xec0);
  BenchmarkCircuit out;
  out.n_cz = n_cz;
  CircuitBuilder b("echo", 2, cfg);
  std::size_t s = 0;
  for (std::size_t l = 0; l < n_cz; ++l) {
    out.trace.push_back(s);
    const int q = static_cast<int>(uniform_index(rng, 4));
    b.global(kPi / 2, q * kPi / 2).global(kPi, 0.0).cz({0, 1});
    s = set.cz_action[set.echo_action[set.pulse_actions[q][s]]];
  }
  out.trace.push_back(s);
  detail::emit_move(b, find_move(s, 0));
  out.circuit = b.measure().build();
  return out;
}

enum class Pi2Mode { kSamePhase, kRandomAxes };

// Single-atom pi/2 pulse train from |1>. Same-phase mode uses phase 0
// throughout; random-axes mode draws each phase from {0, pi/2, pi, 3pi/2}.
// A recovery of at most two pi/2 pulses returns the atom to |1>.
inline Circuit build_pi2_benchmark(std::size_t n_pulses, Pi2Mode mode, std::uint64_t seed,
                                   const BuilderConfig& cfg = {}) {
  Rng rng = make_rng(seed, 0x912);
  CircuitBuilder b(mode == Pi2Mode::kSamePhase ? "pi2_train" : "pi2_random", 1, cfg);
  Mat2 u{1.0, 0.0, 0.0, 1.0};
  for (std::size_t k = 0; k < n_pulses; ++k) {
    const int q = mode == Pi2Mode::kSamePhase ? 0 : static_cast<int>(uniform_index(rng, 4));
    b.global(kPi / 2, q * kPi / 2);
    u = detail::mul(pi2_pulse(q), u);
  }
  // Shortest Clifford bringing u|1> back to |1> (up to phase).
  const Mat2 target = u;
  const Clifford1* best = nullptr;
  for (const auto& c : clifford_group()) {
    const Mat2 m = detail::mul(c.unitary, target);
    if (std::abs(m[3]) > 1.0 - 1e-9 && (!best || c.pulses.size() < best->pulses.size())) best = &c;
  }
  if (!best) throw RuntimeFailure("pi/2 train recovery not found");
  for (int q : best->pulses) b.global(kPi / 2, q * kPi / 2);
  return b.measure().build();
}

// Layer-wise census: counts[d][i] is the number of circuits in state i
// before Clifford layer d (d = layers is the pre-recovery state).
inline std::vector<std::vector<std::size_t>> layer_census(const std::vector<BenchmarkCircuit>& circuits) {
  std::size_t depth = 0;
  for (const auto& c : circuits) depth = std::max(depth, c.trace.size());
  std::vector<std::vector<std::size_t>> counts(depth, std::vector<std::size_t>(12, 0));
  for (const auto& c : circuits)
    for (std::size_t d = 0; d < c.trace.size(); ++d) ++counts[d][c.trace[d]];
  return counts;
}

// Pearson chi-square uniformity test; returns the p-value.
inline double uniformity_p_value(const std::vector<std::size_t>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  require(n > 0.0 && counts.size() > 1, "uniformity test needs counts");
  const double e = n / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
  return gsl_cdf_chisq_Q(chi2, static_cast<double>(counts.size() - 1));
}

enum class BenchmarkFamily { kSsb, kEcho, kPi2Train, kPi2Random };

inline const char* family_name(BenchmarkFamily f) {
  switch (f) {
    case BenchmarkFamily::kSsb: return "ssb";
    case BenchmarkFamily::kEcho: return "echo";
    case BenchmarkFamily::kPi2Train: return "pi2_train";
    case BenchmarkFamily::kPi2Random: return "pi2_random";
  }
  return "?";
}

inline BenchmarkFamily family_from_name(const std::string& s) {
  for (auto f : {BenchmarkFamily::kSsb, BenchmarkFamily::kEcho, BenchmarkFamily::kPi2Train, BenchmarkFamily::kPi2Random})
    if (s == family_name(f)) return f;
  throw ConfigError("unknown benchmark family '" + s + "'");
}

struct BenchmarkOptions {
  std::vector<std::size_t> depths;     // N_CZ (or N_pulses for pi/2 trains)
  std::size_t circuits_per_depth = 20;
  std::size_t shots_per_circuit = 100;
  std::size_t ssb_layers = 0;          // 0 => max(depths)
  // Use the exact return probability of each noisy shot instead of a
  // sampled bit: removes projection noise, keeps noise-realization noise.
  bool exact_readout = false;
  std::uint64_t seed = 1;

  void validate() const {
    require(depths.size() >= 3, "benchmarking needs at least 3 depths");
    require(circuits_per_depth >= 1 && shots_per_circuit >= 1, "circuit and shot counts must be >= 1");
  }
};

struct BenchmarkRun {
  BenchmarkFamily family = BenchmarkFamily::kSsb;
  std::vector<std::size_t> depths;
  std::vector<double> return_prob;
  std::vector<double> err;
};

inline Circuit benchmark_circuit(BenchmarkFamily f, std::size_t depth, std::uint64_t seed, std::size_t ssb_layers,
                                 const BuilderConfig& cfg) {
  switch (f) {
    case BenchmarkFamily::kSsb: return build_ssb_circuit(depth, seed, ssb_layers, cfg).circuit;
    case BenchmarkFamily::kEcho: return build_echo_circuit(depth, seed, cfg).circuit;
    case BenchmarkFamily::kPi2Train: return build_pi2_benchmark(depth, Pi2Mode::kSamePhase, seed, cfg);
    case BenchmarkFamily::kPi2Random: return build_pi2_benchmark(depth, Pi2Mode::kRandomAxes, seed, cfg);
  }
  throw ConfigError("unknown benchmark family");
}

// Return probability of the all-ones register for one circuit. Shot k of
// circuit c uses stream derive_seed(seed, c, k) so runs with scaled noise
// share their random numbers (common random numbers).
inline std::vector<double> circuit_return_probabilities(const Circuit& c, const NoiseContext& ctx, std::size_t shots,
                                                        std::uint64_t seed, bool exact) {
  std::vector<double> p(shots);
  parallel_for(shots, [&](std::size_t k) {
    ShotRunner r(c, ctx, seed, k);
    if (exact) {
      r.run_unitary_part();
      const auto& st = r.state();
      std::vector<std::size_t> lv(c.num_atoms, 1);
      p[k] = std::norm(st.amps[basis_index(lv, st.levels)]);
    } else {
      const auto rec = r.finish();
      p[k] = std::all_of(rec.bits.begin(), rec.bits.end(), [](auto b) { return b == 1; }) ? 1.0 : 0.0;
    }
  });
  return p;
}

inline BenchmarkRun run_benchmark(BenchmarkFamily family, const BenchmarkOptions& opt, const NoiseContext& ctx,
                                  const BuilderConfig& cfg = {}) {
  opt.validate();
  ctx.validate();
  BenchmarkRun run;
  run.family = family;
  run.depths = opt.depths;
  const std::size_t layers =
      opt.ssb_layers > 0 ? opt.ssb_layers : *std::max_element(opt.depths.begin(), opt.depths.end());
  for (std::size_t di = 0; di < opt.depths.size(); ++di) {
    std::vector<double> means(opt.circuits_per_depth);
    for (std::size_t ci = 0; ci < opt.circuits_per_depth; ++ci) {
      const std::uint64_t cseed = derive_seed(opt.seed, di, ci);
      const Circuit c = benchmark_circuit(family, opt.depths[di], cseed, layers, cfg);
      const auto p = circuit_return_probabilities(c, ctx, opt.shots_per_circuit, derive_seed(cseed, 0xbe7),
                                                  opt.exact_readout);
      double m = 0.0;
      for (double x : p) m += x;
      means[ci] = m / static_cast<double>(p.size());
    }
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    const double n = static_cast<double>(means.size());
    double err = means.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    // Floor at the binomial error of the pooled shots (never zero).
    const double pooled = n * static_cast<double>(opt.shots_per_circuit);
    const double pc = std::clamp(mean, 0.5 / pooled, 1.0 - 0.5 / pooled);
    err = std::max(err, opt.exact_readout ? 1e-9 : std::sqrt(pc * (1.0 - pc) / pooled));
    run.return_prob.push_back(mean);
    run.err.push_back(err);
  }
  return run;
}

struct DecayFit {
  double amplitude = 0.0, amplitude_err = 0.0;
  double p = 0.0, p_err = 0.0;  // per-gate fidelity proxy
  double chi2_per_dof = 0.0;
  bool capped = false;          // non-decaying data: p capped at 1
};

// Weighted fit of P(N) = A p^N.
inline DecayFit fit_decay(const BenchmarkRun& run) {
  require(run.depths.size() >= 3 && run.depths.size() == run.return_prob.size() &&
              run.err.size() == run.return_prob.size(),
          "fit_decay needs >= 3 depths with errors");
  for (double p : run.return_prob) require(p >= 0.0 && p <= 1.0, "return probabilities must be in [0,1]");
  const std::size_t m = run.depths.size();
  auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
    for (std::size_t i = 0; i < m; ++i) {
      const double model = x[0] * std::pow(x[1], static_cast<double>(run.depths[i]));
      r[i] = (run.return_prob[i] - model) / run.err[i];
    }
  };
  double a0 = run.return_prob.front();
  double p0 = 0.99;
  const double n0 = static_cast<double>(run.depths.front()), n1 = static_cast<double>(run.depths.back());
  if (run.return_prob.front() > 0.0 && run.return_prob.back() > 0.0 && n1 > n0) {
    p0 = std::clamp(std::pow(run.return_prob.back() / run.return_prob.front(), 1.0 / (n1 - n0)), 0.5, 1.0);
    a0 = run.return_prob.front() / std::pow(p0, n0);
  }
  const auto ls = least_squares(residual, {a0, p0}, m, false);
  DecayFit f;
  f.amplitude = ls.x[0];
  f.p = ls.x[1];
  f.amplitude_err = ls.stderr_[0];
  f.p_err = ls.stderr_[1];
  f.chi2_per_dof = m > 2 ? ls.chi2 / static_cast<double>(m - 2) : 0.0;
  if (f.p > 1.0) {
    f.p = 1.0;
    f.capped = true;
  }
  return f;
}

struct CorrectedFidelity {
  double value = 0.0, err = 0.0;
};

// First-order removal of the false-bright contribution of leakage.
inline CorrectedFidelity leakage_correct(double fidelity, double leak_per_gate, double fidelity_err = 0.0,
                                         double leak_err = 0.0) {
  require(leak_per_gate >= 0.0 && leak_per_gate <= 0.01, "leak_per_gate must be in [0, 0.01]");
  return {fidelity - leak_per_gate, std::hypot(fidelity_err, leak_err)};
}

inline void write_benchmark_csv(const BenchmarkRun& run, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << "n_cz,return_prob,err\n";
  f.precision(12);
  for (std::size_t i = 0; i < run.depths.size(); ++i)
    f << run.depths[i] << ',' << run.return_prob[i] << ',' << run.err[i] << '\n';
}

inline nlohmann::json benchmark_summary(const BenchmarkRun& run, const DecayFit& fit, double leak_per_gate = 0.0,
                                        double leak_err = 0.0) {
  const auto corr = leakage_correct(fit.p, leak_per_gate, fit.p_err, leak_err);
  return {{"family", family_name(run.family)},
          {"p", fit.p},
          {"p_err", fit.p_err},
          {"amplitude", fit.amplitude},
          {"amplitude_err", fit.amplitude_err},
          {"chi2_per_dof", fit.chi2_per_dof},
          {"capped", fit.capped},
          {"leak_per_gate", leak_per_gate},
          {"leakage_corrected", corr.value},
          {"leakage_corrected_err", corr.err}};
}

}  // namespace clockq
