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

// Phase-modulated single-pulse Rydberg CZ gate.
//
// Each atom couples |1> <-> |r> with Rabi frequency Omega and laser phase
// phi(t) = sum_k c_k cos(k pi t / T), k = 1..5, at a constant detuning.
// The pulse is calibrated numerically so that the two-atom propagator on
// the qubit subspace is diag(1, e^{i theta}, e^{i theta}, -e^{2 i theta});
// theta is the single-atom phase removed virtually afterwards. Noisy
// dynamics use Monte Carlo wavefunction trajectories.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "json.hpp"

#include "clockq/core.hpp"
#include "clockq/fitting.hpp"
#include "clockq/noise.hpp"
#include "clockq/statevec.hpp"

namespace clockq {

inline constexpr std::size_t kPhaseTerms = 5;
// Time-optimal CZ duration in units of 1/Omega (Omega in rad/s).
inline constexpr double kTimeOptimalOmegaT = 7.612;

struct RydbergPulse {
  double rabi = 5.4e6;                  // Hz
  double detuning = 0.0;                // Hz
  std::array<double, kPhaseTerms> coeffs{};  // rad
  double duration = 0.0;                // s
  double single_atom_phase = 0.0;       // rad, removed with a virtual Z
  double blockade = 0.0;                // Hz; <= 0 or inf means perfect blockade
  double infidelity = 1.0;              // noiseless average-gate infidelity

  bool perfect_blockade() const { return !(blockade > 0.0) || std::isinf(blockade); }

  double phase_at(double t) const {
    double p = 0.0;
    for (std::size_t k = 0; k < kPhaseTerms; ++k)
      p += coeffs[k] * std::cos(static_cast<double>(k + 1) * kPi * t / duration);
    return p;
  }

  // Integrator step count honoring h <= 1 / (200 rabi).
  std::size_t steps() const {
    return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(duration * 200.0 * rabi)));
  }
};

struct RydbergNoise {
  double intensity_rms = 0.0;   // fractional, static per trajectory
  ClockPsd freq_psd{};          // Rydberg laser frequency noise (zero => off)
  double decay_rate = 0.0;      // 1/s out of |r>
  double branch_to_leak = 0.0;  // probability a decay lands outside the qubit
  double branch_to_one = 0.5;   // given no leak, probability of landing in |1>
  double doppler_sigma = 0.0;   // Hz, per-atom static detuning spread

  void validate() const {
    require(intensity_rms >= 0.0, "intensity_rms must be >= 0");
    require(decay_rate >= 0.0, "decay_rate must be >= 0");
    require(branch_to_leak >= 0.0 && branch_to_leak <= 1.0, "branch_to_leak must be in [0,1]");
    require(branch_to_one >= 0.0 && branch_to_one <= 1.0, "branch_to_one must be in [0,1]");
    require(doppler_sigma >= 0.0, "doppler_sigma must be >= 0");
    freq_psd.validate();
  }
  bool is_zero() const {
    return intensity_rms == 0.0 && freq_psd.is_zero() && decay_rate == 0.0 && doppler_sigma == 0.0;
  }
};

using Vec9 = Eigen::Matrix<cplx, 9, 1>;
using Mat9 = Eigen::Matrix<cplx, 9, 9>;

// Per-trajectory control parameters entering the Hamiltonian.
struct DriveSample {
  double omega_scale = 1.0;                 // 1 + intensity offset
  std::array<double, 2> static_detune{0, 0};  // Hz, per atom (Doppler)
  const FrequencyTrajectory* freq = nullptr;  // common laser detuning
  double decay_rate = 0.0;
};

namespace detail {

// Two-atom, three-level Hamiltonian (rad/s) at time t, with an optional
// anti-Hermitian decay term -i gamma/2 sum_i |r><r|_i.
inline Mat9 rydberg_hamiltonian(const RydbergPulse& p, const DriveSample& d, double t) {
  Mat9 h = Mat9::Zero();
  const double omega = kTwoPi * p.rabi * d.omega_scale;
  const cplx c = 0.5 * omega * std::exp(kI * p.phase_at(t));
  const double laser = p.detuning + (d.freq ? d.freq->at(t) : 0.0);
  const bool perfect = p.perfect_blockade();
  for (int la = 0; la < 3; ++la) {
    for (int lb = 0; lb < 3; ++lb) {
      const int i = 3 * la + lb;
      double e = 0.0;
      if (la == 2) e -= kTwoPi * (laser + d.static_detune[0]);
      if (lb == 2) e -= kTwoPi * (laser + d.static_detune[1]);
      if (la == 2 && lb == 2 && !perfect) e += kTwoPi * p.blockade;
      const double nr = static_cast<double>((la == 2) + (lb == 2));
      h(i, i) = cplx{e, -0.5 * d.decay_rate * nr};
      // Atom a: |1> -> |r>.
      if (la == 1) {
        const int j = 3 * 2 + lb;
        if (!(perfect && lb == 2)) { h(j, i) += c; h(i, j) += std::conj(c); }
      }
      if (lb == 1) {
        const int j = 3 * la + 2;
        if (!(perfect && la == 2)) { h(j, i) += c; h(i, j) += std::conj(c); }
      }
    }
  }
  return h;
}

inline Vec9 rk4_step(const RydbergPulse& p, const DriveSample& d, double t, double h, const Vec9& y) {
  const Mat9 h0 = rydberg_hamiltonian(p, d, t);
  const Mat9 h1 = rydberg_hamiltonian(p, d, t + 0.5 * h);
  const Mat9 h2 = rydberg_hamiltonian(p, d, t + h);
  const Vec9 k1 = -kI * (h0 * y);
  const Vec9 k2 = -kI * (h1 * (y + 0.5 * h * k1));
  const Vec9 k3 = -kI * (h1 * (y + 0.5 * h * k2));
  const Vec9 k4 = -kI * (h2 * (y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Reduced dynamics used by the optimizer: |01> block {1, r} with Omega and
// |11> block {11, W, rr} with sqrt(2) Omega; returns (a01, a11).
inline std::pair<cplx, cplx> reduced_amplitudes(const RydbergPulse& p) {
  const std::size_t n = p.steps();
  const double h = p.duration / static_cast<double>(n);
  const double omega = kTwoPi * p.rabi;
  const double delta = kTwoPi * p.detuning;
  const bool perfect = p.perfect_blockade();
  const double v = perfect ? 0.0 : kTwoPi * p.blockade;
  std::array<cplx, 2> s1{1.0, 0.0};
  std::array<cplx, 3> s2{1.0, 0.0, 0.0};
  auto f1 = [&](double t, const std::array<cplx, 2>& y) {
    const cplx c = 0.5 * omega * std::exp(kI * p.phase_at(t));
    return std::array<cplx, 2>{-kI * (std::conj(c) * y[1]), -kI * (c * y[0] - delta * y[1])};
  };
  auto f2 = [&](double t, const std::array<cplx, 3>& y) {
    const cplx c = std::sqrt(2.0) * 0.5 * omega * std::exp(kI * p.phase_at(t));
    std::array<cplx, 3> r{};
    r[0] = -kI * (std::conj(c) * y[1]);
    r[1] = -kI * (c * y[0] - delta * y[1] + (perfect ? 0.0 : 1.0) * std::conj(c) * y[2]);
    r[2] = perfect ? cplx{0.0, 0.0} : -kI * (c * y[1] + (v - 2.0 * delta) * y[2]);
    return r;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * h;
    {
      auto k1 = f1(t, s1);
      std::array<cplx, 2> y{};
      for (int i = 0; i < 2; ++i) y[i] = s1[i] + 0.5 * h * k1[i];
      auto k2 = f1(t + 0.5 * h, y);
      for (int i = 0; i < 2; ++i) y[i] = s1[i] + 0.5 * h * k2[i];
      auto k3 = f1(t + 0.5 * h, y);
      for (int i = 0; i < 2; ++i) y[i] = s1[i] + h * k3[i];
      auto k4 = f1(t + h, y);
      for (int i = 0; i < 2; ++i) s1[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    {
      auto k1 = f2(t, s2);
      std::array<cplx, 3> y{};
      for (int i = 0; i < 3; ++i) y[i] = s2[i] + 0.5 * h * k1[i];
      auto k2 = f2(t + 0.5 * h, y);
      for (int i = 0; i < 3; ++i) y[i] = s2[i] + 0.5 * h * k2[i];
      auto k3 = f2(t + 0.5 * h, y);
      for (int i = 0; i < 3; ++i) y[i] = s2[i] + h * k3[i];
      auto k4 = f2(t + h, y);
      for (int i = 0; i < 3; ++i) s2[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  return {s1[0], s2[0]};
}

}  // namespace detail

// Average gate fidelity of diag(1, a01, a01, a11) to CZ after removing the
// single-atom phase theta:
//   F = (|1 + 2 a01 e^{-i th} - a11 e^{-2 i th}|^2 + 1 + 2|a01|^2 + |a11|^2) / 20
inline double cz_average_fidelity(cplx a01, cplx a11, double theta) {
  const cplx s = 1.0 + 2.0 * a01 * std::exp(-kI * theta) - a11 * std::exp(-2.0 * kI * theta);
  return (std::norm(s) + 1.0 + 2.0 * std::norm(a01) + std::norm(a11)) / 20.0;
}

// Best single-atom phase for given diagonal amplitudes (1-D scan + polish).
inline double best_single_atom_phase(cplx a01, cplx a11) {
  double best = std::arg(a01), bestf = cz_average_fidelity(a01, a11, best);
  for (int k = 0; k < 360; ++k) {
    const double th = kTwoPi * k / 360.0;
    const double f = cz_average_fidelity(a01, a11, th);
    if (f > bestf) { bestf = f; best = th; }
  }
  double step = kTwoPi / 720.0;
  for (int it = 0; it < 60; ++it) {
    const double fp = cz_average_fidelity(a01, a11, best + step);
    const double fm = cz_average_fidelity(a01, a11, best - step);
    if (fp > bestf) { bestf = fp; best += step; }
    else if (fm > bestf) { bestf = fm; best -= step; }
    else step *= 0.5;
  }
  return wrap_phase(best);
}

// Noiseless 9x9 propagator from the full two-atom integrator.
inline Mat9 pulse_propagator(const RydbergPulse& p) {
  DriveSample d;
  Mat9 u;
  const std::size_t n = p.steps();
  const double h = p.duration / static_cast<double>(n);
  for (int col = 0; col < 9; ++col) {
    Vec9 y = Vec9::Zero();
    y(col) = 1.0;
    for (std::size_t k = 0; k < n; ++k) y = detail::rk4_step(p, d, static_cast<double>(k) * h, h, y);
    u.col(col) = y;
  }
  return u;
}

// Qubit-subspace 4x4 block of the calibrated gate followed by the virtual
// Z(-theta) on both atoms; unitary up to integrator error.
inline CMatrix calibrated_cz_matrix(const RydbergPulse& p) {
  const Mat9 u = pulse_propagator(p);
  const int q[4] = {0, 1, 3, 4};
  CMatrix m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = u(q[i], q[j]);
  const cplx z = std::exp(-kI * p.single_atom_phase);
  const cplx zz[4] = {1.0, z, z, z * z};
  for (int i = 0; i < 4; ++i) m.row(i) *= zz[i];
  return m;
}

struct CalibrationOptions {
  std::size_t restarts = 12;
  std::size_t max_iter = 4000;
  std::uint64_t seed = 7;
  double omega_t = kTimeOptimalOmegaT;   // pulse area parameter T * Omega
  double target_infidelity = 1e-5;       // stop early once reached
};

// Calibrates the cosine-series phase profile and detuning by Nelder-Mead
// minimization of the average-gate infidelity, from deterministic
// pseudo-random starting points. Throws RuntimeFailure when the best point
// misses the 1e-4 requirement.
inline RydbergPulse calibrate_pulse(double rabi, double blockade, const CalibrationOptions& opt = {}) {
  require(rabi > 0.0, "rabi must be positive");
  require(!(blockade > 0.0) || std::isinf(blockade) || blockade > 5.0 * rabi,
          "blockade must greatly exceed the Rabi frequency");
  RydbergPulse base;
  base.rabi = rabi;
  base.blockade = blockade;
  base.duration = opt.omega_t / (kTwoPi * rabi);
  auto unpack = [&](const std::vector<double>& x) {
    RydbergPulse p = base;
    for (std::size_t k = 0; k < kPhaseTerms; ++k) p.coeffs[k] = x[k];
    p.detuning = x[kPhaseTerms] * rabi;
    return p;
  };
  auto objective = [&](const std::vector<double>& x) {
    const RydbergPulse p = unpack(x);
    const auto [a01, a11] = detail::reduced_amplitudes(p);
    return 1.0 - cz_average_fidelity(a01, a11, best_single_atom_phase(a01, a11));
  };
  Rng rng = make_rng(opt.seed, 0xca1b);
  SimplexResult best;
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    std::vector<double> x0(kPhaseTerms + 1);
    for (auto& v : x0) v = 1.5 * std_normal(rng);
    x0[kPhaseTerms] = 0.3 * std_normal(rng);
    std::vector<double> step(kPhaseTerms + 1, 0.5);
    auto res = simplex_minimize(objective, x0, step, opt.max_iter, 1e-10);
    // Restart from the optimum with a smaller simplex to escape stalls.
    res = simplex_minimize(objective, res.x, std::vector<double>(kPhaseTerms + 1, 0.05), opt.max_iter, 1e-12);
    if (res.value < best.value) best = res;
    if (best.value < opt.target_infidelity) break;
  }
  RydbergPulse p = unpack(best.x);
  const auto [a01, a11] = detail::reduced_amplitudes(p);
  p.single_atom_phase = best_single_atom_phase(a01, a11);
  p.infidelity = 1.0 - cz_average_fidelity(a01, a11, p.single_atom_phase);
  if (p.infidelity > 1e-4)
    throw RuntimeFailure("CZ calibration did not converge; best infidelity " + std::to_string(p.infidelity));
  return p;
}

// Output of one Monte Carlo wavefunction trajectory.
struct McwfTrajectory {
  Vec9 state = Vec9::Zero();
  std::array<std::uint8_t, 2> leaked{0, 0};
  std::size_t jumps = 0;
};

// One MCWF trajectory through the pulse. Between jumps the state evolves
// under the non-Hermitian Hamiltonian; a jump occurs when the squared norm
// falls below a uniform threshold, picks the decaying atom by its |r>
// population, and routes it to leakage, |1> or |0>. Leaked atoms are parked
// in the uncoupled |0> level with their leak flag set.
inline McwfTrajectory mcwf_trajectory(const RydbergPulse& p, const RydbergNoise& noise, const Vec9& input,
                                      Rng& rng) {
  DriveSample d;
  d.omega_scale = 1.0 + noise.intensity_rms * std_normal(rng);
  d.static_detune = {noise.doppler_sigma * std_normal(rng), noise.doppler_sigma * std_normal(rng)};
  d.decay_rate = noise.decay_rate;
  const std::size_t n = p.steps();
  const double h = p.duration / static_cast<double>(n);
  FrequencyTrajectory ft;
  if (!noise.freq_psd.is_zero()) {
    ft = sample_trajectory(noise.freq_psd, p.duration + h, 1.0 / h, rng());
    d.freq = &ft;
  }
  McwfTrajectory out;
  Vec9 y = input / input.norm();
  double threshold = uniform01(rng);
  for (std::size_t k = 0; k < n; ++k) {
    const double prev = y.squaredNorm();
    y = detail::rk4_step(p, d, static_cast<double>(k) * h, h, y);
    const double now = y.squaredNorm();
    if (now > prev * (1.0 + 1e-6)) throw RuntimeFailure("MCWF integrator unstable: norm grew");
    if (d.decay_rate > 0.0 && now < threshold) {
      // Which atom decays: weight by its Rydberg population.
      double pa = 0.0, pb = 0.0;
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb) {
          const double w = std::norm(y(3 * la + lb));
          if (la == 2) pa += w;
          if (lb == 2) pb += w;
        }
      const int atom = (uniform01(rng) * (pa + pb) < pa) ? 0 : 1;
      const double u = uniform01(rng);
      std::size_t dest = 0;
      bool leak = false;
      if (u < noise.branch_to_leak) leak = true;
      else dest = (uniform01(rng) < noise.branch_to_one) ? 1 : 0;
      Vec9 z = Vec9::Zero();
      for (int la = 0; la < 3; ++la)
        for (int lb = 0; lb < 3; ++lb) {
          const cplx a = y(3 * la + lb);
          if (atom == 0 && la == 2) z(3 * static_cast<int>(dest) + lb) += a;
          if (atom == 1 && lb == 2) z(3 * la + static_cast<int>(dest)) += a;
        }
      y = z / z.norm();
      if (leak) out.leaked[static_cast<std::size_t>(atom)] = 1;
      ++out.jumps;
      threshold = uniform01(rng);
    }
  }
  out.state = y / y.norm();
  return out;
}

inline Vec9 embed_qubit_state(const std::vector<cplx>& q) {
  require(q.size() == 4, "two-atom qubit state must have 4 amplitudes");
  Vec9 v = Vec9::Zero();
  v(0) = q[0]; v(1) = q[1]; v(3) = q[2]; v(4) = q[3];
  return v;
}

// Virtual single-atom phase correction Z(-theta) on both atoms.
inline Vec9 apply_virtual_z(const RydbergPulse& p, Vec9 v) {
  const cplx z = std::exp(-kI * p.single_atom_phase);
  for (int la = 0; la < 3; ++la)
    for (int lb = 0; lb < 3; ++lb) {
      cplx f = 1.0;
      if (la == 1) f *= z;
      if (lb == 1) f *= z;
      v(3 * la + lb) *= f;
    }
  return v;
}

struct McwfResult {
  std::vector<McwfTrajectory> trajectories;
  double mean_fidelity = 0.0;   // mean |<ideal|out>|^2, leaked shots count 0
  double fidelity_sem = 0.0;
  double leak_fraction = 0.0;
};

// Runs `shots` trajectories for a qubit-subspace input state and scores
// each output against the ideal CZ applied to the same input.
inline McwfResult simulate_cz_mcwf(const RydbergPulse& p, const RydbergNoise& noise,
                                   const std::vector<cplx>& input, std::size_t shots, std::uint64_t seed) {
  noise.validate();
  require(shots >= 1, "need at least one trajectory");
  const Vec9 in = embed_qubit_state(input);
  std::vector<cplx> ideal_q = input;
  ideal_q[3] = -ideal_q[3];
  const Vec9 ideal = embed_qubit_state(ideal_q) / embed_qubit_state(ideal_q).norm();
  McwfResult r;
  r.trajectories.resize(shots);
  std::vector<double> fid(shots);
  parallel_for(shots, [&](std::size_t s) {
    Rng rng = make_rng(seed, s);
    auto tr = mcwf_trajectory(p, noise, in, rng);
    tr.state = apply_virtual_z(p, tr.state);
    fid[s] = (tr.leaked[0] || tr.leaked[1]) ? 0.0 : std::norm(ideal.dot(tr.state));
    r.trajectories[s] = tr;
  });
  double m = 0.0, m2 = 0.0;
  std::size_t leaks = 0;
  for (std::size_t s = 0; s < shots; ++s) {
    m += fid[s];
    m2 += fid[s] * fid[s];
    leaks += (r.trajectories[s].leaked[0] || r.trajectories[s].leaked[1]);
  }
  const double n = static_cast<double>(shots);
  r.mean_fidelity = m / n;
  r.fidelity_sem = shots > 1 ? std::sqrt(std::max(0.0, (m2 / n - r.mean_fidelity * r.mean_fidelity) / (n - 1.0))) : 0.0;
  r.leak_fraction = static_cast<double>(leaks) / n;
  return r;
}

// |++> input used for the Bell-state infidelity figure of merit.
inline std::vector<cplx> plus_plus_state() { return {0.5, 0.5, 0.5, 0.5}; }

// Noiseless Bell-state infidelity: |++> through the calibrated gate with
// the virtual Z correction, compared to CZ|++>.
inline double bell_infidelity(const RydbergPulse& p) {
  const Mat9 u = pulse_propagator(p);
  const Vec9 out = apply_virtual_z(p, u * embed_qubit_state(plus_plus_state()));
  const Vec9 ideal = embed_qubit_state({0.5, 0.5, 0.5, -0.5});
  return 1.0 - std::norm(ideal.dot(out));
}

// Fraction of trajectories from |11> (the input that populates |r>) ending
// with a leak flag.
inline double leakage_probability(const RydbergPulse& p, const RydbergNoise& noise, std::size_t shots,
                                  std::uint64_t seed) {
  if (noise.branch_to_leak == 0.0 || noise.decay_rate == 0.0) return 0.0;
  return simulate_cz_mcwf(p, noise, plus_plus_state(), shots, seed).leak_fraction;
}

inline void to_json(nlohmann::json& j, const RydbergPulse& p) {
  j = {{"rabi_hz", p.rabi},
       {"detuning_hz", p.detuning},
       {"phase_coefficients_rad", std::vector<double>(p.coeffs.begin(), p.coeffs.end())},
       {"duration_s", p.duration},
       {"single_atom_phase_rad", p.single_atom_phase},
       {"blockade_hz", p.perfect_blockade() ? nlohmann::json("perfect") : nlohmann::json(p.blockade)},
       {"noiseless_infidelity", p.infidelity},
       {"phase_profile", "sum_k c_k cos(k pi t / T), k = 1..5"}};
}

inline void from_json(const nlohmann::json& j, RydbergPulse& p) {
  p.rabi = j.at("rabi_hz").get<double>();
  p.detuning = j.at("detuning_hz").get<double>();
  const auto c = j.at("phase_coefficients_rad").get<std::vector<double>>();
  require(c.size() == kPhaseTerms, "pulse JSON needs 5 phase coefficients");
  for (std::size_t k = 0; k < kPhaseTerms; ++k) p.coeffs[k] = c[k];
  p.duration = j.at("duration_s").get<double>();
  p.single_atom_phase = j.at("single_atom_phase_rad").get<double>();
  const auto& b = j.at("blockade_hz");
  p.blockade = b.is_string() ? 0.0 : b.get<double>();
  p.infidelity = j.value("noiseless_infidelity", 1.0);
}

inline void from_json(const nlohmann::json& j, RydbergNoise& n) {
  n.intensity_rms = j.value("intensity_rms", 0.0);
  if (j.contains("freq_psd")) n.freq_psd = j.at("freq_psd").get<ClockPsd>();
  n.decay_rate = j.value("decay_rate", 0.0);
  n.branch_to_leak = j.value("branch_to_leak", 0.0);
  n.branch_to_one = j.value("branch_to_one", 0.5);
  n.doppler_sigma = j.value("doppler_sigma", 0.0);
  n.validate();
}

}  // namespace clockq
