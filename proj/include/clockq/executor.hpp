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

// Noisy circuit executor.
//
// Every shot draws one clock-laser detuning trajectory spanning the whole
// circuit. Idle, transport and every other timed op imprint the detuning
// phase on |1> of each atom (laser-frame convention); rotations integrate
// the mean detuning over the pulse exactly. Thermal motion rescales each
// atom's Rabi frequency once per shot. CZ gates are either ideal, ideal plus
// a random two-qubit Pauli error at a configured infidelity (fast mode), or
// full Monte Carlo wavefunction pulses (two-atom registers only).

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "clockq/circuit.hpp"
#include "clockq/core.hpp"
#include "clockq/noise.hpp"
#include "clockq/rydberg.hpp"
#include "clockq/shots.hpp"
#include "clockq/statevec.hpp"

namespace clockq {

struct ShelvingModel {
  double success_prob = 1.0;        // one-way shelving herald rate
  double unshelve_coherence = 1.0;  // contrast multiplier on unshelve
  double toggle_error = 0.0;        // probability of a phase flip on unshelve

  void validate() const {
    require(success_prob >= 0.0 && success_prob <= 1.0, "shelving success_prob must be in [0,1]");
    require(unshelve_coherence >= 0.0 && unshelve_coherence <= 1.0, "unshelve_coherence must be in [0,1]");
    require(toggle_error >= 0.0 && toggle_error <= 1.0, "toggle_error must be in [0,1]");
  }
};

struct ReadoutModel {
  double f0 = 1.0;  // P(read 0 | true 0)
  double f1 = 1.0;  // P(read 1 | true 1)
};

enum class CzMode { kIdeal, kFast, kMcwf };

struct NoiseContext {
  ClockPsd clock_psd{};              // zero PSD => no laser noise
  double trajectory_rate = 200e3;    // Hz, trajectory sampling rate
  double max_trajectory_duration = 1.0;  // s, guard
  double detuning = 0.0;             // Hz, deterministic laser detuning
  double clock_rabi = 2100.0;        // Hz, nominal clock Rabi frequency
  ThermalMotion thermal{};
  CzMode cz_mode = CzMode::kIdeal;
  double cz_error = 0.0;             // average-gate infidelity in fast mode
  RydbergPulse pulse{};              // MCWF mode
  RydbergNoise rydberg_noise{};      // MCWF mode
  ShelvingModel shelving{};
  ReadoutModel readout{};
  double reuse_survival = 0.965;     // survival after imaging an ancilla for reuse

  void validate() const {
    clock_psd.validate();
    thermal.validate();
    shelving.validate();
    require(trajectory_rate > 0.0, "trajectory_rate must be positive");
    require(clock_rabi > 0.0, "clock_rabi must be positive");
    require(cz_error >= 0.0 && cz_error <= 0.75, "cz_error must be in [0, 0.75]");
    require(readout.f0 > 0.5 && readout.f0 <= 1.0 && readout.f1 > 0.5 && readout.f1 <= 1.0,
            "readout fidelities must be in (0.5, 1]");
    require(reuse_survival >= 0.0 && reuse_survival <= 1.0, "reuse_survival must be in [0,1]");
  }
};

// Scales every single-qubit error source so its infidelity contribution is
// multiplied by k: laser PSD by k and the Lamb-Dicke parameter by k^(1/4)
// (thermal rotation infidelity scales as eta^4).
inline NoiseContext scale_single_qubit_errors(NoiseContext ctx, double k) {
  ctx.clock_psd = ctx.clock_psd.scaled(k);
  ctx.thermal.eta *= std::pow(k, 0.25);
  return ctx;
}

// Exact 2x2 propagator of a pulse of area theta and phase phi, lasting tau
// seconds, under a constant detuning delta (Hz) in the laser frame.
inline Mat2 detuned_rotation(double theta, double phi, double tau, double delta) {
  if (delta == 0.0 || tau == 0.0) return rotation_matrix(theta, phi);
  const double ax = 0.5 * theta * std::cos(phi), ay = 0.5 * theta * std::sin(phi);
  const double az = kPi * delta * tau;
  const double a = std::sqrt(ax * ax + ay * ay + az * az);
  const double c = std::cos(a), s = (a > 0.0 ? std::sin(a) / a : 1.0);
  const cplx g = std::exp(kI * az);  // restores diag(0, -2 pi delta) reference
  return {g * cplx{c, -s * az}, g * (-kI * s * cplx{ax, -ay}),
          g * (-kI * s * cplx{ax, ay}), g * cplx{c, s * az}};
}

// Per-shot executor state; also used with forced outcomes for exact
// branch analysis in tests.
class ShotRunner {
 public:
  ShotRunner(const Circuit& c, const NoiseContext& ctx, std::uint64_t seed, std::uint64_t shot)
      : circuit_(c), ctx_(ctx), rng_(make_rng(seed, shot)) {
    const bool mcwf = ctx.cz_mode == CzMode::kMcwf;
    if (mcwf) require(c.num_atoms == 2, "MCWF CZ mode supports two-atom registers only");
    state_ = init_state(c.num_atoms, mcwf ? 3 : 2, std::vector<std::size_t>(c.num_atoms, 1));
    record_.index = shot;
    record_.herald.assign(c.num_atoms, 1);
    shelved_.assign(c.num_atoms, 0);
    rabi_scale_.assign(c.num_atoms, 1.0);
    if (ctx.thermal.nbar > 0.0 || ctx.thermal.eta > 0.0)
      for (auto& s : rabi_scale_) s = sample_thermal_rabi(ctx.thermal, 1.0, rng_);
    if (!ctx.clock_psd.is_zero()) {
      const double dur = c.duration();
      if (dur > ctx.max_trajectory_duration)
        throw RuntimeFailure("circuit exceeds the configured trajectory duration");
      // Spectral synthesis has no content below 1/window, so the window is
      // padded well beyond the circuit to keep slow phase diffusion.
      const double window = std::min(std::max(ctx.max_trajectory_duration, dur + 2.0 / ctx.trajectory_rate),
                                     std::max(8.0 * dur, dur + 2.0 / ctx.trajectory_rate));
      traj_ = sample_trajectory(ctx.clock_psd, window, ctx.trajectory_rate,
                                derive_seed(seed, shot, 0x7ac));
    }
  }

  // Forces mid-circuit outcomes (entries < 0 are sampled).
  void force_outcomes(std::vector<int> f) { forced_ = std::move(f); }

  // Runs ops up to (excluding) the final measurement.
  void run_unitary_part() {
    for (; pc_ < circuit_.ops.size(); ++pc_) {
      const CircuitOp& op = circuit_.ops[pc_];
      if (op.kind == OpKind::kFinalMeasure) return;
      apply(op);
    }
  }

  ShotRecord finish() {
    run_unitary_part();
    std::vector<double> cdf = probabilities(state_);
    std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
    const std::size_t idx = sample_index(cdf, rng_);
    record_outcome(state_, idx, record_);
    for (std::size_t a = 0; a < state_.num_atoms; ++a) {
      if (record_.leaked[a]) continue;
      const double u = uniform01(rng_);
      if (record_.bits[a] == 0 && u > ctx_.readout.f0) record_.bits[a] = 1;
      else if (record_.bits[a] == 1 && u > ctx_.readout.f1) record_.bits[a] = 0;
    }
    return record_;
  }

  const QuantumState& state() const { return state_; }
  double branch_probability() const { return branch_prob_; }
  const ShotRecord& record() const { return record_; }

 private:
  double detuning_phase(double t0, double t1) const {
    double ph = kTwoPi * ctx_.detuning * (t1 - t0);
    if (traj_) ph += traj_->phase(t0, t1);
    return ph;
  }

  // Idle phase on every atom not listed in `skip`.
  void idle_all(double t0, double t1, const std::vector<std::size_t>& skip = {}) {
    if (t1 <= t0) return;
    const double ph = detuning_phase(t0, t1);
    if (ph == 0.0) return;
    for (std::size_t a = 0; a < state_.num_atoms; ++a) {
      if (std::find(skip.begin(), skip.end(), a) != skip.end()) continue;
      apply_mat2_inplace(state_, a, phase_matrix(ph));
    }
  }

  void rotate(const std::vector<std::size_t>& atoms, double theta, double phi, double t0, double tau) {
    const double delta = tau > 0.0 ? detuning_phase(t0, t0 + tau) / (kTwoPi * tau) : 0.0;
    for (auto a : atoms) {
      if (shelved_[a]) continue;
      apply_mat2_inplace(state_, a, detuned_rotation(theta * rabi_scale_[a], phi, tau, delta));
    }
  }

  void apply_pauli(std::size_t atom, int which) {
    static const Mat2 x{0.0, 1.0, 1.0, 0.0};
    static const Mat2 y{0.0, -kI, kI, 0.0};
    static const Mat2 z{1.0, 0.0, 0.0, -1.0};
    if (which == 1) apply_mat2_inplace(state_, atom, x);
    if (which == 2) apply_mat2_inplace(state_, atom, y);
    if (which == 3) apply_mat2_inplace(state_, atom, z);
  }

  void cz(std::size_t a, std::size_t b) {
    switch (ctx_.cz_mode) {
      case CzMode::kIdeal:
        cz_inplace(state_, a, b);
        break;
      case CzMode::kFast: {
        cz_inplace(state_, a, b);
        // Pauli channel with process infidelity 5/4 of the average-gate one.
        const double p = 1.25 * ctx_.cz_error;
        if (p > 0.0 && uniform01(rng_) < p) {
          const int k = 1 + static_cast<int>(uniform_index(rng_, 15));
          apply_pauli(a, k / 4);
          apply_pauli(b, k % 4);
        }
        break;
      }
      case CzMode::kMcwf: {
        Vec9 v;
        for (int i = 0; i < 9; ++i) v(i) = state_.amps[static_cast<std::size_t>(i)];
        if (a == 1) {  // keep (first, second) ordering of the pulse model
          Vec9 w;
          for (int la = 0; la < 3; ++la)
            for (int lb = 0; lb < 3; ++lb) w(3 * lb + la) = v(3 * la + lb);
          v = w;
        }
        auto tr = mcwf_trajectory(ctx_.pulse, ctx_.rydberg_noise, v, rng_);
        tr.state = apply_virtual_z(ctx_.pulse, tr.state);
        for (int i = 0; i < 9; ++i) state_.amps[static_cast<std::size_t>(i)] = tr.state(i);
        if (tr.leaked[0]) state_.leaked[0] = 1;
        if (tr.leaked[1]) state_.leaked[1] = 1;
        break;
      }
    }
  }

  std::size_t measure(std::size_t atom) {
    int forced = -1;
    if (mcr_count_ < forced_.size()) forced = forced_[mcr_count_];
    ++mcr_count_;
    if (forced < 0) return measure_atom_inplace(state_, atom, rng_);
    double p = 0.0;
    for (std::size_t idx = 0; idx < state_.dim(); ++idx)
      if (state_.level_of(idx, atom) == static_cast<std::size_t>(forced)) p += std::norm(state_.amps[idx]);
    branch_prob_ *= p;
    if (p <= 0.0) throw RuntimeFailure("forced outcome has zero probability");
    for (std::size_t idx = 0; idx < state_.dim(); ++idx)
      if (state_.level_of(idx, atom) != static_cast<std::size_t>(forced)) state_.amps[idx] = 0.0;
    state_.normalize();
    return static_cast<std::size_t>(forced);
  }

  void apply(const CircuitOp& op) {
    const double t0 = time_, t1 = time_ + op.duration;
    switch (op.kind) {
      case OpKind::kGlobalRotation: {
        std::vector<std::size_t> active;
        for (std::size_t a = 0; a < state_.num_atoms; ++a) if (!shelved_[a]) active.push_back(a);
        rotate(active, op.params[0], op.params[1], t0, op.duration);
        idle_all(t0, t1, active);
        break;
      }
      case OpKind::kLocalRotation: {
        std::vector<std::size_t> active;
        for (auto a : op.atoms) if (!shelved_[a]) active.push_back(a);
        rotate(active, op.params[0], op.params[1], t0, op.duration);
        idle_all(t0, t1, active);
        break;
      }
      case OpKind::kLocalPhase:
        phase_inplace(state_, op.atoms, op.params[0]);
        idle_all(t0, t1);
        break;
      case OpKind::kCz:
        idle_all(t0, t1);
        for (std::size_t i = 0; i + 1 < op.atoms.size(); i += 2) cz(op.atoms[i], op.atoms[i + 1]);
        break;
      case OpKind::kTransport:
        idle_all(t0, t1);
        if (!op.params.empty() && op.params[0] != 0.0) phase_inplace(state_, op.atoms, op.params[0]);
        break;
      case OpKind::kIdle:
        idle_all(t0, t1);
        break;
      case OpKind::kShelve:
        idle_all(t0, t1);
        for (auto a : op.atoms) {
          shelved_[a] = 1;
          if (ctx_.shelving.success_prob < 1.0 && uniform01(rng_) >= ctx_.shelving.success_prob)
            record_.herald[a] = 0;
        }
        break;
      case OpKind::kUnshelve:
        idle_all(t0, t1);
        for (auto a : op.atoms) {
          shelved_[a] = 0;
          const double flip = ctx_.shelving.toggle_error + 0.5 * (1.0 - ctx_.shelving.unshelve_coherence);
          if (flip > 0.0 && uniform01(rng_) < flip) apply_pauli(a, 3);
        }
        break;
      case OpKind::kMidCircuitMeasure:
        idle_all(t0, t1);
        for (auto a : op.atoms) {
          const std::size_t out = measure(a);
          record_.ancilla.push_back(static_cast<std::int8_t>(out >= 1 ? 1 : 0));
        }
        break;
      case OpKind::kReset:
        idle_all(t0, t1);
        for (auto a : op.atoms) {
          measure_atom_inplace(state_, a, rng_);
          // Move the measured atom back to |1>.
          std::vector<cplx> next(state_.dim(), cplx{0.0, 0.0});
          const auto st = static_cast<long long>(state_.stride(a));
          for (std::size_t idx = 0; idx < state_.dim(); ++idx) {
            if (state_.amps[idx] == cplx{0.0, 0.0}) continue;
            const auto lv = static_cast<long long>(state_.level_of(idx, a));
            next[static_cast<std::size_t>(static_cast<long long>(idx) + (1 - lv) * st)] += state_.amps[idx];
          }
          state_.amps = next;
          state_.leaked[a] = 0;
          const bool reuse = !op.params.empty() && op.params[0] != 0.0;
          if (reuse && uniform01(rng_) >= ctx_.reuse_survival) record_.herald[a] = 0;
        }
        break;
      case OpKind::kFinalMeasure:
        break;
    }
    time_ = t1;
    state_.time = time_;
  }

  const Circuit& circuit_;
  const NoiseContext& ctx_;
  Rng rng_;
  QuantumState state_;
  ShotRecord record_;
  std::vector<std::uint8_t> shelved_;
  std::vector<double> rabi_scale_;
  std::optional<FrequencyTrajectory> traj_;
  std::vector<int> forced_;
  std::size_t mcr_count_ = 0;
  std::size_t pc_ = 0;
  double time_ = 0.0;
  double branch_prob_ = 1.0;
};

// Executes `shots` independent shots. Shot k uses RNG streams derived from
// (seed, k) only, so the table is identical for any thread count.
inline ShotTable execute(const Circuit& c, const NoiseContext& ctx, std::size_t shots, std::uint64_t seed) {
  c.validate();
  ctx.validate();
  ShotTable t;
  t.num_atoms = c.num_atoms;
  t.metadata = {{"circuit", c.name}, {"seed", seed}, {"duration_s", c.duration()}};
  t.shots.resize(shots);
  parallel_for(shots, [&](std::size_t k) {
    ShotRunner r(c, ctx, seed, k);
    t.shots[k] = r.finish();
  });
  return t;
}

// Noiseless pre-measurement state of a circuit, optionally following
// forced mid-circuit outcomes; returns the state and the branch probability.
inline std::pair<QuantumState, double> ideal_state(const Circuit& c, std::vector<int> forced = {}) {
  NoiseContext ctx;
  ShotRunner r(c, ctx, 0, 0);
  r.force_outcomes(std::move(forced));
  r.run_unitary_part();
  return {r.state(), r.branch_probability()};
}

}  // namespace clockq
