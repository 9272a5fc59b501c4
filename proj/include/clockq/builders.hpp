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

// Circuit builders for the clock-processor experiments.
//
// All registers start in |1...1>. Entangling steps use the native pattern
//   R(pi/2, 0) on the target, CZ(control, target), R(pi/2, 0) on the target
// which, for a target in |1>, copies the control's computational value onto
// the target (a CNOT controlled on |0> acting on a |1> target), up to
// branch phases that only shift fringe offsets. Builders are pure functions
// of their configuration.

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clockq/circuit.hpp"
#include "clockq/core.hpp"

namespace clockq {

struct TransportConfig {
  double lambda = 698e-9;                 // clock wavelength, m
  double site_spacing = 19.0 * 698e-9 / 4.0;  // m; four sites = 19 wavelengths
  double move_duration = 160e-6;          // s per reconfiguration step
  double phase_move_duration = 40e-6;     // s for sub-wavelength phase moves
  bool displacement_phase = false;        // imprint 2 pi d / lambda on moves

  void validate() const {
    require(lambda > 0.0 && site_spacing > 0.0, "transport lengths must be positive");
    require(move_duration >= 0.0 && phase_move_duration >= 0.0, "move durations must be >= 0");
  }

  // Phase imprinted on an atom moved by `sites` lattice sites.
  double move_phase(double sites) const {
    if (!displacement_phase) return 0.0;
    return wrap_phase(kTwoPi * sites * site_spacing / lambda);
  }
};

// Minimal-jerk normalized position x(t) = 6t^5 - 15t^4 + 10t^3, t in [0,1].
inline double minimal_jerk_position(double t) {
  require(t >= 0.0 && t <= 1.0, "minimal-jerk time must be in [0, 1]");
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
inline double minimal_jerk_velocity(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }
inline double minimal_jerk_acceleration(double t) { return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t); }

// Phase imprinted by displacing an atom by `d` meters along the clock beam.
inline double displacement_phase(double d, double lambda = 698e-9) { return kTwoPi * d / lambda; }

struct BuilderConfig {
  double clock_rabi = 2100.0;                       // Hz
  double cz_duration = 7.612 / (kTwoPi * 5.4e6);    // s, time-optimal pulse
  // Synthetic Ramsey detuning (Hz): the analysis pulse after a dark time t
  // is advanced in phase by 2 pi * ramsey_detuning * t, emulating a laser
  // detuning without off-resonant errors on the (slow) clock pulses.
  double ramsey_detuning = 0.0;
  TransportConfig transport{};

  void validate() const {
    require(clock_rabi > 0.0, "clock_rabi must be positive");
    require(cz_duration >= 0.0, "cz_duration must be >= 0");
    transport.validate();
  }
  double rotation_time(double theta) const { return std::abs(theta) / (kTwoPi * clock_rabi); }
  double ramsey_phase(double dark_time) const { return kTwoPi * ramsey_detuning * dark_time; }
};

// Small helper accumulating timed ops.
class CircuitBuilder {
 public:
  CircuitBuilder(std::string name, std::size_t n, const BuilderConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    c_.name = std::move(name);
    c_.num_atoms = n;
  }
  CircuitBuilder& global(double theta, double phi) {
    c_.ops.push_back({OpKind::kGlobalRotation, {}, {theta, phi}, cfg_.rotation_time(theta)});
    return *this;
  }
  CircuitBuilder& local(std::vector<std::size_t> atoms, double theta, double phi) {
    c_.ops.push_back({OpKind::kLocalRotation, std::move(atoms), {theta, phi}, cfg_.rotation_time(theta)});
    return *this;
  }
  CircuitBuilder& phase(std::vector<std::size_t> atoms, double ph, double duration = 0.0) {
    c_.ops.push_back({OpKind::kLocalPhase, std::move(atoms), {ph}, duration});
    return *this;
  }
  CircuitBuilder& cz(std::vector<std::size_t> pairs) {
    c_.ops.push_back({OpKind::kCz, std::move(pairs), {}, cfg_.cz_duration});
    return *this;
  }
  CircuitBuilder& transport(std::vector<std::size_t> atoms, double sites, double duration = -1.0) {
    const double d = duration < 0.0 ? cfg_.transport.move_duration : duration;
    c_.ops.push_back({OpKind::kTransport, std::move(atoms), {cfg_.transport.move_phase(sites)}, d});
    return *this;
  }
  CircuitBuilder& idle(double t) {
    if (t > 0.0) c_.ops.push_back({OpKind::kIdle, {}, {}, t});
    return *this;
  }
  // Echo pair: two pi pulses with opposite phases around the idle split,
  // t/4 - pi - t/2 - pi - t/4; identity on the noiseless state.
  CircuitBuilder& echoed_idle(double t, bool echo) {
    if (!echo) return idle(t);
    idle(0.25 * t).global(kPi, 0.0).idle(0.5 * t).global(kPi, kPi).idle(0.25 * t);
    return *this;
  }
  // Reconfiguration step, optionally with an echo pair inserted into it.
  CircuitBuilder& move(std::vector<std::size_t> atoms, double sites, bool echo) {
    if (!echo) return transport(std::move(atoms), sites);
    const double t = cfg_.transport.move_duration;
    transport(atoms, 0.0, 0.25 * t).global(kPi, 0.0).transport(atoms, 0.0, 0.5 * t).global(kPi, kPi);
    return transport(std::move(atoms), sites, 0.25 * t);
  }
  CircuitBuilder& op(OpKind k, std::vector<std::size_t> atoms, std::vector<double> params, double duration) {
    c_.ops.push_back({k, std::move(atoms), std::move(params), duration});
    return *this;
  }
  CircuitBuilder& measure() {
    c_.ops.push_back({OpKind::kFinalMeasure, {}, {}, 0.0});
    return *this;
  }
  Circuit build() const {
    c_.validate();
    return c_;
  }
  const BuilderConfig& cfg() const { return cfg_; }

 private:
  BuilderConfig cfg_;
  mutable Circuit c_;
};

// NaN analysis phase means "no analysis pulse" (population readout).
inline constexpr double kNoAnalysis = std::numeric_limits<double>::quiet_NaN();

// |11> -> global pi/2 -> CZ -> global pi/4 gives the even-parity Bell
// state; an optional analysis pi/2 pulse with phase phi follows.
inline Circuit build_bell_circuit(const BuilderConfig& cfg = {}, double analysis_phase = kNoAnalysis) {
  CircuitBuilder b("bell", 2, cfg);
  b.global(kPi / 2, 0.0).cz({0, 1}).global(kPi / 4, 0.0);
  if (!std::isnan(analysis_phase)) b.global(kPi / 2, analysis_phase);
  return b.measure().build();
}

struct CascadeOptions {
  double analysis_phase = kNoAnalysis;
  bool include_z_quarter = true;   // single-site Z^(1/4) via a lambda/8 move
  double extra_idle = 0.0;         // s, injected between the CZ layers
  std::vector<bool> echo_steps = {false, false, false};  // echo per transport step
};

// Seven-atom GHZ cascade: atom 0 alone, atoms (1,2) a 2-GHZ, atoms 3..6 a
// 4-GHZ built from the central pair (4,5) with leaves 3 and 6.
//   layer A: pi/2 on {1,2,4,5}, CZ(1,2), CZ(4,5)
//   step (1): leaves move next to the central pair
//   pi/2 on {0,1,3,4,6}; layer B: CZ(3,4), CZ(5,6); pi/2 on {3,6}
//   step (2): groups separate for readout
//   step (3): atom 0 moved by lambda/8 (Z^(1/4), optional)
//   global analysis pi/2 with phase phi
inline Circuit build_ghz_cascade(const BuilderConfig& cfg = {}, const CascadeOptions& opt = {}) {
  require(opt.echo_steps.size() == 3, "cascade echo_steps needs three entries");
  CircuitBuilder b("ghz_cascade", 7, cfg);
  b.local({1, 2, 4, 5}, kPi / 2, 0.0).cz({1, 2, 4, 5});
  b.move({3, 6}, 4.0, opt.echo_steps[0]);
  b.idle(opt.extra_idle);
  b.local({0, 1, 3, 4, 6}, kPi / 2, 0.0).cz({3, 4, 5, 6}).local({3, 6}, kPi / 2, 0.0);
  b.move({0, 1, 2, 3, 4, 5, 6}, 4.0, opt.echo_steps[1]);
  if (opt.include_z_quarter) {
    b.phase({0}, displacement_phase(cfg.transport.lambda / 8.0, cfg.transport.lambda),
            cfg.transport.phase_move_duration);
    if (opt.echo_steps[2]) b.echoed_idle(cfg.transport.phase_move_duration, true);
  }
  if (!std::isnan(opt.analysis_phase)) b.global(kPi / 2, opt.analysis_phase);
  return b.measure().build();
}

// Atom groups of the cascade, smallest first.
inline std::vector<std::vector<std::size_t>> cascade_groups() { return {{0}, {1, 2}, {3, 4, 5, 6}}; }

// Four-atom GHZ with an injectable idle between the CZ layers:
//   pi/2 on {1,2}, CZ(1,2), idle, pi/2 on {0,1,3}, CZ(0,1), CZ(2,3), pi/2 on {0,3}.
// During the idle the leaves sit in |1> and only the central pair is
// exposed; its phase errors become correlated half-register flips.
inline Circuit build_ghz4_idle(const BuilderConfig& cfg, double idle_time, double analysis_phase = kNoAnalysis,
                               bool echo = false) {
  CircuitBuilder b("ghz4_idle", 4, cfg);
  b.local({1, 2}, kPi / 2, 0.0).cz({1, 2});
  b.echoed_idle(idle_time, echo);
  b.local({0, 1, 3}, kPi / 2, 0.0).cz({0, 1, 2, 3}).local({0, 3}, kPi / 2, 0.0);
  if (!std::isnan(analysis_phase)) b.global(kPi / 2, analysis_phase);
  return b.measure().build();
}

// Appends the GHZ-4 preparation on atoms q[0..3] (leaf, centre, centre,
// leaf) without the final measurement.
inline void append_ghz4(CircuitBuilder& b, const std::vector<std::size_t>& q) {
  b.local({q[1], q[2]}, kPi / 2, 0.0).cz({q[1], q[2]});
  b.local({q[0], q[1], q[3]}, kPi / 2, 0.0).cz({q[0], q[1], q[2], q[3]}).local({q[0], q[3]}, kPi / 2, 0.0);
}

// Two GHZ-4 copies (atoms 0..3 and 4..7) read out with a shared analysis
// pulse; the second copy is shifted by a collective pi/2, either as pi/8
// on each of its atoms (lambda/16 moves) or as a lambda/4 move of one atom.
inline Circuit build_dual_quadrature(const BuilderConfig& cfg = {}, double analysis_phase = kNoAnalysis,
                                     bool single_atom_move = false) {
  CircuitBuilder b("dual_quadrature", 8, cfg);
  const double lam = cfg.transport.lambda;
  b.local({1, 2, 5, 6}, kPi / 2, 0.0).cz({1, 2, 5, 6});
  b.local({0, 1, 3, 4, 5, 7}, kPi / 2, 0.0).cz({0, 1, 2, 3, 4, 5, 6, 7}).local({0, 3, 4, 7}, kPi / 2, 0.0);
  if (single_atom_move) b.phase({4}, displacement_phase(lam / 4.0, lam), cfg.transport.phase_move_duration);
  else b.phase({4, 5, 6, 7}, displacement_phase(lam / 16.0, lam), cfg.transport.phase_move_duration);
  if (!std::isnan(analysis_phase)) b.global(kPi / 2, analysis_phase);
  return b.measure().build();
}

// 1-D positions per CZ layer used to check the adjacency constraint of the
// eight-atom GHZ circuit.
struct LayerGeometry {
  std::vector<double> positions;  // site index per atom before the layer
};

// Eight-atom GHZ by three doubling layers with 1-D rearrangements:
//   layer 1: Bell pair on the central atoms (3,4)
//   layer 2: CZ(2,3), CZ(4,5)
//   layer 3: CZ(1,2), CZ(0,3), CZ(4,7), CZ(5,6)
inline Circuit build_ghz8(const BuilderConfig& cfg = {}, double analysis_phase = kNoAnalysis,
                          std::vector<LayerGeometry>* geometry = nullptr) {
  CircuitBuilder b("ghz8", 8, cfg);
  b.local({3, 4}, kPi / 2, 0.0).cz({3, 4});
  b.transport({2, 5}, 4.0);
  b.local({2, 3, 5}, kPi / 2, 0.0).cz({2, 3, 4, 5}).local({2, 5}, kPi / 2, 0.0);
  b.transport({0, 1, 6, 7}, 4.0);
  b.local({0, 1, 6, 7}, kPi / 2, 0.0).cz({1, 2, 0, 3, 4, 7, 5, 6}).local({0, 1, 6, 7}, kPi / 2, 0.0);
  if (!std::isnan(analysis_phase)) b.global(kPi / 2, analysis_phase);
  if (geometry) {
    // Sites (unit = pair spacing); pairs are separated by >= 2 sites.
    geometry->clear();
    geometry->push_back({{0, 3, 6, 9, 10, 13, 16, 19}});
    geometry->push_back({{0, 3, 8, 9, 12, 13, 16, 19}});
    geometry->push_back({{5, 0, 1, 6, 9, 13, 14, 10}});
  }
  return b.measure().build();
}

// Checks that every CZ pair of layer k is adjacent (distance 1) and that no
// other atom sits within distance < 2 of a pair member.
inline bool check_adjacency(const Circuit& c, const std::vector<LayerGeometry>& geo) {
  std::size_t layer = 0;
  for (const auto& op : c.ops) {
    if (op.kind != OpKind::kCz) continue;
    if (layer >= geo.size()) return false;
    const auto& pos = geo[layer].positions;
    std::set<std::size_t> in_pair(op.atoms.begin(), op.atoms.end());
    for (std::size_t i = 0; i + 1 < op.atoms.size(); i += 2) {
      const auto a = op.atoms[i], bb = op.atoms[i + 1];
      if (std::abs(pos[a] - pos[bb]) != 1.0) return false;
      for (std::size_t o = 0; o < pos.size(); ++o) {
        if (o == a || o == bb) continue;
        if (std::abs(pos[o] - pos[a]) < 2.0 || std::abs(pos[o] - pos[bb]) < 2.0) return false;
      }
    }
    ++layer;
  }
  return true;
}

inline std::size_t cz_depth(const Circuit& c) { return c.count(OpKind::kCz); }

struct QlsRoles {
  std::size_t clock = 0;
  std::size_t ancilla = 1;
  std::optional<std::size_t> reference = 2;  // bare Ramsey comparison atom
};

inline void check_roles(const QlsRoles& r) {
  require(r.clock != r.ancilla, "clock and ancilla roles must differ");
  if (r.reference) require(*r.reference != r.clock && *r.reference != r.ancilla, "reference role conflicts");
}

inline std::size_t role_register_size(const QlsRoles& r) {
  std::size_t n = std::max(r.clock, r.ancilla) + 1;
  if (r.reference) n = std::max(n, *r.reference + 1);
  return n;
}

// Maps the clock's X-basis state onto the ancilla and back:
//   R(pi/2,-pi/2) on clock, CNOT(clock -> ancilla), shelve clock,
//   measure ancilla, unshelve, R(pi/2,+pi/2) on clock.
// Ancilla 0 leaves the clock in |+>, ancilla 1 in |->.
inline void append_x_measurement(CircuitBuilder& b, const QlsRoles& r, double mcr_duration,
                                 double phase_offset = 0.0) {
  b.local({r.clock}, kPi / 2, -kPi / 2 + phase_offset);
  b.local({r.ancilla}, kPi / 2, 0.0).cz({r.clock, r.ancilla}).local({r.ancilla}, kPi / 2, 0.0);
  b.op(OpKind::kShelve, {r.clock}, {}, 0.0);
  b.op(OpKind::kMidCircuitMeasure, {r.ancilla}, {}, mcr_duration);
  b.op(OpKind::kUnshelve, {r.clock}, {}, 0.0);
  b.local({r.clock}, kPi / 2, kPi / 2 + phase_offset);
}

struct QlsOptions {
  double mcr_duration = 10e-3;     // imaging time, s
  double replace_dead_time = 2.9e-3;
  double reuse_time = 20e-3;       // 10 ms image + 10 ms cool
  bool reuse_ancilla = false;
};

// One QLS round: clock prepared in |+>, free evolution, X-basis readout
// through the ancilla; the reference atom runs the same Ramsey sequence
// with a direct final readout.
inline Circuit build_qls_round(const BuilderConfig& cfg, double evolution_time, const QlsRoles& roles = {},
                               const QlsOptions& opt = {}) {
  check_roles(roles);
  require(evolution_time >= 0.0, "evolution time must be >= 0");
  CircuitBuilder b("qls_round", role_register_size(roles), cfg);
  std::vector<std::size_t> ramsey{roles.clock};
  if (roles.reference) ramsey.push_back(*roles.reference);
  const double adv = cfg.ramsey_phase(evolution_time);
  b.local(ramsey, kPi / 2, -kPi / 2).idle(evolution_time);
  if (roles.reference) b.local({*roles.reference}, kPi / 2, -kPi / 2 + adv);
  append_x_measurement(b, roles, opt.mcr_duration, adv);
  return b.measure().build();
}

// Repeated QLS rounds with evolution times `times`, ancilla replacement (or
// reuse) between rounds, then a final Ramsey analysis of the clock with
// phase `final_phase`. The ShotTable carries one ancilla outcome per round.
inline Circuit build_repeated_qls(const BuilderConfig& cfg, const std::vector<double>& times, double final_phase,
                                  const QlsRoles& roles = {}, const QlsOptions& opt = {}) {
  check_roles(roles);
  require(!times.empty(), "repeated QLS needs at least one round");
  CircuitBuilder b("repeated_qls", role_register_size(roles), cfg);
  b.local({roles.clock}, kPi / 2, -kPi / 2);
  double adv = 0.0;  // accumulated synthetic-detuning phase
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] >= 0.0, "evolution times must be >= 0");
    b.idle(times[i]);
    adv += cfg.ramsey_phase(times[i]);
    append_x_measurement(b, roles, opt.mcr_duration, adv);
    b.op(OpKind::kReset, {roles.ancilla}, {opt.reuse_ancilla ? 1.0 : 0.0},
         opt.reuse_ancilla ? opt.reuse_time : opt.replace_dead_time);
  }
  b.local({roles.clock}, kPi / 2, final_phase + adv);
  return b.measure().build();
}

// Weight-2 parity: Bell pair (0,1) Ramsey, analysis pulse on the pair,
// two CNOTs onto ancilla 2, ancilla readout. Ancilla 1 <=> even pair parity.
// With `direct` the pair itself is read out instead (no ancilla mapping).
inline Circuit build_weight2_parity(const BuilderConfig& cfg, double evolution_time, double analysis_phase = 0.0,
                                    bool direct = false) {
  CircuitBuilder b(direct ? "weight2_parity_direct" : "weight2_parity", 3, cfg);
  b.local({0, 1}, kPi / 2, 0.0).cz({0, 1}).local({0}, kPi / 2, 0.0);
  b.idle(evolution_time);
  b.local({0, 1}, kPi / 2, analysis_phase + cfg.ramsey_phase(evolution_time));
  if (!direct) {
    b.local({2}, kPi / 2, 0.0).cz({0, 2}).local({2}, kPi / 2, 0.0);
    b.local({2}, kPi / 2, 0.0).cz({1, 2}).local({2}, kPi / 2, 0.0);
    b.op(OpKind::kShelve, {0, 1}, {}, 0.0);
    b.op(OpKind::kMidCircuitMeasure, {2}, {}, 10e-3);
    b.op(OpKind::kUnshelve, {0, 1}, {}, 0.0);
  }
  return b.measure().build();
}

// Three-atom linear cluster 0-1-2 with middle-atom X readout. Exterior
// atoms are prepared in Y eigenstates so the projected pair is exactly
// Phi+ (ancilla 0) or Psi- (ancilla 1). Optional analysis rotations on the
// exterior pair characterize the projected state.
inline Circuit build_cluster_bell(const BuilderConfig& cfg = {}, double analysis_phase = kNoAnalysis) {
  CircuitBuilder b("cluster_bell", 3, cfg);
  b.local({0}, kPi / 2, -kPi).local({2}, kPi / 2, 0.0).local({1}, kPi / 2, -kPi / 2);
  b.cz({0, 1}).cz({1, 2});
  b.local({1}, kPi / 2, -kPi / 2);
  b.op(OpKind::kShelve, {0, 2}, {}, 0.0);
  b.op(OpKind::kMidCircuitMeasure, {1}, {}, 10e-3);
  b.op(OpKind::kUnshelve, {0, 2}, {}, 0.0);
  if (!std::isnan(analysis_phase)) b.local({0, 2}, kPi / 2, analysis_phase);
  return b.measure().build();
}

}  // namespace clockq
