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

// Dense state vectors over registers of two- or three-level atoms.
//
// Level 0 and 1 are the clock qubit states, level 2 (when present) is the
// Rydberg state |r>. Atom 0 is the most significant digit of the basis
// index, so the bitstring "01" of a two-atom register is index 1.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "clockq/core.hpp"
#include "clockq/shots.hpp"

namespace clockq {

using CMatrix = Eigen::MatrixXcd;
using Mat2 = std::array<cplx, 4>;  // row-major 2x2

struct QuantumState {
  std::size_t num_atoms = 0;
  std::size_t levels = 2;
  std::vector<cplx> amps;
  double time = 0.0;                  // accumulated wall-clock time, s
  std::vector<std::uint8_t> leaked;   // per-atom absorbing-leak flag

  std::size_t dim() const { return amps.size(); }

  double norm2() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
  }

  void normalize() {
    const double n = std::sqrt(norm2());
    if (n <= 0.0) throw RuntimeFailure("cannot normalize a zero state");
    for (auto& a : amps) a /= n;
  }

  // Stride of atom k in the basis index.
  std::size_t stride(std::size_t atom) const {
    std::size_t s = 1;
    for (std::size_t k = atom + 1; k < num_atoms; ++k) s *= levels;
    return s;
  }

  // Level of `atom` in basis index `idx`.
  std::size_t level_of(std::size_t idx, std::size_t atom) const {
    return (idx / stride(atom)) % levels;
  }
};

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// Parses a level string ("01r", "1111"); 'r' denotes level 2.
inline std::vector<std::size_t> parse_levels(const std::string& s) {
  std::vector<std::size_t> out;
  for (char c : s) {
    if (c == '0' || c == '1' || c == '2') out.push_back(static_cast<std::size_t>(c - '0'));
    else if (c == 'r') out.push_back(2);
    else throw ConfigError(std::string("invalid level character '") + c + "'");
  }
  return out;
}

inline std::size_t basis_index(const std::vector<std::size_t>& lv, std::size_t levels) {
  std::size_t idx = 0;
  for (auto l : lv) idx = idx * levels + l;
  return idx;
}

inline QuantumState init_state(std::size_t num_atoms, std::size_t levels,
                               const std::vector<std::size_t>& bitstring) {
  require(levels == 2 || levels == 3, "levels per atom must be 2 or 3");
  require(num_atoms >= 1 && num_atoms <= 12, "register size must be in [1, 12]");
  require(bitstring.size() == num_atoms, "bitstring length must equal the number of atoms");
  for (auto l : bitstring) require(l < levels, "bitstring level exceeds levels per atom");
  QuantumState s;
  s.num_atoms = num_atoms;
  s.levels = levels;
  s.amps.assign(ipow(levels, num_atoms), cplx{0.0, 0.0});
  s.amps[basis_index(bitstring, levels)] = 1.0;
  s.leaked.assign(num_atoms, 0);
  return s;
}

inline QuantumState init_state(std::size_t num_atoms, std::size_t levels, const std::string& bits) {
  return init_state(num_atoms, levels, parse_levels(bits));
}

// R(theta, phi) = exp(-i theta/2 (cos phi X + sin phi Y)) on {|0>, |1>}.
inline Mat2 rotation_matrix(double theta, double phi) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  return {cplx{c, 0.0}, -kI * std::exp(-kI * phi) * s,
          -kI * std::exp(kI * phi) * s, cplx{c, 0.0}};
}

// Z(phase) = diag(1, e^{i phase}): phase imprinted on |1>.
inline Mat2 phase_matrix(double phase) {
  return {cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}, std::exp(kI * phase)};
}

inline void check_atoms(const QuantumState& s, const std::vector<std::size_t>& atoms) {
  for (auto a : atoms) require(a < s.num_atoms, "atom index out of range");
}

// In-place 2x2 operation on the qubit levels of one atom; |r> untouched.
inline void apply_mat2_inplace(QuantumState& s, std::size_t atom, const Mat2& m) {
  const std::size_t st = s.stride(atom);
  const std::size_t block = st * s.levels;
  for (std::size_t base = 0; base < s.dim(); base += block) {
    for (std::size_t off = 0; off < st; ++off) {
      cplx& a0 = s.amps[base + off];
      cplx& a1 = s.amps[base + off + st];
      const cplx n0 = m[0] * a0 + m[1] * a1;
      const cplx n1 = m[2] * a0 + m[3] * a1;
      a0 = n0;
      a1 = n1;
    }
  }
}

inline void rotate_inplace(QuantumState& s, const std::vector<std::size_t>& atoms,
                           double theta, double phi) {
  require(std::isfinite(theta) && std::isfinite(phi), "rotation angles must be finite");
  check_atoms(s, atoms);
  const Mat2 m = rotation_matrix(theta, phi);
  for (auto a : atoms) apply_mat2_inplace(s, a, m);
}

inline void phase_inplace(QuantumState& s, const std::vector<std::size_t>& atoms, double phase) {
  check_atoms(s, atoms);
  const Mat2 m = phase_matrix(phase);
  for (auto a : atoms) apply_mat2_inplace(s, a, m);
}

inline std::vector<std::size_t> all_atoms(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

inline QuantumState apply_rotation(QuantumState s, const std::vector<std::size_t>& atoms,
                                   double theta, double phi) {
  rotate_inplace(s, atoms, theta, phi);
  return s;
}

inline QuantumState apply_local_phase(QuantumState s, const std::vector<std::size_t>& atoms,
                                      double phase) {
  phase_inplace(s, atoms, phase);
  return s;
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-10) {
  if (u.rows() != u.cols()) return false;
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff() < tol;
}

// Applies a two-atom unitary in place. A 4x4 matrix acts on the qubit
// subspace (identity on any |r> component); a 9x9 matrix needs levels == 3.
inline void two_qubit_inplace(QuantumState& s, std::size_t a, std::size_t b, const CMatrix& u,
                              bool check = true) {
  require(a < s.num_atoms && b < s.num_atoms && a != b, "invalid atom pair");
  const std::size_t ld = (u.rows() == 4) ? 2 : (u.rows() == 9 ? 3 : 0);
  require(ld != 0 && u.cols() == u.rows(), "two-atom unitary must be 4x4 or 9x9");
  require(ld <= s.levels, "9x9 unitary requires a three-level register");
  if (check) require(is_unitary(u), "matrix is not unitary within 1e-10");
  const std::size_t sa = s.stride(a), sb = s.stride(b), L = s.levels;
  std::vector<cplx> in(ld * ld), out(ld * ld);
  for (std::size_t idx = 0; idx < s.dim(); ++idx) {
    if (s.level_of(idx, a) != 0 || s.level_of(idx, b) != 0) continue;
    for (std::size_t i = 0; i < ld; ++i)
      for (std::size_t j = 0; j < ld; ++j) in[i * ld + j] = s.amps[idx + i * sa + j * sb];
    for (std::size_t r = 0; r < ld * ld; ++r) {
      cplx acc = 0.0;
      for (std::size_t c = 0; c < ld * ld; ++c) acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * in[c];
      out[r] = acc;
    }
    for (std::size_t i = 0; i < ld; ++i)
      for (std::size_t j = 0; j < ld; ++j) s.amps[idx + i * sa + j * sb] = out[i * ld + j];
  }
  (void)L;
}

inline QuantumState apply_two_qubit_unitary(QuantumState s, std::size_t a, std::size_t b,
                                            const CMatrix& u) {
  two_qubit_inplace(s, a, b, u);
  return s;
}

// Ideal CZ: pi phase on |11>.
inline CMatrix cz_matrix() {
  CMatrix u = CMatrix::Identity(4, 4);
  u(3, 3) = -1.0;
  return u;
}

// CNOT flipping the target when the control is in |0>.
inline CMatrix cnot_on_zero_matrix() {
  CMatrix u = CMatrix::Zero(4, 4);
  u(1, 0) = 1.0;  // |00> -> |01>
  u(0, 1) = 1.0;  // |01> -> |00>
  u(2, 2) = 1.0;
  u(3, 3) = 1.0;
  return u;
}

// Fast diagonal CZ on the qubit subspace (no matrix products).
inline void cz_inplace(QuantumState& s, std::size_t a, std::size_t b) {
  require(a < s.num_atoms && b < s.num_atoms && a != b, "invalid atom pair");
  for (std::size_t idx = 0; idx < s.dim(); ++idx)
    if (s.level_of(idx, a) == 1 && s.level_of(idx, b) == 1) s.amps[idx] = -s.amps[idx];
}

// Projective measurement of a single atom in the computational basis.
// Returns the outcome (level; 2 = Rydberg) and collapses the state.
inline std::size_t measure_atom_inplace(QuantumState& s, std::size_t atom, Rng& rng) {
  std::vector<double> p(s.levels, 0.0);
  for (std::size_t idx = 0; idx < s.dim(); ++idx) p[s.level_of(idx, atom)] += std::norm(s.amps[idx]);
  const double u = uniform01(rng) * (p[0] + p[1] + (s.levels > 2 ? p[2] : 0.0));
  std::size_t out = 0;
  double acc = p[0];
  while (out + 1 < s.levels && u >= acc) acc += p[++out];
  for (std::size_t idx = 0; idx < s.dim(); ++idx)
    if (s.level_of(idx, atom) != out) s.amps[idx] = 0.0;
  s.normalize();
  return out;
}

inline std::vector<double> probabilities(const QuantumState& s) {
  std::vector<double> p(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) p[i] = std::norm(s.amps[i]);
  return p;
}

// Draws one basis index from |amp|^2 by inverse-CDF sampling.
inline std::size_t sample_index(const std::vector<double>& cdf, Rng& rng) {
  const double u = uniform01(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Fills `rec` from a sampled basis index; Rydberg outcomes read as bright
// (1) and are flagged as leakage, as are atoms carrying the leak flag.
inline void record_outcome(const QuantumState& s, std::size_t idx, ShotRecord& rec) {
  rec.bits.assign(s.num_atoms, 0);
  rec.leaked.assign(s.num_atoms, 0);
  if (rec.herald.empty()) rec.herald.assign(s.num_atoms, 1);
  for (std::size_t a = 0; a < s.num_atoms; ++a) {
    const std::size_t lv = s.level_of(idx, a);
    const bool leak = lv == 2 || (a < s.leaked.size() && s.leaked[a]);
    rec.bits[a] = static_cast<std::uint8_t>(leak ? 1 : lv);
    rec.leaked[a] = static_cast<std::uint8_t>(leak);
  }
}

inline ShotTable measure_shots(const QuantumState& s, std::size_t num_shots, std::uint64_t seed) {
  std::vector<double> cdf = probabilities(s);
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  ShotTable t;
  t.num_atoms = s.num_atoms;
  t.metadata["seed"] = seed;
  t.shots.resize(num_shots);
  Rng rng = make_rng(seed, 0);
  for (std::size_t k = 0; k < num_shots; ++k) {
    t.shots[k].index = k;
    record_outcome(s, sample_index(cdf, rng), t.shots[k]);
  }
  return t;
}

struct Observable {
  enum class Kind { kParity, kPopulation, kOverlap };
  Kind kind = Kind::kParity;
  std::vector<std::size_t> atoms;  // parity subset (empty = all atoms)
  std::string bitstring;           // population target
  std::vector<cplx> reference;     // overlap target

  static Observable parity(std::vector<std::size_t> atoms = {}) {
    Observable o;
    o.kind = Kind::kParity;
    o.atoms = std::move(atoms);
    return o;
  }
  static Observable population(std::string bits) {
    Observable o;
    o.kind = Kind::kPopulation;
    o.bitstring = std::move(bits);
    return o;
  }
  static Observable overlap(std::vector<cplx> ref) {
    Observable o;
    o.kind = Kind::kOverlap;
    o.reference = std::move(ref);
    return o;
  }
};

// Exact expectation values. Parity is prod_i Z_i with Z|0> = +1,
// Z|1> = -1; a Rydberg level counts as bright (-1).
inline double expectation(const QuantumState& s, const Observable& o) {
  switch (o.kind) {
    case Observable::Kind::kParity: {
      std::vector<std::size_t> atoms = o.atoms.empty() ? all_atoms(s.num_atoms) : o.atoms;
      check_atoms(s, atoms);
      double acc = 0.0;
      for (std::size_t idx = 0; idx < s.dim(); ++idx) {
        int sign = 1;
        for (auto a : atoms) if (s.level_of(idx, a) != 0) sign = -sign;
        acc += sign * std::norm(s.amps[idx]);
      }
      return acc;
    }
    case Observable::Kind::kPopulation: {
      require(o.bitstring.size() == s.num_atoms, "bitstring length does not match register");
      return std::norm(s.amps[basis_index(parse_levels(o.bitstring), s.levels)]);
    }
    case Observable::Kind::kOverlap: {
      require(o.reference.size() == s.dim(), "reference state dimension mismatch");
      cplx ip = 0.0;
      for (std::size_t i = 0; i < s.dim(); ++i) ip += std::conj(o.reference[i]) * s.amps[i];
      return std::norm(ip);
    }
  }
  return 0.0;
}

// (|0...0> + e^{i phase}|1...1>)/sqrt(2) over `n` qubits.
inline std::vector<cplx> ghz_vector(std::size_t n, double phase = 0.0) {
  std::vector<cplx> v(ipow(2, n), cplx{0.0, 0.0});
  v.front() = 1.0 / std::sqrt(2.0);
  v.back() = std::exp(kI * phase) / std::sqrt(2.0);
  return v;
}

// Reduced qubit-subspace amplitudes of a three-level state (drops |r>).
inline std::vector<cplx> qubit_amplitudes(const QuantumState& s) {
  if (s.levels == 2) return s.amps;
  std::vector<cplx> v(ipow(2, s.num_atoms), cplx{0.0, 0.0});
  for (std::size_t q = 0; q < v.size(); ++q) {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < s.num_atoms; ++a)
      idx = idx * s.levels + ((q >> (s.num_atoms - 1 - a)) & 1u);
    v[q] = s.amps[idx];
  }
  return v;
}

}  // namespace clockq
