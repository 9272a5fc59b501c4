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

// Timed circuit intermediate representation and its text serialization.
//
// Text format, one op per line:
//   <kind> <atoms> <params> <duration_s>
// atoms and params are comma-separated lists ('-' when empty). Lines
// starting with '#' are comments; the first non-comment line is
//   circuit <name> <num_atoms>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "clockq/core.hpp"

namespace clockq {

enum class OpKind {
  kGlobalRotation,   // params: theta, phi
  kLocalRotation,    // params: theta, phi
  kLocalPhase,       // params: phase
  kCz,               // atoms: consecutive pairs
  kTransport,        // params: displacement phase imprinted on the moved atoms
  kIdle,
  kShelve,
  kUnshelve,
  kMidCircuitMeasure,
  kReset,            // params: mode (0 = fresh replacement, 1 = reuse)
  kFinalMeasure,
};

inline const char* op_name(OpKind k) {
  switch (k) {
    case OpKind::kGlobalRotation: return "global_rotation";
    case OpKind::kLocalRotation: return "local_rotation";
    case OpKind::kLocalPhase: return "local_phase";
    case OpKind::kCz: return "cz";
    case OpKind::kTransport: return "transport";
    case OpKind::kIdle: return "idle";
    case OpKind::kShelve: return "shelve";
    case OpKind::kUnshelve: return "unshelve";
    case OpKind::kMidCircuitMeasure: return "mid_circuit_measure";
    case OpKind::kReset: return "reset";
    case OpKind::kFinalMeasure: return "final_measure";
  }
  return "?";
}

inline OpKind op_from_name(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(OpKind::kFinalMeasure); ++k)
    if (s == op_name(static_cast<OpKind>(k))) return static_cast<OpKind>(k);
  throw ConfigError("unknown circuit op kind '" + s + "'");
}

struct CircuitOp {
  OpKind kind = OpKind::kIdle;
  std::vector<std::size_t> atoms;
  std::vector<double> params;
  double duration = 0.0;  // s

  bool operator==(const CircuitOp& o) const = default;
};

struct Circuit {
  std::string name = "circuit";
  std::size_t num_atoms = 0;
  std::vector<CircuitOp> ops;

  double duration() const {
    double t = 0.0;
    for (const auto& op : ops) t += op.duration;
    return t;
  }

  std::size_t count(OpKind k) const {
    std::size_t n = 0;
    for (const auto& op : ops) n += op.kind == k;
    return n;
  }

  void validate() const {
    require(num_atoms >= 1, "circuit needs at least one atom");
    for (const auto& op : ops) {
      require(op.duration >= 0.0 && std::isfinite(op.duration), "op durations must be finite and >= 0");
      for (auto a : op.atoms) require(a < num_atoms, std::string(op_name(op.kind)) + ": atom index out of range");
      switch (op.kind) {
        case OpKind::kGlobalRotation:
        case OpKind::kLocalRotation:
          require(op.params.size() == 2, "rotations take params theta,phi");
          break;
        case OpKind::kLocalPhase:
          require(op.params.size() == 1, "local_phase takes one param");
          break;
        case OpKind::kCz:
          require(!op.atoms.empty() && op.atoms.size() % 2 == 0, "cz takes atom pairs");
          break;
        default:
          break;
      }
    }
  }

  bool operator==(const Circuit& o) const = default;
};

inline std::string join_list(const std::vector<std::size_t>& v) {
  if (v.empty()) return "-";
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

inline std::string join_list(const std::vector<double>& v) {
  if (v.empty()) return "-";
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

inline std::string to_text(const Circuit& c) {
  std::ostringstream s;
  s << "# kind atoms params duration_s\n";
  s << "circuit " << c.name << ' ' << c.num_atoms << '\n';
  s << std::setprecision(17);
  for (const auto& op : c.ops)
    s << op_name(op.kind) << ' ' << join_list(op.atoms) << ' ' << join_list(op.params) << ' ' << op.duration << '\n';
  return s.str();
}

inline Circuit from_text(const std::string& text) {
  Circuit c;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  auto split = [](const std::string& f) {
    std::vector<std::string> out;
    if (f == "-") return out;
    std::stringstream ss(f);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (!header) {
      require(kind == "circuit", "circuit text must start with a 'circuit <name> <atoms>' line");
      ls >> c.name >> c.num_atoms;
      require(!ls.fail(), "malformed circuit header");
      header = true;
      continue;
    }
    std::string atoms, params;
    CircuitOp op;
    op.kind = op_from_name(kind);
    ls >> atoms >> params >> op.duration;
    require(!ls.fail(), "malformed op on line " + std::to_string(lineno));
    try {
      for (const auto& a : split(atoms)) op.atoms.push_back(std::stoul(a));
      for (const auto& p : split(params)) op.params.push_back(std::stod(p));
    } catch (const std::logic_error&) {
      throw ConfigError("malformed list on line " + std::to_string(lineno));
    }
    c.ops.push_back(std::move(op));
  }
  require(header, "empty circuit text");
  c.validate();
  return c;
}

inline void write_circuit(const Circuit& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << to_text(c);
}

inline Circuit read_circuit(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str());
}

}  // namespace clockq
