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

// ShotTable: per-shot measurement records with heralding / conditioning
// flags. This is the universal input of the analysis pipeline.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clockq/core.hpp"

namespace clockq {

struct ShotRecord {
  std::uint64_t index = 0;
  std::vector<std::uint8_t> bits;     // final readout, atom 0 first
  std::vector<std::uint8_t> herald;   // 1 = herald succeeded for this atom
  std::vector<std::uint8_t> leaked;   // 1 = atom left the qubit manifold
  std::vector<std::int8_t> ancilla;   // mid-circuit outcomes, one per round

  bool all_heralded() const {
    return std::all_of(herald.begin(), herald.end(), [](auto h) { return h != 0; });
  }
  std::string bitstring() const {
    std::string s;
    for (auto b : bits) s.push_back(static_cast<char>('0' + b));
    return s;
  }
};

struct ShotTable {
  std::size_t num_atoms = 0;
  std::vector<ShotRecord> shots;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const { return shots.size(); }

  // Row filter: keeps the shots where mask[i] is true. Columns are
  // untouched, only the retained row set changes.
  ShotTable filter(const std::vector<bool>& mask) const {
    require(mask.size() == shots.size(), "mask length must equal shot count");
    ShotTable out;
    out.num_atoms = num_atoms;
    out.metadata = metadata;
    for (std::size_t i = 0; i < shots.size(); ++i)
      if (mask[i]) out.shots.push_back(shots[i]);
    return out;
  }

  ShotTable heralded() const {
    std::vector<bool> mask(shots.size());
    for (std::size_t i = 0; i < shots.size(); ++i) mask[i] = shots[i].all_heralded();
    return filter(mask);
  }

  // Counts of each final bitstring over the retained rows.
  std::map<std::string, std::size_t> counts() const {
    std::map<std::string, std::size_t> c;
    for (const auto& s : shots) ++c[s.bitstring()];
    return c;
  }

  // Empirical probability of a bitstring, restricted to atoms `sub` if given.
  double probability(const std::string& target, const std::vector<std::size_t>& sub = {}) const {
    if (shots.empty()) return 0.0;
    std::size_t hit = 0;
    for (const auto& s : shots) {
      bool ok = true;
      for (std::size_t j = 0; j < target.size(); ++j) {
        const std::size_t a = sub.empty() ? j : sub[j];
        if (s.bits.at(a) != static_cast<std::uint8_t>(target[j] - '0')) { ok = false; break; }
      }
      hit += ok;
    }
    return static_cast<double>(hit) / static_cast<double>(shots.size());
  }

  // Number of shots with even parity on `sub` (all atoms if empty).
  std::size_t even_parity_count(const std::vector<std::size_t>& sub = {}) const {
    std::size_t even = 0;
    for (const auto& s : shots) {
      int ones = 0;
      if (sub.empty()) {
        for (auto b : s.bits) ones += b;
      } else {
        for (auto a : sub) ones += s.bits.at(a);
      }
      even += (ones % 2 == 0);
    }
    return even;
  }

  // Associative, order-independent merge keyed by shot index.
  static ShotTable merge(const ShotTable& a, const ShotTable& b) {
    require(a.num_atoms == b.num_atoms || a.shots.empty() || b.shots.empty(),
            "cannot merge shot tables of different register sizes");
    ShotTable out;
    out.num_atoms = std::max(a.num_atoms, b.num_atoms);
    out.metadata = a.metadata.empty() ? b.metadata : a.metadata;
    out.shots = a.shots;
    out.shots.insert(out.shots.end(), b.shots.begin(), b.shots.end());
    std::stable_sort(out.shots.begin(), out.shots.end(),
                     [](const ShotRecord& x, const ShotRecord& y) { return x.index < y.index; });
    return out;
  }
};

inline std::string flags_to_string(const std::vector<std::uint8_t>& v) {
  std::string s;
  for (auto b : v) s.push_back(static_cast<char>('0' + b));
  return s;
}

inline std::string ancilla_to_string(const std::vector<std::int8_t>& v) {
  std::string s;
  for (auto b : v) s.push_back(b < 0 ? '-' : static_cast<char>('0' + b));
  return s;
}

// CSV layout: shot,bitstring,herald,leak,ancilla. Bitstrings list atom 0
// first; ancilla holds one character per mid-circuit round ('-' = none).
inline void write_shot_csv(const ShotTable& t, const std::string& csv_path,
                           const std::string& json_path) {
  std::ofstream f(csv_path);
  if (!f) throw RuntimeFailure("cannot write " + csv_path);
  f << "shot,bitstring,herald,leak,ancilla\n";
  for (const auto& s : t.shots) {
    f << s.index << ',' << s.bitstring() << ',' << flags_to_string(s.herald) << ','
      << flags_to_string(s.leaked) << ',' << ancilla_to_string(s.ancilla) << '\n';
  }
  nlohmann::json meta = t.metadata;
  meta["num_atoms"] = t.num_atoms;
  meta["num_shots"] = t.shots.size();
  meta["columns"] = {"shot", "bitstring", "herald", "leak", "ancilla"};
  meta["bit_order"] = "atom 0 is the leftmost character";
  std::ofstream j(json_path);
  if (!j) throw RuntimeFailure("cannot write " + json_path);
  j << meta.dump(2) << '\n';
}

inline ShotTable read_shot_csv(const std::string& csv_path, const std::string& json_path) {
  ShotTable t;
  std::ifstream j(json_path);
  if (!j) throw ConfigError("cannot read " + json_path);
  j >> t.metadata;
  t.num_atoms = t.metadata.at("num_atoms").get<std::size_t>();
  std::ifstream f(csv_path);
  if (!f) throw ConfigError("cannot read " + csv_path);
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string idx, bits, herald, leak, anc;
    std::getline(ss, idx, ',');
    std::getline(ss, bits, ',');
    std::getline(ss, herald, ',');
    std::getline(ss, leak, ',');
    std::getline(ss, anc, ',');
    ShotRecord r;
    r.index = std::stoull(idx);
    for (char c : bits) r.bits.push_back(static_cast<std::uint8_t>(c - '0'));
    for (char c : herald) r.herald.push_back(static_cast<std::uint8_t>(c - '0'));
    for (char c : leak) r.leaked.push_back(static_cast<std::uint8_t>(c - '0'));
    for (char c : anc) r.ancilla.push_back(c == '-' ? std::int8_t{-1} : static_cast<std::int8_t>(c - '0'));
    t.shots.push_back(std::move(r));
  }
  t.metadata.erase("num_atoms");
  t.metadata.erase("num_shots");
  t.metadata.erase("columns");
  t.metadata.erase("bit_order");
  return t;
}

}  // namespace clockq
