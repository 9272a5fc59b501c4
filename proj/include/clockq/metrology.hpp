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

// Bayesian phase estimation with GHZ cascades and dual-quadrature readout.
//
// A layout holds, for every GHZ size K, a number of copies split between X
// readout (P(+) = (1 + C(K) cos K phi)/2) and Y readout
// (P(+) = (1 + C(K) sin K phi)/2). The sufficient statistic is the number of
// + outcomes per (size, quadrature) channel. The Bayesian mean-square error
// of an estimator is computed exactly by enumerating every outcome tuple
// against a phase grid; the gain is the ratio of the uncorrelated baseline
// error to the cascade error.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "clockq/core.hpp"
#include "clockq/svg.hpp"

namespace clockq {

// Copies per GHZ size suppressing rounding errors: (16/pi^2) ln N rounded
// to the nearest integer, at least 1.
inline std::size_t copies_required(std::size_t n_atoms) {
  require(n_atoms >= 1, "copies_required needs N >= 1");
  const double v = 16.0 / (kPi * kPi) * std::log(static_cast<double>(n_atoms));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(v)));
}

// Asymptotic cascade gain pi^2 N / (64 ln N); reporting only.
inline double asymptotic_gain(std::size_t n_atoms) {
  require(n_atoms >= 2, "asymptotic gain needs N >= 2");
  const double n = static_cast<double>(n_atoms);
  return kPi * kPi * n / (64.0 * std::log(n));
}

struct CascadeLayout {
  std::vector<std::size_t> sizes;     // K per group
  std::vector<std::size_t> copies;    // copies per size
  std::vector<std::size_t> x_copies;  // copies read in X (rest in Y)

  std::size_t total_atoms() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) n += sizes[i] * copies[i];
    return n;
  }

  void validate() const {
    require(!sizes.empty(), "layout needs at least one GHZ size");
    require(copies.size() == sizes.size() && x_copies.size() == sizes.size(), "layout vectors must match in length");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      require(sizes[i] >= 1, "GHZ sizes must be >= 1");
      require(copies[i] >= 1, "copies per size must be >= 1");
      require(x_copies[i] <= copies[i], "quadrature split exceeds copies");
    }
  }
};

// Even split with the odd copy on X.
inline std::size_t default_x_split(std::size_t copies) { return (copies + 1) / 2; }

// Sizes 1, 2, ..., 2^(M-1) with n0 copies each (or one count per size).
inline CascadeLayout cascade_layout(std::size_t groups, std::vector<std::size_t> n0) {
  require(groups >= 1, "cascade needs at least one group");
  if (n0.size() == 1) n0.assign(groups, n0[0]);
  require(n0.size() == groups, "copies list must have one entry per group");
  CascadeLayout l;
  for (std::size_t j = 0; j < groups; ++j) {
    l.sizes.push_back(std::size_t{1} << j);
    l.copies.push_back(n0[j]);
    l.x_copies.push_back(default_x_split(n0[j]));
  }
  l.validate();
  return l;
}

// N uncorrelated atoms, dual-quadrature split.
inline CascadeLayout uncorrelated_layout(std::size_t n_atoms) {
  require(n_atoms >= 1, "uncorrelated layout needs N >= 1");
  return {{1}, {n_atoms}, {default_x_split(n_atoms)}};
}

enum class ContrastKind { kPerfect, kPerSize, kPerQubitFidelity };

struct ContrastModel {
  ContrastKind kind = ContrastKind::kPerfect;
  std::vector<double> per_size;  // aligned with the layout's sizes (kPerSize)
  double f0 = 1.0;               // C(K) = f0^K (kPerQubitFidelity)

  static ContrastModel perfect() { return {}; }
  static ContrastModel fidelity(double f) { return {ContrastKind::kPerQubitFidelity, {}, f}; }
  static ContrastModel list(std::vector<double> c) { return {ContrastKind::kPerSize, std::move(c), 1.0}; }

  double at(std::size_t size_index, std::size_t k) const {
    double c = 1.0;
    switch (kind) {
      case ContrastKind::kPerfect: c = 1.0; break;
      case ContrastKind::kPerSize:
        require(size_index < per_size.size(), "contrast list shorter than the layout");
        c = per_size[size_index];
        break;
      case ContrastKind::kPerQubitFidelity: c = std::pow(f0, static_cast<double>(k)); break;
    }
    require(c >= 0.0 && c <= 1.0, "contrast must be in [0, 1]");
    return c;
  }
};

enum class PriorMode { kTruncated, kWrapped };
enum class CostMode { kSquared, kCircular };
enum class BaselineContrast { kSameAsSingleAtom, kPerfect };

struct GainProblem {
  CascadeLayout layout;
  ContrastModel contrast;
  double prior_width = 0.7;  // rad
  PriorMode prior = PriorMode::kTruncated;
  CostMode cost = CostMode::kSquared;
  BaselineContrast baseline = BaselineContrast::kSameAsSingleAtom;
  std::size_t grid_points = 0;  // 0 => automatic

  void validate() const {
    layout.validate();
    require(prior_width > 0.0, "prior width must be positive");
    for (std::size_t i = 0; i < layout.sizes.size(); ++i) (void)contrast.at(i, layout.sizes[i]);
  }
};

struct GainResult {
  double mse_c = 0.0, mse_uc = 0.0;
  double dphi_c = 0.0, dphi_uc = 0.0;
  double gain = 0.0, gain_db = 0.0;
  double figure_of_merit = 0.0;  // R = dphi_c / prior width
  std::size_t atoms = 0;
  std::size_t grid_points = 0;
  double grid_rel_change = 0.0;  // |g(2M) - g(M)| / g(2M) when checked
};

// One readout channel: `n` copies of a K-atom GHZ in one quadrature.
struct Channel {
  std::size_t k = 1;
  double contrast = 1.0;
  std::size_t n = 0;
  bool y_quadrature = false;
};

inline std::vector<Channel> channels_of(const CascadeLayout& l, const ContrastModel& c) {
  std::vector<Channel> out;
  for (std::size_t i = 0; i < l.sizes.size(); ++i) {
    const double ci = c.at(i, l.sizes[i]);
    if (l.x_copies[i] > 0) out.push_back({l.sizes[i], ci, l.x_copies[i], false});
    if (l.copies[i] > l.x_copies[i]) out.push_back({l.sizes[i], ci, l.copies[i] - l.x_copies[i], true});
  }
  return out;
}

inline double plus_probability(const Channel& ch, double phi) {
  const double s = ch.y_quadrature ? std::sin(static_cast<double>(ch.k) * phi) : std::cos(static_cast<double>(ch.k) * phi);
  return 0.5 * (1.0 + ch.contrast * s);
}

// Binomial table L[m] = P(m plus outcomes | phi) for a channel.
inline std::vector<double> channel_likelihood(const Channel& ch, double phi) {
  const double p = plus_probability(ch, phi);
  std::vector<double> l(ch.n + 1);
  // Stable recursion on log binomial coefficients.
  for (std::size_t m = 0; m <= ch.n; ++m) {
    const double lc = std::lgamma(static_cast<double>(ch.n) + 1.0) - std::lgamma(static_cast<double>(m) + 1.0) -
                      std::lgamma(static_cast<double>(ch.n - m) + 1.0);
    const double lp = (m > 0 ? static_cast<double>(m) * std::log(p) : 0.0) +
                      (ch.n - m > 0 ? static_cast<double>(ch.n - m) * std::log1p(-p) : 0.0);
    l[m] = (p <= 0.0 && m > 0) || (p >= 1.0 && m < ch.n) ? 0.0 : std::exp(lc + lp);
  }
  return l;
}

// Per-channel outcome tables at phase phi for a layout; the joint
// probability of an outcome tuple is the product of the entries.
inline std::vector<std::vector<double>> outcome_likelihood(const CascadeLayout& l, const ContrastModel& c, double phi) {
  std::vector<std::vector<double>> out;
  for (const auto& ch : channels_of(l, c)) out.push_back(channel_likelihood(ch, phi));
  return out;
}

struct PhaseGrid {
  std::vector<double> phi, prior;  // prior weights sum to 1
};

inline PhaseGrid make_grid(double width, PriorMode mode, std::size_t points) {
  PhaseGrid g;
  // Truncated priors only need the support within ~12 sigma; the wrapped
  // prior lives on the whole circle.
  const double half = mode == PriorMode::kTruncated ? std::min(kPi, 12.0 * width) : kPi;
  const bool full = half >= kPi;
  g.phi.resize(points);
  g.prior.resize(points);
  double s = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double x = full ? -kPi + kTwoPi * (static_cast<double>(j) + 0.5) / static_cast<double>(points)
                          : -half + 2.0 * half * (static_cast<double>(j) + 0.5) / static_cast<double>(points);
    double w = 0.0;
    if (mode == PriorMode::kWrapped) {
      for (int k = -8; k <= 8; ++k) {
        const double y = x + kTwoPi * k;
        w += std::exp(-0.5 * y * y / (width * width));
      }
    } else {
      w = std::exp(-0.5 * x * x / (width * width));
    }
    g.phi[j] = x;
    g.prior[j] = w;
    s += w;
  }
  for (auto& w : g.prior) w /= s;
  return g;
}

// Smallest grid resolving the fastest fringe with >= 40 points per period
// (and at least 512 points).
inline std::size_t auto_grid_points(const std::vector<Channel>& chans, double width, PriorMode mode) {
  std::size_t kmax = 1;
  for (const auto& c : chans) kmax = std::max(kmax, c.k);
  const double half = mode == PriorMode::kTruncated ? std::min(kPi, 12.0 * width) : kPi;
  const double periods = 2.0 * half * static_cast<double>(kmax) / kTwoPi;
  return std::max<std::size_t>(512, static_cast<std::size_t>(std::ceil(40.0 * periods)));
}

// Likelihood tables on a grid: tables[c][outcome][j].
using LikelihoodTables = std::vector<std::vector<std::vector<double>>>;

inline LikelihoodTables likelihood_tables(const std::vector<Channel>& chans, const PhaseGrid& g) {
  const std::size_t m = g.phi.size();
  LikelihoodTables tables(chans.size());
  for (std::size_t c = 0; c < chans.size(); ++c) {
    tables[c].assign(chans[c].n + 1, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
      const auto l = channel_likelihood(chans[c], g.phi[j]);
      for (std::size_t o = 0; o <= chans[c].n; ++o) tables[c][o][j] = l[o];
    }
  }
  return tables;
}

struct PosteriorStats {
  double mean = 0.0;      // posterior mean (squared cost) or circular mean
  double variance = 0.0;  // posterior variance, or 2(1 - |<e^{i phi}>|)
  double evidence = 0.0;  // prior-averaged likelihood of the outcome
};

// Unnormalized posterior weights -> statistics for the chosen cost.
inline PosteriorStats posterior_from_weights(const std::vector<double>& w, const PhaseGrid& g, CostMode cost) {
  double z = 0, a = 0, b = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    z += w[j];
    if (cost == CostMode::kSquared) {
      a += w[j] * g.phi[j];
      b += w[j] * g.phi[j] * g.phi[j];
    } else {
      a += w[j] * std::cos(g.phi[j]);
      b += w[j] * std::sin(g.phi[j]);
    }
  }
  PosteriorStats s;
  s.evidence = z;
  if (z <= 0.0) return s;
  if (cost == CostMode::kSquared) {
    s.mean = a / z;
    s.variance = b / z - s.mean * s.mean;
  } else {
    s.mean = std::atan2(b, a);
    s.variance = 2.0 * (1.0 - std::hypot(a, b) / z);
  }
  return s;
}

// Posterior for one outcome tuple (one + count per channel of channels_of).
inline PosteriorStats posterior_stats(const GainProblem& p, const std::vector<std::size_t>& outcome,
                                      std::size_t points = 0) {
  const auto chans = channels_of(p.layout, p.contrast);
  require(outcome.size() == chans.size(), "outcome tuple must have one count per channel");
  if (points == 0) points = auto_grid_points(chans, p.prior_width, p.prior);
  const PhaseGrid g = make_grid(p.prior_width, p.prior, points);
  std::vector<double> w = g.prior;
  for (std::size_t c = 0; c < chans.size(); ++c) {
    require(outcome[c] <= chans[c].n, "outcome count exceeds copies");
    for (std::size_t j = 0; j < w.size(); ++j) w[j] *= channel_likelihood(chans[c], g.phi[j])[outcome[c]];
  }
  return posterior_from_weights(w, g, p.cost);
}

// Exact Bayesian risk of the optimal estimator for the cost: posterior-mean
// squared error, or 2(1 - cos) with the circular-mean estimator.
inline double bayes_risk(const std::vector<Channel>& chans, const PhaseGrid& g, CostMode cost) {
  const std::size_t m = g.phi.size();
  if (chans.empty()) return posterior_from_weights(g.prior, g, cost).variance;
  const LikelihoodTables tables = likelihood_tables(chans, g);
  std::vector<double> cosv(m), sinv(m);
  for (std::size_t j = 0; j < m; ++j) {
    cosv[j] = std::cos(g.phi[j]);
    sinv[j] = std::sin(g.phi[j]);
  }
  // Depth-first enumeration below each outcome of the first channel;
  // partial products are cached per depth.
  const std::size_t first = chans[0].n + 1;
  std::vector<double> part(first, 0.0);
  parallel_for(first, [&](std::size_t o0) {
    std::vector<std::vector<double>> w(chans.size(), std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) w[0][j] = g.prior[j] * tables[0][o0][j];
    double acc = 0.0;
    std::function<void(std::size_t)> rec = [&](std::size_t d) {
      if (d == chans.size()) {
        const auto& v = w[d - 1];
        double z = 0, a = 0, b = 0;
        if (cost == CostMode::kSquared) {
          for (std::size_t j = 0; j < m; ++j) {
            z += v[j];
            a += v[j] * g.phi[j];
            b += v[j] * g.phi[j] * g.phi[j];
          }
          if (z > 0.0) acc += b - a * a / z;
        } else {
          for (std::size_t j = 0; j < m; ++j) {
            z += v[j];
            a += v[j] * cosv[j];
            b += v[j] * sinv[j];
          }
          acc += 2.0 * (z - std::hypot(a, b));
        }
        return;
      }
      for (std::size_t o = 0; o <= chans[d].n; ++o) {
        const auto& t = tables[d][o];
        const auto& prev = w[d - 1];
        auto& cur = w[d];
        double mass = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
          cur[j] = prev[j] * t[j];
          mass += cur[j];
        }
        if (mass <= 0.0) continue;
        rec(d + 1);
      }
    };
    rec(1);
    part[o0] = acc;
  });
  double total = 0.0;
  for (double p : part) total += p;  // fixed order: deterministic
  return total;
}

inline double channel_risk(const CascadeLayout& l, const ContrastModel& c, double width, PriorMode prior,
                           CostMode cost, std::size_t points) {
  const auto chans = channels_of(l, c);
  if (points == 0) points = auto_grid_points(chans, width, prior);
  return bayes_risk(chans, make_grid(width, prior, points), cost);
}

inline ContrastModel baseline_contrast(const GainProblem& p) {
  if (p.baseline == BaselineContrast::kPerfect) return ContrastModel::perfect();
  // The single-atom contrast C(1) of the model.
  switch (p.contrast.kind) {
    case ContrastKind::kPerfect: return ContrastModel::perfect();
    case ContrastKind::kPerQubitFidelity: return ContrastModel::fidelity(p.contrast.f0);
    case ContrastKind::kPerSize: {
      for (std::size_t i = 0; i < p.layout.sizes.size(); ++i)
        if (p.layout.sizes[i] == 1) return ContrastModel::list({p.contrast.per_size[i]});
      return ContrastModel::perfect();
    }
  }
  return ContrastModel::perfect();
}

inline GainResult estimate_gain_at(const GainProblem& p, std::size_t points) {
  const auto chans = channels_of(p.layout, p.contrast);
  const CascadeLayout uc = uncorrelated_layout(p.layout.total_atoms());
  const auto uc_chans = channels_of(uc, baseline_contrast(p));
  if (points == 0)
    points = std::max(auto_grid_points(chans, p.prior_width, p.prior), auto_grid_points(uc_chans, p.prior_width, p.prior));
  const PhaseGrid g = make_grid(p.prior_width, p.prior, points);
  GainResult r;
  r.mse_c = bayes_risk(chans, g, p.cost);
  r.mse_uc = bayes_risk(uc_chans, g, p.cost);
  r.dphi_c = std::sqrt(r.mse_c);
  r.dphi_uc = std::sqrt(r.mse_uc);
  r.gain = r.mse_uc / r.mse_c;
  r.gain_db = 10.0 * std::log10(r.gain);
  r.figure_of_merit = r.dphi_c / p.prior_width;
  r.atoms = p.layout.total_atoms();
  r.grid_points = points;
  return r;
}

// Gain with a grid-doubling convergence check (must agree within 0.5%).
inline GainResult estimate_gain(const GainProblem& p, bool check_convergence = true) {
  p.validate();
  GainResult r = estimate_gain_at(p, p.grid_points);
  if (check_convergence) {
    const GainResult r2 = estimate_gain_at(p, 2 * r.grid_points);
    const double rel = std::abs(r2.gain - r.gain) / r2.gain;
    if (rel > 0.005) throw RuntimeFailure("phase grid too coarse: gain changed by " + std::to_string(rel) + " on doubling");
    GainResult out = r2;
    out.grid_rel_change = rel;
    return out;
  }
  return r;
}

struct ThresholdResult {
  double value = 0.0;
  double gain_lo = 0.0, gain_hi = 0.0;  // gains at the final bracket ends
  std::size_t iterations = 0;
};

// Bisection for gain(knob) = 1 on [lo, hi]; the gain must be below 1 at lo
// and above 1 at hi (monotone increasing knob).
inline ThresholdResult threshold_search(const std::function<GainProblem(double)>& family, double lo, double hi,
                                        double tol = 1e-4) {
  require(lo < hi, "threshold bracket must satisfy lo < hi");
  auto g = [&](double k) { return estimate_gain(family(k), false).gain; };
  double glo = g(lo), ghi = g(hi);
  if (!(glo < 1.0 && ghi > 1.0))
    throw RuntimeFailure("non-monotone or non-bracketing threshold interval: g(lo)=" + std::to_string(glo) +
                         ", g(hi)=" + std::to_string(ghi));
  ThresholdResult r;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm < 1.0) lo = mid, glo = gm;
    else hi = mid, ghi = gm;
    ++r.iterations;
  }
  r.value = 0.5 * (lo + hi);
  r.gain_lo = glo;
  r.gain_hi = ghi;
  return r;
}

struct MonteCarloRisk {
  double mean = 0.0, sem = 0.0;
};

// Monte Carlo estimate of the cascade risk: phi from the prior, outcomes
// from the likelihood, the posterior estimate evaluated on a grid.
inline MonteCarloRisk monte_carlo_risk(const CascadeLayout& l, const ContrastModel& c, double width, PriorMode prior,
                                       CostMode cost, std::size_t samples, std::uint64_t seed,
                                       std::size_t points = 0) {
  const auto chans = channels_of(l, c);
  if (points == 0) points = auto_grid_points(chans, width, prior);
  const PhaseGrid g = make_grid(width, prior, points);
  const LikelihoodTables tables = likelihood_tables(chans, g);
  std::vector<double> loss(samples);
  parallel_for(samples, [&](std::size_t s) {
    Rng rng = make_rng(seed, s);
    double phi;
    do {
      phi = width * std_normal(rng);
      if (prior == PriorMode::kWrapped) phi = wrap_phase(phi);
    } while (std::abs(phi) > kPi);
    std::vector<std::size_t> m(chans.size());
    for (std::size_t k = 0; k < chans.size(); ++k) {
      const double p = plus_probability(chans[k], phi);
      std::size_t cnt = 0;
      for (std::size_t t = 0; t < chans[k].n; ++t) cnt += uniform01(rng) < p;
      m[k] = cnt;
    }
    std::vector<double> w = g.prior;
    for (std::size_t k = 0; k < chans.size(); ++k) {
      const auto& t = tables[k][m[k]];
      for (std::size_t j = 0; j < w.size(); ++j) w[j] *= t[j];
    }
    const PosteriorStats ps = posterior_from_weights(w, g, cost);
    if (cost == CostMode::kSquared) loss[s] = (phi - ps.mean) * (phi - ps.mean);
    else loss[s] = 2.0 * (1.0 - std::cos(phi - ps.mean));
  });
  MonteCarloRisk r;
  for (double x : loss) r.mean += x;
  r.mean /= static_cast<double>(samples);
  double v = 0.0;
  for (double x : loss) v += (x - r.mean) * (x - r.mean);
  r.sem = std::sqrt(v / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return r;
}

inline const char* prior_name(PriorMode m) { return m == PriorMode::kTruncated ? "truncated" : "wrapped"; }
inline const char* cost_name(CostMode m) { return m == CostMode::kSquared ? "squared" : "circular"; }

inline nlohmann::json to_json(const GainResult& r) {
  return {{"gain", r.gain},           {"gain_db", r.gain_db},       {"dphi_c", r.dphi_c},
          {"dphi_uc", r.dphi_uc},     {"mse_c", r.mse_c},           {"mse_uc", r.mse_uc},
          {"figure_of_merit_R", r.figure_of_merit},                 {"atoms", r.atoms},
          {"grid_points", r.grid_points}, {"grid_rel_change", r.grid_rel_change}};
}

struct GainCurve {
  std::string x_name;
  std::vector<double> x, gain;
};

inline void write_gain_csv(const GainCurve& c, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << c.x_name << ",gain,gain_db\n";
  f.precision(12);
  for (std::size_t i = 0; i < c.x.size(); ++i) f << c.x[i] << ',' << c.gain[i] << ',' << 10.0 * std::log10(c.gain[i]) << '\n';
}

inline void write_gain_svg(const std::vector<GainCurve>& curves, const std::vector<std::string>& labels,
                           const std::string& title, const std::string& path) {
  SvgPlot p;
  p.title = title;
  p.x_label = curves.empty() ? "" : curves[0].x_name;
  p.y_label = "metrological gain g";
  p.hlines = {1.0};
  for (std::size_t i = 0; i < curves.size(); ++i)
    p.series.push_back({i < labels.size() ? labels[i] : "", curves[i].x, curves[i].gain, {}, true, true});
  write_svg(p, path);
}

}  // namespace clockq
