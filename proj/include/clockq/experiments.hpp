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

// Named experiments runnable from a config file. Every experiment writes its
// artifacts into the output directory and returns a JSON summary; the
// runner adds manifest.json (version, seed, config hash, artifact list).
// Outputs depend only on the config and seed, never on the thread count.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clockq/analysis.hpp"
#include "clockq/benchmarking.hpp"
#include "clockq/builders.hpp"
#include "clockq/circuit.hpp"
#include "clockq/config.hpp"
#include "clockq/executor.hpp"
#include "clockq/fitting.hpp"
#include "clockq/metrology.hpp"
#include "clockq/noise.hpp"
#include "clockq/rydberg.hpp"
#include "clockq/svg.hpp"

namespace clockq {

inline constexpr const char* kVersion = "1.0.0";

struct RunContext {
  std::filesystem::path out;
  bool deterministic = true;
  std::vector<std::string> artifacts;

  std::string path(const std::string& name) {
    artifacts.push_back(name);
    const auto p = out / name;
    std::filesystem::create_directories(p.parent_path());
    return p.string();
  }
};

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << j.dump(2) << '\n';
}

inline std::string indexed(const std::string& stem, std::size_t i, const std::string& ext) {
  std::ostringstream o;
  o << stem << '_' << std::setw(3) << std::setfill('0') << i << ext;
  return o.str();
}

struct ExperimentInfo {
  std::string name;
  std::string description;
  bool needs_shots = false;
  std::vector<std::string> scan_variables;  // empty: no scan accepted
  bool scan_required = false;
  std::function<json(const ExperimentConfig&, RunContext&)> run;
};

namespace detail {

inline std::vector<std::size_t> size_list(const json& p, const std::string& key, std::vector<std::size_t> fallback) {
  return get_or(p, key, fallback);
}

// Fringe plot: data with binomial error bars plus fitted curves.
inline void fringe_svg(const std::vector<std::vector<ParityPoint>>& data, const std::vector<ParityFit>& fits,
                       const std::vector<std::string>& labels, const std::string& title, const std::string& x_label,
                       const std::string& path) {
  SvgPlot p;
  p.title = title;
  p.x_label = x_label;
  p.y_label = "parity";
  for (std::size_t s = 0; s < data.size(); ++s) {
    SvgSeries pts{labels[s] + " data", {}, {}, {}, true, false};
    for (const auto& d : data[s]) {
      const double q = static_cast<double>(d.k) / static_cast<double>(d.n);
      pts.x.push_back(d.phase);
      pts.y.push_back(d.parity());
      pts.err.push_back(2.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(d.n)));
    }
    p.series.push_back(pts);
    if (s < fits.size() && !data[s].empty()) {
      SvgSeries fit{labels[s] + " fit", {}, {}, {}, false, true};
      const double a = data[s].front().phase, b = data[s].back().phase;
      for (int i = 0; i <= 200; ++i) {
        const double x = a + (b - a) * i / 200.0;
        fit.x.push_back(x);
        fit.y.push_back(fits[s].parity(x));
      }
      p.series.push_back(fit);
    }
  }
  write_svg(p, path);
}

// Runs a phase scan: one circuit per scan value, shots written per point,
// parity collected over each atom subset.
inline std::vector<std::vector<ParityPoint>> phase_scan(const ExperimentConfig& cfg, RunContext& ctx,
                                                        const std::function<Circuit(double)>& make,
                                                        const std::vector<std::vector<std::size_t>>& subsets,
                                                        bool write_shots = true) {
  const auto grid = cfg.scan.grid();
  std::vector<std::vector<ParityPoint>> out(subsets.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Circuit c = make(grid[i]);
    ShotTable t = execute(c, cfg.noise, cfg.shots, derive_seed(cfg.seed, i));
    t.metadata["scan_variable"] = cfg.scan.variable;
    t.metadata["scan_value"] = grid[i];
    if (write_shots)
      write_shot_csv(t, ctx.path(indexed("shots/point", i, ".csv")), ctx.path(indexed("shots/point", i, ".json")));
    for (std::size_t s = 0; s < subsets.size(); ++s) out[s].push_back(parity_point(t, grid[i], subsets[s]));
  }
  return out;
}

inline json fit_both(const std::vector<ParityPoint>& data, const FitOptions& opt, ParityFit* mle_out = nullptr) {
  const ParityFit mle = mle_parity_fit(data, opt);
  const ParityFit wls = wls_fit(data, opt);
  if (mle_out) *mle_out = mle;
  return {{"mle", to_json(mle)}, {"wls", to_json(wls)}};
}

// Exact populations of all-zeros and all-ones over `sub` from shots.
inline std::pair<double, double> extreme_populations(const ShotTable& t, const std::vector<std::size_t>& sub) {
  return {t.probability(std::string(sub.size(), '0'), sub), t.probability(std::string(sub.size(), '1'), sub)};
}

inline json fringe_experiment(const ExperimentConfig& cfg, RunContext& ctx, const std::string& title,
                              const std::function<Circuit(double)>& make,
                              const std::vector<std::vector<std::size_t>>& subsets,
                              const std::vector<double>& freq_guess, const std::vector<std::string>& labels,
                              bool fix_frequency, std::vector<ParityFit>* fits_out = nullptr) {
  const auto data = phase_scan(cfg, ctx, make, subsets);
  json fits = json::array();
  std::vector<ParityFit> mles;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    write_parity_csv(data[s], ctx.path("parity_" + labels[s] + ".csv"));
    ParityFit m;
    json f = fit_both(data[s], {freq_guess[s], fix_frequency}, &m);
    f["label"] = labels[s];
    f["atoms"] = subsets[s];
    fits.push_back(f);
    mles.push_back(m);
  }
  write_json_file(fits, ctx.path("fit.json"));
  fringe_svg(data, mles, labels, title, "analysis phase (rad)", ctx.path("fringe.svg"));
  if (fits_out) *fits_out = mles;
  return {{"fits", fits}};
}

inline double fidelity_from_run(const ExperimentConfig& cfg, const Circuit& populations_circuit,
                                const std::vector<std::size_t>& sub, double contrast, RunContext& ctx,
                                json& summary) {
  ShotTable t = execute(populations_circuit, cfg.noise, cfg.shots, derive_seed(cfg.seed, 0x909));
  write_shot_csv(t, ctx.path("shots/populations.csv"), ctx.path("shots/populations.json"));
  const auto [p0, p1] = extreme_populations(t, sub);
  const double c = std::clamp(contrast, 0.0, 1.0);
  const double f = ghz_fidelity(std::min(1.0, p0 + p1), c);
  summary["population_all_zero"] = p0;
  summary["population_all_one"] = p1;
  summary["contrast"] = contrast;
  summary["fidelity"] = f;
  return f;
}

// --------------------------------------------------------------------------
// Experiments

inline json run_bell_parity(const ExperimentConfig& cfg, RunContext& ctx) {
  std::vector<ParityFit> fits;
  json s = fringe_experiment(
      cfg, ctx, "Bell parity fringe", [&](double phi) { return build_bell_circuit(cfg.builder, phi); }, {{0, 1}},
      {2.0}, {"pair"}, get_or(cfg.params, "fix_frequency", false), &fits);
  fidelity_from_run(cfg, build_bell_circuit(cfg.builder), {0, 1}, fits[0].contrast, ctx, s);
  return s;
}

inline json run_ghz_cascade(const ExperimentConfig& cfg, RunContext& ctx) {
  CascadeOptions opt;
  opt.include_z_quarter = get_or(cfg.params, "include_z_quarter", true);
  opt.extra_idle = get_or(cfg.params, "extra_idle_s", 0.0);
  opt.echo_steps = get_or(cfg.params, "echo_steps", std::vector<bool>{false, false, false});
  require(opt.echo_steps.size() == 3, "params.echo_steps needs three entries");
  std::vector<ParityFit> fits;
  json s = fringe_experiment(
      cfg, ctx, "GHZ cascade fringes",
      [&](double phi) {
        CascadeOptions o = opt;
        o.analysis_phase = phi;
        return build_ghz_cascade(cfg.builder, o);
      },
      cascade_groups(), {1.0, 2.0, 4.0}, {"k1", "k2", "k4"}, false, &fits);
  s["frequency_ratios"] = {1.0, fits[1].frequency / fits[0].frequency, fits[2].frequency / fits[0].frequency};
  return s;
}

inline json run_dual_quadrature(const ExperimentConfig& cfg, RunContext& ctx) {
  const bool single = get_or(cfg.params, "single_atom_move", false);
  std::vector<ParityFit> fits;
  json s = fringe_experiment(
      cfg, ctx, "Dual-quadrature GHZ-4 fringes",
      [&](double phi) { return build_dual_quadrature(cfg.builder, phi, single); }, {{0, 1, 2, 3}, {4, 5, 6, 7}},
      {4.0, 4.0}, {"copy1", "copy2"}, true, &fits);
  s["collective_phase_offset"] = wrap_phase(fits[1].phase - fits[0].phase);
  return s;
}

inline json run_ghz8(const ExperimentConfig& cfg, RunContext& ctx) {
  std::vector<ParityFit> fits;
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6, 7};
  json s = fringe_experiment(
      cfg, ctx, "GHZ-8 parity fringe", [&](double phi) { return build_ghz8(cfg.builder, phi); }, {all}, {8.0},
      {"ghz8"}, true, &fits);
  fidelity_from_run(cfg, build_ghz8(cfg.builder), all, fits[0].contrast, ctx, s);
  return s;
}

// Idle sweep of the GHZ-4 state: contrast per idle time from a phase scan,
// plus the error bitstrings of the no-analysis populations.
inline json run_ghz4_idle(const ExperimentConfig& cfg, RunContext& ctx) {
  const auto idles = cfg.scan.grid();
  const std::size_t npts = get_or<std::size_t>(cfg.params, "phase_points", 16);
  require(npts >= 8, "params.phase_points must be >= 8");
  const bool echo = get_or(cfg.params, "echo", false);
  std::ofstream csv(ctx.path("contrast.csv"));
  csv.precision(12);
  csv << "idle_s,contrast,contrast_err,population_0000_1111\n";
  json rows = json::array();
  SvgSeries series{"GHZ-4 contrast", {}, {}, {}, true, true};
  const std::vector<std::size_t> all{0, 1, 2, 3};
  for (std::size_t i = 0; i < idles.size(); ++i) {
    std::vector<ParityPoint> data;
    for (std::size_t k = 0; k < npts; ++k) {
      const double phi = kPi / 2.0 * static_cast<double>(k) / static_cast<double>(npts);
      const ShotTable t = execute(build_ghz4_idle(cfg.builder, idles[i], phi, echo), cfg.noise, cfg.shots,
                                  derive_seed(cfg.seed, i, k));
      data.push_back(parity_point(t, phi, all));
    }
    const ParityFit f = mle_parity_fit(data, {4.0, true});
    const ShotTable pop =
        execute(build_ghz4_idle(cfg.builder, idles[i], kNoAnalysis, echo), cfg.noise, cfg.shots,
                derive_seed(cfg.seed, i, 0x909));
    write_shot_csv(pop, ctx.path(indexed("shots/populations", i, ".csv")),
                   ctx.path(indexed("shots/populations", i, ".json")));
    auto counts = pop.counts();
    counts.erase("0000");
    counts.erase("1111");
    std::vector<std::pair<std::string, std::size_t>> errs(counts.begin(), counts.end());
    std::stable_sort(errs.begin(), errs.end(), [](auto& a, auto& b) { return a.second > b.second; });
    const auto [p0, p1] = extreme_populations(pop, all);
    csv << idles[i] << ',' << f.contrast << ',' << f.contrast_err << ',' << p0 + p1 << '\n';
    json e = json::array();
    for (std::size_t k = 0; k < std::min<std::size_t>(4, errs.size()); ++k)
      e.push_back({{"bitstring", errs[k].first}, {"count", errs[k].second}});
    rows.push_back({{"idle_s", idles[i]}, {"contrast", f.contrast}, {"contrast_err", f.contrast_err},
                    {"dominant_errors", e}});
    series.x.push_back(idles[i] * 1e6);
    series.y.push_back(f.contrast);
    series.err.push_back(f.contrast_err);
  }
  json s = {{"points", rows}};
  write_json_file(s, ctx.path("idle_sweep.json"));
  write_svg({"GHZ-4 contrast vs idle time", "idle time (us)", "contrast", {series}, {}}, ctx.path("contrast.svg"));
  return s;
}

// Weight-2 parity vs evolution time: ancilla-1 probability, fitted with a
// free frequency (Hz).
inline json run_weight2(const ExperimentConfig& cfg, RunContext& ctx) {
  const auto times = cfg.scan.grid();
  const bool direct = get_or(cfg.params, "direct", false);
  const double analysis = get_or(cfg.params, "analysis_phase", 0.0);
  std::vector<ParityPoint> data;
  for (std::size_t i = 0; i < times.size(); ++i) {
    ShotTable t = execute(build_weight2_parity(cfg.builder, times[i], analysis, direct), cfg.noise, cfg.shots,
                          derive_seed(cfg.seed, i));
    write_shot_csv(t, ctx.path(indexed("shots/point", i, ".csv")), ctx.path(indexed("shots/point", i, ".json")));
    std::size_t hits = 0;
    for (const auto& sh : t.shots) {
      if (direct) hits += (sh.bits[0] == sh.bits[1]);
      else hits += (!sh.ancilla.empty() && sh.ancilla[0] == 1);
    }
    // Scan variable 2 pi t so the fitted frequency is in Hz.
    data.push_back({kTwoPi * times[i], hits, t.size()});
  }
  const double guess = 2.0 * cfg.builder.ramsey_detuning;
  require(guess > 0.0, "weight2-parity needs builder.ramsey_detuning_hz > 0");
  ParityFit mle;
  json fits = fit_both(data, {guess, false}, &mle);
  write_parity_csv(data, ctx.path("parity.csv"));
  write_json_file(fits, ctx.path("fit.json"));
  fringe_svg({data}, {mle}, {direct ? "direct" : "ancilla"}, "Weight-2 parity vs time", "2 pi t (rad s)",
             ctx.path("fringe.svg"));
  return {{"fits", fits}, {"frequency_hz", mle.frequency}, {"expected_hz", guess}};
}

inline json run_cluster_bell(const ExperimentConfig& cfg, RunContext& ctx) {
  const Circuit c = build_cluster_bell(cfg.builder);
  ShotTable t = execute(c, cfg.noise, cfg.shots, cfg.seed);
  write_shot_csv(t, ctx.path("shots/shots.csv"), ctx.path("shots/shots.json"));
  std::size_t n1 = 0, agree0 = 0, anti1 = 0;
  for (const auto& s : t.shots) {
    const bool one = !s.ancilla.empty() && s.ancilla[0] == 1;
    n1 += one;
    if (one) anti1 += s.bits[0] != s.bits[2];
    else agree0 += s.bits[0] == s.bits[2];
  }
  const std::size_t n0 = t.size() - n1;
  json exact = json::array();
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<std::vector<cplx>> targets{{r, 0, 0, r}, {0, r, -r, 0}};
  for (int o = 0; o < 2; ++o) {
    const auto [st, prob] = ideal_state(c, {o});
    // Reduced amplitudes of atoms (0,2) with atom 1 in its measured level.
    std::vector<cplx> pair(4);
    for (std::size_t b0 = 0; b0 < 2; ++b0)
      for (std::size_t b2 = 0; b2 < 2; ++b2) pair[2 * b0 + b2] = st.amps[basis_index({b0, static_cast<std::size_t>(o), b2}, st.levels)];
    cplx ov = 0;
    double norm = 0;
    for (int k = 0; k < 4; ++k) {
      ov += std::conj(targets[o][k]) * pair[k];
      norm += std::norm(pair[k]);
    }
    exact.push_back({{"ancilla", o}, {"probability", prob}, {"target", o == 0 ? "Phi+" : "Psi-"},
                     {"fidelity", std::norm(ov) / norm}});
  }
  json s = {{"ancilla_one_fraction", static_cast<double>(n1) / static_cast<double>(t.size())},
            {"zz_agree_given_0", n0 ? static_cast<double>(agree0) / static_cast<double>(n0) : 0.0},
            {"zz_disagree_given_1", n1 ? static_cast<double>(anti1) / static_cast<double>(n1) : 0.0},
            {"exact", exact}};
  write_json_file(s, ctx.path("cluster.json"));
  return s;
}

// Repeated QLS rounds with a final Ramsey fringe; fringes conditioned on
// the all-zero ancilla record versus unconditioned.
inline json run_qls(const ExperimentConfig& cfg, RunContext& ctx) {
  const auto times = get_or(cfg.params, "evolution_times_s", std::vector<double>{1e-3});
  QlsOptions opt;
  opt.reuse_ancilla = get_or(cfg.params, "reuse_ancilla", false);
  opt.mcr_duration = get_or(cfg.params, "mcr_duration_s", opt.mcr_duration);
  QlsRoles roles;
  roles.reference.reset();
  const auto grid = cfg.scan.grid();
  std::vector<ParityPoint> all, cond;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ShotTable t = execute(build_repeated_qls(cfg.builder, times, grid[i], roles, opt), cfg.noise, cfg.shots,
                          derive_seed(cfg.seed, i));
    write_shot_csv(t, ctx.path(indexed("shots/point", i, ".csv")), ctx.path(indexed("shots/point", i, ".json")));
    std::vector<bool> mask(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
      mask[k] = std::all_of(t.shots[k].ancilla.begin(), t.shots[k].ancilla.end(), [](auto a) { return a == 0; });
    const ShotTable c = t.filter(mask);
    all.push_back(parity_point(t, grid[i], {roles.clock}));
    if (c.size() > 0) cond.push_back(parity_point(c, grid[i], {roles.clock}));
  }
  ParityFit fa, fc;
  json s;
  s["unconditioned"] = fit_both(all, {1.0, true}, &fa);
  if (cond.size() >= 8 && std::all_of(cond.begin(), cond.end(), [](auto& p) { return p.n >= 10; }))
    s["conditioned_all_zero"] = fit_both(cond, {1.0, true}, &fc);
  write_parity_csv(all, ctx.path("parity_unconditioned.csv"));
  if (!cond.empty()) write_parity_csv(cond, ctx.path("parity_conditioned.csv"));
  write_json_file(s, ctx.path("fit.json"));
  fringe_svg({all}, {fa}, {"unconditioned"}, "QLS final Ramsey fringe", "analysis phase (rad)",
             ctx.path("fringe.svg"));
  return s;
}

inline json run_benchmark_experiment(const ExperimentConfig& cfg, RunContext& ctx) {
  BenchmarkOptions opt;
  const BenchmarkFamily fam = family_from_name(get_or<std::string>(cfg.params, "family", "ssb"));
  opt.depths = size_list(cfg.params, "depths", {2, 6, 12, 20});
  opt.circuits_per_depth = get_or<std::size_t>(cfg.params, "circuits_per_depth", 20);
  opt.shots_per_circuit = cfg.shots;
  opt.ssb_layers = get_or<std::size_t>(cfg.params, "ssb_layers", 0);
  opt.exact_readout = get_or(cfg.params, "exact_readout", false);
  opt.seed = cfg.seed;
  opt.validate();
  const BenchmarkRun run = run_benchmark(fam, opt, cfg.noise, cfg.builder);
  const DecayFit fit = fit_decay(run);
  const double leak = get_or(cfg.params, "leak_per_gate", 0.0);
  const json s = benchmark_summary(run, fit, leak, get_or(cfg.params, "leak_per_gate_err", 0.0));
  write_benchmark_csv(run, ctx.path("decay.csv"));
  write_json_file(s, ctx.path("fidelity.json"));
  SvgSeries data{"return probability", {}, run.return_prob, run.err, true, false};
  SvgSeries model{"A p^N fit", {}, {}, {}, false, true};
  for (auto d : run.depths) data.x.push_back(static_cast<double>(d));
  const double dmax = static_cast<double>(run.depths.back());
  for (int i = 0; i <= 100; ++i) {
    const double x = dmax * i / 100.0;
    model.x.push_back(x);
    model.y.push_back(fit.amplitude * std::pow(fit.p, x));
  }
  write_svg({std::string(family_name(fam)) + " decay", "N", "return probability", {data, model}, {}},
            ctx.path("decay.svg"));
  return s;
}

inline json run_ramsey(const ExperimentConfig& cfg, RunContext& ctx) {
  const auto t = cfg.scan.grid();
  RamseyOptions opt;
  opt.seed = cfg.seed;
  const auto c = ramsey_contrast_curve(cfg.noise.clock_psd, t, cfg.shots, opt);
  std::ofstream f(ctx.path("ramsey.csv"));
  f.precision(12);
  f << "dark_time_s,contrast\n";
  for (std::size_t i = 0; i < t.size(); ++i) f << t[i] << ',' << c[i] << '\n';
  const json s = {{"coherence_time_1e_s", coherence_time_1e(t, c)}};
  write_json_file(s, ctx.path("ramsey.json"));
  write_svg({"Ramsey contrast", "dark time (s)", "contrast", {{"contrast", t, c, {}, true, true}}, {}},
            ctx.path("ramsey.svg"));
  return s;
}

// Spin-lock decay rate versus a multiplicative PSD scale.
inline json run_spin_lock(const ExperimentConfig& cfg, RunContext& ctx) {
  const auto scales = cfg.scan.grid();
  const double duration = get_or(cfg.params, "duration_s", 0.05);
  const double rabi = get_or(cfg.params, "rabi_hz", cfg.noise.clock_rabi);
  const std::size_t points = get_or<std::size_t>(cfg.params, "points", 400);
  require(points >= 3, "params.points must be >= 3");
  std::vector<double> rates;
  std::ofstream f(ctx.path("spin_lock.csv"));
  f.precision(12);
  f << "psd_scale,rate_per_s,rate_err\n";
  for (std::size_t i = 0; i < scales.size(); ++i) {
    require(scales[i] > 0.0, "spin-lock psd scales must be positive");
    // Common random numbers: every scale reuses the same Gaussian draws, so
    // rate differences reflect the PSD scale rather than sampling noise.
    SpinLockOptions o;
    o.seed = cfg.seed;
    o.points = points;
    const auto r = simulate_spin_lock(cfg.noise.clock_psd.scaled(scales[i]), rabi, duration, cfg.shots, o);
    rates.push_back(r.rate);
    f << scales[i] << ',' << r.rate << ',' << r.rate_err << '\n';
  }
  json s = {{"rates_per_s", rates}};
  if (scales.size() >= 2) {
    const LineFit lf = fit_line(scales, rates);
    s["slope"] = lf.slope;
    s["intercept"] = lf.intercept;
    s["r_squared"] = lf.r2;
  }
  write_json_file(s, ctx.path("spin_lock.json"));
  write_svg({"Spin-lock decay rate", "PSD scale", "rate (1/s)", {{"rate", scales, rates, {}, true, true}}, {}},
            ctx.path("spin_lock.svg"));
  return s;
}

inline json run_trajectory(const ExperimentConfig& cfg, RunContext& ctx) {
  const double duration = get_or(cfg.params, "duration_s", 0.1);
  const double rate = get_or(cfg.params, "sample_rate_hz", cfg.noise.trajectory_rate);
  const auto tr = sample_trajectory(cfg.noise.clock_psd, duration, rate, cfg.seed);
  write_trajectory_csv(tr, ctx.path("trajectory.csv"));
  const auto pg = periodogram(tr);
  std::ofstream f(ctx.path("periodogram.csv"));
  f.precision(12);
  f << "frequency_hz,psd_hz2_per_hz,target_hz2_per_hz\n";
  const double df = tr.sample_rate / static_cast<double>(tr.samples.size());
  for (std::size_t k = 0; k < pg.size(); ++k) {
    const double fk = df * static_cast<double>(k + 1);
    f << fk << ',' << pg[k] << ',' << psd_value_unchecked(cfg.noise.clock_psd, fk) << '\n';
  }
  return {{"samples", tr.samples.size()}, {"sample_rate_hz", tr.sample_rate}};
}

inline json run_cz_calibration(const ExperimentConfig& cfg, RunContext& ctx) {
  CalibrationOptions opt;
  opt.seed = cfg.seed;
  opt.restarts = get_or<std::size_t>(cfg.params, "restarts", opt.restarts);
  const double rabi = get_or(cfg.params, "rabi_hz", 5.4e6);
  const double blockade = get_or(cfg.params, "blockade_hz", 0.0);
  const RydbergPulse p = calibrate_pulse(rabi, blockade, opt);
  json pj = p;
  write_json_file(pj, ctx.path("pulse.json"));
  json s = {{"average_gate_infidelity", p.infidelity}, {"bell_infidelity", bell_infidelity(p)}};
  if (cfg.shots > 0) {
    const auto r = simulate_cz_mcwf(p, cfg.noise.rydberg_noise, plus_plus_state(), cfg.shots, cfg.seed);
    s["mcwf_bell_fidelity"] = r.mean_fidelity;
    s["mcwf_bell_fidelity_sem"] = r.fidelity_sem;
    s["mcwf_leak_fraction"] = r.leak_fraction;
  }
  write_json_file(s, ctx.path("calibration.json"));
  return s;
}

inline ContrastModel contrast_from_params(const json& p) {
  const std::string kind = get_or<std::string>(p, "contrast", "perfect");
  if (kind == "perfect") return ContrastModel::perfect();
  if (kind == "fidelity") return ContrastModel::fidelity(get_or(p, "f0", 1.0));
  if (kind == "list") return ContrastModel::list(get_or(p, "contrast_list", std::vector<double>{}));
  throw ConfigError("params.contrast must be perfect, fidelity or list");
}

inline GainProblem gain_problem_from_params(const json& p) {
  GainProblem g;
  const std::size_t groups = get_or<std::size_t>(p, "groups", 3);
  const auto copies = size_list(p, "copies", {6});
  g.layout = cascade_layout(groups, copies);
  if (p.contains("x_copies")) g.layout.x_copies = size_list(p, "x_copies", {});
  g.contrast = contrast_from_params(p);
  g.prior_width = get_or(p, "prior_width_rad", 0.7);
  const std::string prior = get_or<std::string>(p, "prior", "truncated");
  require(prior == "truncated" || prior == "wrapped", "params.prior must be truncated or wrapped");
  g.prior = prior == "truncated" ? PriorMode::kTruncated : PriorMode::kWrapped;
  const std::string cost = get_or<std::string>(p, "cost", "squared");
  require(cost == "squared" || cost == "circular", "params.cost must be squared or circular");
  g.cost = cost == "squared" ? CostMode::kSquared : CostMode::kCircular;
  const std::string base = get_or<std::string>(p, "baseline_contrast", "single_atom");
  require(base == "single_atom" || base == "perfect", "params.baseline_contrast must be single_atom or perfect");
  g.baseline = base == "perfect" ? BaselineContrast::kPerfect : BaselineContrast::kSameAsSingleAtom;
  g.grid_points = get_or<std::size_t>(p, "grid_points", 0);
  g.validate();
  return g;
}

// Gain of one problem; optional curves versus F0 (scan variable "f0") or
// versus K_max (params.kmax_copies: copies per cascade length).
inline json run_gain(const ExperimentConfig& cfg, RunContext& ctx) {
  const GainProblem base = gain_problem_from_params(cfg.params);
  const GainResult r = estimate_gain(base);
  json s = {{"result", to_json(r)},
            {"asymptotic_gain", asymptotic_gain(r.atoms)},
            {"copies_required", copies_required(r.atoms)},
            {"prior", prior_name(base.prior)},
            {"cost", cost_name(base.cost)}};
  if (cfg.has_scan) {
    require(cfg.scan.variable == "f0", "gain scans support variable f0");
    GainCurve curve{"f0", {}, {}};
    for (double f : cfg.scan.grid()) {
      GainProblem p = base;
      p.contrast = ContrastModel::fidelity(f);
      curve.x.push_back(f);
      curve.gain.push_back(estimate_gain(p, false).gain);
    }
    write_gain_csv(curve, ctx.path("gain_vs_f0.csv"));
    write_gain_svg({curve}, {"cascade"}, "Gain vs per-qubit fidelity", ctx.path("gain_vs_f0.svg"));
    s["curve_f0"] = {{"f0", curve.x}, {"gain", curve.gain}};
  }
  if (cfg.params.contains("kmax_copies")) {
    const auto copies = size_list(cfg.params, "kmax_copies", {});
    GainCurve curve{"k_max", {}, {}};
    for (std::size_t m = 0; m < copies.size(); ++m) {
      GainProblem p = base;
      p.layout = cascade_layout(m + 1, {copies[m]});
      curve.x.push_back(static_cast<double>(std::size_t{1} << m));
      curve.gain.push_back(estimate_gain(p, false).gain);
    }
    write_gain_csv(curve, ctx.path("gain_vs_kmax.csv"));
    write_gain_svg({curve}, {"cascade"}, "Gain vs largest GHZ size", ctx.path("gain_vs_kmax.svg"));
    s["curve_kmax"] = {{"k_max", curve.x}, {"gain", curve.gain}};
  }
  write_json_file(s, ctx.path("gain.json"));
  return s;
}

inline json run_spam(const ExperimentConfig& cfg, RunContext& ctx) {
  const SpamModel spam = spam_from_json(get_or(cfg.params, "spam", json::object()));
  json s = {{"spam", to_json(spam)}, {"A", spam.a()}, {"C", spam.c()}};
  if (cfg.params.contains("raw_probabilities")) {
    const auto raw = get_or(cfg.params, "raw_probabilities", std::vector<double>{});
    const auto m = measurement_correct(raw, spam);
    s["measurement_corrected"] = m.probabilities;
    s["clipped"] = m.clipped;
  }
  if (cfg.params.contains("bell_measured")) {
    const auto b = get_or(cfg.params, "bell_measured", std::vector<double>{});
    require(b.size() == 3, "params.bell_measured needs (P00, P11, C)");
    const auto pc = state_prep_correct(b[0], b[1], b[2], spam);
    s["state_prep_corrected"] = {{"p00", pc.p00}, {"p11", pc.p11}, {"contrast", pc.contrast},
                                 {"population", pc.p00 + pc.p11}, {"out_of_range", pc.out_of_range}};
  }
  write_json_file(s, ctx.path("spam.json"));
  return s;
}

inline json run_circuit_file(const ExperimentConfig& cfg, RunContext& ctx) {
  const std::string path = get_or<std::string>(cfg.params, "circuit", "");
  require(!path.empty(), "params.circuit (path to a circuit text file) is required");
  const Circuit c = read_circuit(path);
  ShotTable t = execute(c, cfg.noise, cfg.shots, cfg.seed);
  write_shot_csv(t, ctx.path("shots/shots.csv"), ctx.path("shots/shots.json"));
  write_circuit(c, ctx.path("circuit.txt"));
  json counts = json::object();
  for (const auto& [k, v] : t.counts()) counts[k] = v;
  return {{"counts", counts}, {"duration_s", c.duration()}};
}

}  // namespace detail

inline const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg = {
      {"bell-parity", "Bell pair parity fringe: parity CSV, MLE/WLS fit JSON, fringe SVG, Bell fidelity", true,
       {"phase"}, true, detail::run_bell_parity},
      {"ghz-cascade", "Seven-atom 1/2/4 GHZ cascade fringes with fitted frequency ratios", true, {"phase"}, true,
       detail::run_ghz_cascade},
      {"dual-quadrature", "Two GHZ-4 copies offset by a collective pi/2 phase", true, {"phase"}, true,
       detail::run_dual_quadrature},
      {"ghz8", "Eight-atom GHZ parity fringe and fidelity", true, {"phase"}, true, detail::run_ghz8},
      {"ghz4-idle", "GHZ-4 contrast and dominant error bitstrings versus idle time", true, {"idle_time_s"}, true,
       detail::run_ghz4_idle},
      {"weight2-parity", "Weight-2 parity via ancilla mapping versus evolution time", true, {"evolution_time_s"},
       true, detail::run_weight2},
      {"cluster-bell", "Three-atom cluster with middle-atom readout: conditional Bell states", true, {}, false,
       detail::run_cluster_bell},
      {"qls", "Repeated quantum logic spectroscopy rounds with a final Ramsey fringe", true, {"phase"}, true,
       detail::run_qls},
      {"benchmark", "SSB / echo / pi/2 benchmarking decay: decay CSV, fidelity JSON, SVG", true, {}, false,
       detail::run_benchmark_experiment},
      {"ramsey", "Ramsey contrast versus dark time under the clock laser PSD", true, {"dark_time_s"}, true,
       detail::run_ramsey},
      {"spin-lock", "Spin-lock decay rate versus PSD magnitude", true, {"psd_scale"}, true, detail::run_spin_lock},
      {"trajectory", "Laser frequency trajectory CSV and its periodogram", false, {}, false, detail::run_trajectory},
      {"cz-calibration", "Time-optimal CZ pulse calibration: pulse JSON and Bell infidelity", false, {}, false,
       detail::run_cz_calibration},
      {"gain", "Bayesian metrological gain of GHZ cascades, optional gain curves (CSV + SVG)", false, {"f0"}, false,
       detail::run_gain},
      {"spam", "Measurement and state-preparation error corrections", false, {}, false, detail::run_spam},
      {"circuit", "Executes a circuit text file and writes the shot table", true, {}, false,
       detail::run_circuit_file},
  };
  return reg;
}

inline const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return &e;
  return nullptr;
}

// Schema and range checks; returns an empty list for a valid config.
inline std::vector<std::string> validate_config(const json& j) {
  std::vector<std::string> diag;
  ExperimentConfig cfg;
  try {
    cfg = parse_config(j);
  } catch (const ConfigError& e) {
    diag.push_back(e.what());
    return diag;
  }
  const ExperimentInfo* info = find_experiment(cfg.experiment);
  if (!info) {
    diag.push_back("unknown experiment '" + cfg.experiment + "'");
    return diag;
  }
  if (info->needs_shots && cfg.shots == 0) diag.push_back("experiment '" + info->name + "' requires shots");
  if (info->scan_required && !cfg.has_scan) diag.push_back("experiment '" + info->name + "' requires a scan");
  if (cfg.has_scan) {
    const auto& v = info->scan_variables;
    if (std::find(v.begin(), v.end(), cfg.scan.variable) == v.end())
      diag.push_back("scan variable '" + cfg.scan.variable + "' is not supported by '" + info->name + "'");
  }
  if (info->name == "gain") {
    try {
      (void)detail::gain_problem_from_params(cfg.params);
    } catch (const ConfigError& e) {
      diag.push_back(e.what());
    }
  }
  return diag;
}

// Runs a validated config into `out`; returns the manifest.
inline json run_experiment(const json& doc, const std::filesystem::path& out, bool deterministic) {
  const auto diag = validate_config(doc);
  if (!diag.empty()) throw ConfigError(diag.front());
  const ExperimentConfig cfg = parse_config(doc);
  const ExperimentInfo* info = find_experiment(cfg.experiment);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
  RunContext ctx{out, deterministic, {}};
  json summary = info->run(cfg, ctx);
  write_json_file(summary, ctx.path("summary.json"));
  json manifest = {{"tool", "clockq"},
                   {"version", kVersion},
                   {"experiment", cfg.experiment},
                   {"seed", cfg.seed},
                   {"config_hash", config_hash(doc)},
                   {"config", doc},
                   {"artifacts", ctx.artifacts}};
  if (!deterministic) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    manifest["created_utc"] = ts.str();
  }
  write_json_file(manifest, (out / "manifest.json").string());
  return manifest;
}

}  // namespace clockq
