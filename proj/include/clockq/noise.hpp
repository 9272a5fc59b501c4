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

// Clock-laser frequency noise: PSD model, Gaussian trajectory synthesis,
// and the Ramsey / spin-lock experiments that characterize it. Thermal
// motion enters as a per-shot Rabi-frequency scaling.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <utility>
#include <vector>

#include "json.hpp"

#include "clockq/core.hpp"
#include "clockq/fitting.hpp"

namespace clockq {

// One-sided laser frequency PSD in Hz^2/Hz:
//   S(f) = min(H, h0 + (h_alpha / f)^alpha)
// Optionally replaced by a tabulated spectrum (log-log interpolation),
// so measured laser spectra can be supplied directly.
struct ClockPsd {
  double h0 = 0.0;
  double h_alpha = 0.0;
  double alpha = 1.0;
  double H = 0.0;
  double f_min = 1e-3;
  double f_max = 1e7;
  std::vector<std::pair<double, double>> table;  // (f, S) sorted by f

  bool is_zero() const {
    if (!table.empty())
      return std::all_of(table.begin(), table.end(), [](auto& p) { return p.second == 0.0; });
    return H == 0.0 || (h0 == 0.0 && h_alpha == 0.0 && alpha != 0.0);
  }

  void validate() const {
    require(std::isfinite(h0) && h0 >= 0.0, "psd h0 must be >= 0");
    require(std::isfinite(h_alpha) && h_alpha >= 0.0, "psd h_alpha must be >= 0");
    require(std::isfinite(alpha) && alpha >= 0.0, "psd alpha must be >= 0");
    require(std::isfinite(H) && H >= 0.0, "psd cap H must be >= 0");
    require(f_min > 0.0 && f_max > f_min, "psd band must satisfy 0 < f_min < f_max");
    for (std::size_t i = 0; i < table.size(); ++i) {
      require(table[i].first > 0.0 && table[i].second >= 0.0, "psd table entries must be positive");
      if (i) require(table[i].first > table[i - 1].first, "psd table must be sorted by frequency");
    }
  }

  // Multiplies the spectrum by k at every frequency.
  ClockPsd scaled(double k) const {
    ClockPsd p = *this;
    p.h0 *= k;
    p.H *= k;
    if (alpha > 0.0) p.h_alpha *= std::pow(k, 1.0 / alpha);
    for (auto& e : p.table) e.second *= k;
    return p;
  }
};

inline double psd_value_unchecked(const ClockPsd& p, double f) {
  if (!p.table.empty()) {
    const auto& t = p.table;
    if (f <= t.front().first) return t.front().second;
    if (f >= t.back().first) return t.back().second;
    auto it = std::upper_bound(t.begin(), t.end(), f, [](double v, const auto& e) { return v < e.first; });
    const auto& [f1, s1] = *it;
    const auto& [f0, s0] = *(it - 1);
    if (s0 <= 0.0 || s1 <= 0.0) return s0 + (s1 - s0) * (f - f0) / (f1 - f0);
    const double w = std::log(f / f0) / std::log(f1 / f0);
    return std::exp(std::log(s0) + w * (std::log(s1) - std::log(s0)));
  }
  return std::min(p.H, p.h0 + std::pow(p.h_alpha / f, p.alpha));
}

inline double psd_eval(const ClockPsd& p, double f) {
  require(f >= p.f_min && f <= p.f_max, "frequency outside the PSD band of validity");
  return psd_value_unchecked(p, f);
}

struct FrequencyTrajectory {
  double sample_rate = 1.0;
  std::vector<double> samples;  // instantaneous detuning, Hz
  std::uint64_t seed = 0;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }

  double at(double t) const {
    if (samples.empty()) return 0.0;
    const auto n = static_cast<long long>(samples.size());
    long long k = static_cast<long long>(std::floor(t * sample_rate));
    k %= n;
    if (k < 0) k += n;
    return samples[static_cast<std::size_t>(k)];
  }

  // Accumulated phase 2*pi*integral(detuning) over [t0, t1], treating the
  // trajectory as piecewise constant between samples.
  double phase(double t0, double t1) const {
    if (samples.empty() || t1 <= t0) return 0.0;
    const double dt = 1.0 / sample_rate;
    double acc = 0.0;
    double t = t0;
    while (t < t1 - 1e-15) {
      const double cell_end = (std::floor(t * sample_rate + 1e-9) + 1.0) * dt;
      const double seg_end = std::min(cell_end, t1);
      acc += at(t + 0.5 * (seg_end - t)) * (seg_end - t);
      t = seg_end;
    }
    return kTwoPi * acc;
  }
};

namespace detail {
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// Spectral synthesis: complex Gaussian Fourier coefficients with variance
// set by S(f_k)*df at the periodogram frequencies f_k = k/T, transformed
// with a real inverse FFT. The ensemble one-sided periodogram equals S at
// every bin inside [f_min, f_max]; bins outside the band are left empty.
inline FrequencyTrajectory sample_trajectory(const ClockPsd& psd, double duration,
                                             double sample_rate, std::uint64_t seed) {
  psd.validate();
  require(duration > 0.0 && sample_rate > 0.0, "duration and sample rate must be positive");
  const double nd = std::ceil(duration * sample_rate);
  require(nd < 1e8, "trajectory too long (duration * sample_rate overflow guard)");
  std::size_t n = static_cast<std::size_t>(nd);
  if (n % 2) ++n;
  n = std::max<std::size_t>(n, 2);

  FrequencyTrajectory tr;
  tr.sample_rate = sample_rate;
  tr.seed = seed;
  tr.samples.assign(n, 0.0);
  if (psd.is_zero()) return tr;

  const double df = sample_rate / static_cast<double>(n);
  const std::size_t nc = n / 2 + 1;
  fftw_complex* spectrum = fftw_alloc_complex(nc);
  double* out = fftw_alloc_real(n);
  Rng rng = make_rng(seed, 0x7a11);
  spectrum[0][0] = spectrum[0][1] = 0.0;
  for (std::size_t k = 1; k < nc; ++k) {
    const double f = static_cast<double>(k) * df;
    const double s = (f >= psd.f_min && f <= psd.f_max) ? psd_value_unchecked(psd, f) : 0.0;
    const double a = std_normal(rng), b = std_normal(rng);
    if (k == n / 2) {
      spectrum[k][0] = std::sqrt(s * df) * a;
      spectrum[k][1] = 0.0;
    } else {
      const double sig = std::sqrt(s * df / 4.0);
      spectrum[k][0] = sig * a;
      spectrum[k][1] = sig * b;
    }
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  for (std::size_t i = 0; i < n; ++i) tr.samples[i] = out[i];
  {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(spectrum);
  fftw_free(out);
  return tr;
}

// One-sided periodogram (Hz^2/Hz) at bins k = 1..n/2, f_k = k*fs/n.
inline std::vector<double> periodogram(const FrequencyTrajectory& tr) {
  const std::size_t n = tr.samples.size();
  const std::size_t nc = n / 2 + 1;
  std::vector<double> in(tr.samples);
  fftw_complex* spectrum = fftw_alloc_complex(nc);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), spectrum, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::vector<double> p(nc - 1);
  const double norm = static_cast<double>(n) * tr.sample_rate;
  for (std::size_t k = 1; k < nc; ++k) {
    const double m2 = spectrum[k][0] * spectrum[k][0] + spectrum[k][1] * spectrum[k][1];
    p[k - 1] = (k == n / 2 ? 1.0 : 2.0) * m2 / norm;
  }
  {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(spectrum);
  return p;
}

inline void write_trajectory_csv(const FrequencyTrajectory& tr, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f.precision(12);
  f << "time_s,detuning_hz\n";
  for (std::size_t i = 0; i < tr.samples.size(); ++i)
    f << static_cast<double>(i) / tr.sample_rate << ',' << tr.samples[i] << '\n';
}

struct RamseyOptions {
  double sample_rate = 0.0;          // 0: 64 samples per longest dark time
  double trajectory_duration = 0.0;  // 0: long enough to resolve f_min (see below)
  std::uint64_t seed = 1;
};

// Default Ramsey trajectory window: at least 4x the longest dark time and at
// least 1/f_min, so the slow part of the spectrum (which dominates the phase
// variance of white and flicker noise) is synthesized rather than dropped.
// Capped at 2^22 samples; beyond the cap the band below 1/window is missing.
inline double ramsey_window(const ClockPsd& psd, double tmax, double sample_rate) {
  double dur = 4.0 * tmax;
  if (psd.f_min > 0.0) dur = std::max(dur, 1.0 / psd.f_min);
  return std::min(dur, std::max(4.0 * tmax, 4194304.0 / sample_rate));
}

// Ramsey fringe contrast |<exp(i phi)>| versus dark time. Each shot draws
// one trajectory and reads the accumulated phase for every dark time, so
// the curve is computed from trajectories only.
inline std::vector<double> ramsey_contrast_curve(const ClockPsd& psd, const std::vector<double>& dark_times,
                                                 std::size_t shots, const RamseyOptions& opt = {}) {
  require(!dark_times.empty(), "need at least one dark time");
  for (double t : dark_times) require(t > 0.0, "dark time must be positive");
  require(shots >= 1, "need at least one shot");
  const double tmax = *std::max_element(dark_times.begin(), dark_times.end());
  const double fs = opt.sample_rate > 0 ? opt.sample_rate : 64.0 / tmax;
  const double dur = opt.trajectory_duration > 0 ? opt.trajectory_duration : ramsey_window(psd, tmax, fs);
  std::vector<std::vector<cplx>> per_shot(shots, std::vector<cplx>(dark_times.size()));
  parallel_for(shots, [&](std::size_t s) {
    const auto tr = sample_trajectory(psd, dur, fs, derive_seed(opt.seed, s));
    for (std::size_t i = 0; i < dark_times.size(); ++i)
      per_shot[s][i] = std::exp(kI * tr.phase(0.0, dark_times[i]));
  });
  std::vector<double> c(dark_times.size());
  for (std::size_t i = 0; i < dark_times.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t s = 0; s < shots; ++s) acc += per_shot[s][i];
    c[i] = std::abs(acc) / static_cast<double>(shots);
  }
  return c;
}

inline double simulate_ramsey(const ClockPsd& psd, double dark_time, std::size_t shots,
                              const RamseyOptions& opt = {}) {
  return ramsey_contrast_curve(psd, {dark_time}, shots, opt).front();
}

// 1/e coherence time from a monotone contrast curve by log-linear
// interpolation between the bracketing points; returns the last dark time
// if contrast never reaches 1/e.
inline double coherence_time_1e(const std::vector<double>& t, const std::vector<double>& c) {
  const double target = std::exp(-1.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (c[i] <= target && c[i - 1] > target) {
      const double l0 = std::log(std::max(c[i - 1], 1e-12)), l1 = std::log(std::max(c[i], 1e-12));
      return t[i - 1] + (std::log(target) - l0) * (t[i] - t[i - 1]) / (l1 - l0);
    }
  }
  return t.back();
}

struct SpinLockOptions {
  double sample_rate = 0.0;   // 0: 40 samples per Rabi period
  std::size_t points = 40;    // time grid resolution for the decay curve
  std::uint64_t seed = 1;
};

struct SpinLockResult {
  double rate = 0.0;       // decay rate of the locked spin projection, 1/s
  double rate_err = 0.0;
  bool decaying = true;    // false when the signal never decays measurably
  std::vector<double> times;
  std::vector<double> signal;  // <sigma_x>, 1 at t = 0
};

// Spin lock: the spin is prepared along the drive axis (x) and driven at
// Rabi frequency `rabi` while the trajectory detuning acts along z. The
// decay of <sigma_x> probes the noise spectrum near f = rabi.
inline SpinLockResult simulate_spin_lock(const ClockPsd& psd, double rabi, double duration,
                                         std::size_t shots, const SpinLockOptions& opt = {}) {
  require(rabi > 0.0 && duration > 0.0 && shots >= 1, "spin lock needs rabi, duration, shots > 0");
  require(rabi >= psd.f_min && rabi <= psd.f_max, "rabi frequency outside the PSD band");
  const double fs = opt.sample_rate > 0 ? opt.sample_rate : 40.0 * rabi;
  const double dt = 1.0 / fs;
  const std::size_t nsteps = static_cast<std::size_t>(std::ceil(duration * fs));
  const std::size_t stride = std::max<std::size_t>(1, nsteps / opt.points);
  const std::size_t npts = nsteps / stride + 1;
  std::vector<std::vector<double>> sx(shots, std::vector<double>(npts, 0.0));
  parallel_for(shots, [&](std::size_t s) {
    const auto tr = sample_trajectory(psd, duration + dt, fs, derive_seed(opt.seed, s));
    // State |+x>; H = pi*(rabi*sigma_x + delta*sigma_z) in rad/s.
    cplx a0 = 1.0 / std::sqrt(2.0), a1 = 1.0 / std::sqrt(2.0);
    sx[s][0] = 1.0;
    for (std::size_t k = 0; k < nsteps; ++k) {
      const double hx = kPi * rabi, hz = kPi * tr.samples[k];
      const double h = std::hypot(hx, hz);
      const double c = std::cos(h * dt), sn = std::sin(h * dt) / h;
      // exp(-i dt (hx X + hz Z)) = c I - i sn (hx X + hz Z)
      const cplx n0 = (c - kI * sn * hz) * a0 - kI * sn * hx * a1;
      const cplx n1 = -kI * sn * hx * a0 + (c + kI * sn * hz) * a1;
      a0 = n0;
      a1 = n1;
      if ((k + 1) % stride == 0 && (k + 1) / stride < npts)
        sx[s][(k + 1) / stride] = 2.0 * std::real(std::conj(a0) * a1);
    }
  });
  SpinLockResult r;
  r.times.resize(npts);
  r.signal.assign(npts, 0.0);
  for (std::size_t i = 0; i < npts; ++i) {
    r.times[i] = static_cast<double>(i * stride) * dt;
    for (std::size_t s = 0; s < shots; ++s) r.signal[i] += sx[s][i];
    r.signal[i] /= static_cast<double>(shots);
  }
  // Unweighted exponential fit A exp(-G t) over the first 1/e of decay.
  std::size_t last = npts;
  for (std::size_t i = 1; i < npts; ++i) {
    if (r.signal[i] < std::exp(-1.0)) { last = i + 1; break; }
  }
  last = std::max<std::size_t>(last, 3);
  std::vector<double> t(r.times.begin(), r.times.begin() + static_cast<long>(last));
  std::vector<double> y(r.signal.begin(), r.signal.begin() + static_cast<long>(last));
  const double g0 = std::max(1e-3, -std::log(std::clamp(y.back(), 1e-3, 0.999999)) / t.back());
  auto fit = least_squares(
      [&](const std::vector<double>& x, std::vector<double>& res) {
        for (std::size_t i = 0; i < t.size(); ++i) res[i] = x[0] * std::exp(-x[1] * t[i]) - y[i];
      },
      {1.0, g0}, t.size(), true);
  r.rate = fit.x[1];
  r.rate_err = fit.stderr_[1];
  r.decaying = r.signal.back() < 1.0 - 1e-9 && r.rate > 0.0;
  if (!r.decaying) r.rate = std::max(0.0, r.rate);
  return r;
}

struct ThermalMotion {
  double nbar = 0.0;
  double eta = 0.0;
  void validate() const {
    require(nbar >= 0.0, "nbar must be >= 0");
    require(eta >= 0.0 && eta < 1.0, "eta must be in [0, 1)");
  }
};

// Per-shot effective Rabi frequency rabi*(1 - eta^2 (n + 1/2)) with n drawn
// from the thermal (geometric) distribution of mean nbar.
inline double sample_thermal_rabi(const ThermalMotion& m, double rabi, Rng& rng) {
  m.validate();
  std::size_t n = 0;
  if (m.nbar > 0.0) {
    // Inverse CDF of P(n) = nbar^n / (1+nbar)^(n+1).
    const double q = m.nbar / (1.0 + m.nbar);
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    n = static_cast<std::size_t>(std::floor(std::log(u) / std::log(q)));
  }
  return rabi * (1.0 - m.eta * m.eta * (static_cast<double>(n) + 0.5));
}

inline double sample_thermal_rabi(const ThermalMotion& m, double rabi, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x7e4a);
  return sample_thermal_rabi(m, rabi, rng);
}

inline void to_json(nlohmann::json& j, const ClockPsd& p) {
  j = {{"h0", p.h0}, {"h_alpha", p.h_alpha}, {"alpha", p.alpha}, {"H", p.H},
       {"f_min", p.f_min}, {"f_max", p.f_max}};
  if (!p.table.empty()) j["table"] = p.table;
}

inline void from_json(const nlohmann::json& j, ClockPsd& p) {
  p.h0 = j.value("h0", 0.0);
  p.h_alpha = j.value("h_alpha", 0.0);
  p.alpha = j.value("alpha", 1.0);
  p.H = j.value("H", 0.0);
  p.f_min = j.value("f_min", 1e-3);
  p.f_max = j.value("f_max", 1e7);
  if (j.contains("table")) p.table = j.at("table").get<std::vector<std::pair<double, double>>>();
  p.validate();
}

}  // namespace clockq
