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

// Parity-fringe fitting (binomial maximum likelihood and Gaussian weighted
// least squares), SPAM correction and Bell/GHZ fidelity assembly.
//
// Fringe model: parity P(phi) = offset + contrast * sin(frequency * phi + phase),
// and the even-parity probability of a shot is (1 + P)/2.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clockq/core.hpp"
#include "clockq/fitting.hpp"
#include "clockq/shots.hpp"

namespace clockq {

struct ParityPoint {
  double phase = 0.0;   // scan variable, rad
  std::size_t k = 0;    // even-parity shots
  std::size_t n = 0;    // total shots
  double parity() const { return 2.0 * static_cast<double>(k) / static_cast<double>(n) - 1.0; }
};

enum class FitMethod { kMleBinomial, kWlsGaussian };

inline const char* fit_method_name(FitMethod m) {
  return m == FitMethod::kMleBinomial ? "mle_beta" : "wls_gaussian";
}

struct ParityFit {
  double offset = 0.0, contrast = 0.0, phase = 0.0, frequency = 1.0;
  double offset_err = 0.0, contrast_err = 0.0, phase_err = 0.0, frequency_err = 0.0;
  FitMethod method = FitMethod::kMleBinomial;
  double objective = 0.0;  // -log L (MLE) or chi^2 (WLS)
  bool converged = false;

  double parity(double phi) const { return offset + contrast * std::sin(frequency * phi + phase); }
};

inline nlohmann::json to_json(const ParityFit& f) {
  return {{"method", fit_method_name(f.method)},
          {"offset", f.offset},
          {"offset_err", f.offset_err},
          {"contrast", f.contrast},
          {"contrast_err", f.contrast_err},
          {"phase_rad", f.phase},
          {"phase_err_rad", f.phase_err},
          {"frequency", f.frequency},
          {"frequency_err", f.frequency_err},
          {"objective", f.objective},
          {"converged", f.converged}};
}

struct FitOptions {
  double frequency_guess = 1.0;  // scan design value; also resolves aliasing
  bool fix_frequency = false;
};

namespace detail {

inline void check_parity_data(const std::vector<ParityPoint>& data, std::size_t min_points, std::size_t min_shots) {
  require(data.size() >= min_points, "parity fit needs at least " + std::to_string(min_points) + " phase points");
  for (const auto& p : data) {
    require(p.n >= min_shots, "parity fit needs at least " + std::to_string(min_shots) + " shots per point");
    require(p.k <= p.n, "even-parity count exceeds shot count");
    require(std::isfinite(p.phase), "phase must be finite");
  }
}

// Linear least squares for offset and the sine/cosine amplitudes at a fixed
// frequency: the starting point of both fits.
inline ParityFit linear_start(const std::vector<double>& phases, const std::vector<double>& parity, double freq) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(phases.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(phases.size()));
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    a(r, 1) = std::sin(freq * phases[i]);
    a(r, 2) = std::cos(freq * phases[i]);
    y(r) = parity[i];
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
  ParityFit f;
  f.offset = c(0);
  f.contrast = std::hypot(c(1), c(2));
  f.phase = std::atan2(c(2), c(1));
  f.frequency = freq;
  return f;
}

inline void normalize_sign(ParityFit& f) {
  if (f.contrast < 0.0) {
    f.contrast = -f.contrast;
    f.phase += kPi;
  }
  f.phase = wrap_phase(f.phase);
}

inline double clip_probability(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

// Observed-information errors: inverse of the numerical Hessian of fn.
inline std::vector<double> hessian_errors(const ObjectiveFn& fn, const std::vector<double>& x,
                                          const std::vector<double>& step) {
  const std::size_t n = x.size();
  Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double f0 = fn(x);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (i == j) {
        auto xp = x, xm = x;
        xp[i] += step[i];
        xm[i] -= step[i];
        v = (fn(xp) - 2.0 * f0 + fn(xm)) / (step[i] * step[i]);
      } else {
        auto pp = x, pm = x, mp = x, mm = x;
        pp[i] += step[i]; pp[j] += step[j];
        pm[i] += step[i]; pm[j] -= step[j];
        mp[i] -= step[i]; mp[j] += step[j];
        mm[i] -= step[i]; mm[j] -= step[j];
        v = (fn(pp) - fn(pm) - fn(mp) + fn(mm)) / (4.0 * step[i] * step[j]);
      }
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  std::vector<double> err(n, std::numeric_limits<double>::quiet_NaN());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
  if (!lu.isInvertible()) return err;
  const Eigen::MatrixXd cov = lu.inverse();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (d >= 0.0) err[i] = std::sqrt(d);
  }
  return err;
}

}  // namespace detail

// Negative binomial log-likelihood of the fringe parameters
// (offset, contrast, phase, frequency).
inline double parity_neg_log_likelihood(const std::vector<ParityPoint>& data, const std::vector<double>& x) {
  double nll = 0.0;
  for (const auto& d : data) {
    const double par = x[0] + x[1] * std::sin(x[3] * d.phase + x[2]);
    const double p = detail::clip_probability(0.5 * (1.0 + par));
    nll -= static_cast<double>(d.k) * std::log(p) + static_cast<double>(d.n - d.k) * std::log1p(-p);
  }
  return nll;
}

// Binomial maximum-likelihood fringe fit with observed-information errors.
inline ParityFit mle_parity_fit(const std::vector<ParityPoint>& data, const FitOptions& opt = {}) {
  detail::check_parity_data(data, 8, 10);
  std::vector<double> ph, par;
  for (const auto& d : data) {
    ph.push_back(d.phase);
    par.push_back(d.parity());
  }
  ParityFit start = detail::linear_start(ph, par, opt.frequency_guess);
  start.contrast = std::min(start.contrast, 0.999 - std::abs(start.offset));
  auto full = [&](const std::vector<double>& v) {
    std::vector<double> x = v;
    if (opt.fix_frequency) x.push_back(opt.frequency_guess);
    return x;
  };
  ObjectiveFn nll = [&](const std::vector<double>& v) { return parity_neg_log_likelihood(data, full(v)); };
  std::vector<double> x0{start.offset, start.contrast, start.phase};
  std::vector<double> step{0.02, 0.02, 0.05};
  if (!opt.fix_frequency) {
    x0.push_back(opt.frequency_guess);
    step.push_back(0.01 * std::max(1.0, std::abs(opt.frequency_guess)));
  }
  // Two simplex passes: the restart removes premature collapse.
  auto r = simplex_minimize(nll, x0, step, 20000, 1e-7);
  r = simplex_minimize(nll, r.x, step, 20000, 1e-7);
  const std::vector<double> x = full(r.x);
  std::vector<double> h(r.x.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1e-4 * std::max(1.0, std::abs(r.x[i]));
  const auto err = detail::hessian_errors(nll, r.x, h);
  ParityFit f;
  f.method = FitMethod::kMleBinomial;
  f.offset = x[0];
  f.contrast = x[1];
  f.phase = x[2];
  f.frequency = x[3];
  f.offset_err = err[0];
  f.contrast_err = err[1];
  f.phase_err = err[2];
  f.frequency_err = opt.fix_frequency ? 0.0 : err[3];
  f.objective = r.value;
  f.converged = r.converged;
  detail::normalize_sign(f);
  return f;
}

// Gaussian weighted least squares on (phase, parity, sigma) samples.
inline ParityFit wls_fit(const std::vector<double>& phases, const std::vector<double>& y,
                         const std::vector<double>& s, const FitOptions& opt = {}) {
  const std::size_t m = phases.size();
  require(m >= 4 && y.size() == m && s.size() == m, "WLS fit needs >= 4 matching samples");
  for (double v : s) require(v > 0.0, "WLS sigmas must be positive");
  const ParityFit start = detail::linear_start(phases, y, opt.frequency_guess);
  auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
    const double freq = opt.fix_frequency ? opt.frequency_guess : x[3];
    for (std::size_t i = 0; i < m; ++i) r[i] = (y[i] - (x[0] + x[1] * std::sin(freq * phases[i] + x[2]))) / s[i];
  };
  std::vector<double> x0{start.offset, start.contrast, start.phase};
  if (!opt.fix_frequency) x0.push_back(opt.frequency_guess);
  const auto ls = least_squares(residual, x0, m, false);
  ParityFit f;
  f.method = FitMethod::kWlsGaussian;
  f.offset = ls.x[0];
  f.contrast = ls.x[1];
  f.phase = ls.x[2];
  f.frequency = opt.fix_frequency ? opt.frequency_guess : ls.x[3];
  f.offset_err = ls.stderr_[0];
  f.contrast_err = ls.stderr_[1];
  f.phase_err = ls.stderr_[2];
  f.frequency_err = opt.fix_frequency ? 0.0 : ls.stderr_[3];
  f.objective = ls.chi2;
  f.converged = ls.converged;
  detail::normalize_sign(f);
  return f;
}

// WLS on shot counts with binomial errors 2 sqrt(p(1-p)/n) from the observed
// p, floored at p = 1/(2n) so saturated points keep a finite weight.
inline ParityFit wls_fit(const std::vector<ParityPoint>& data, const FitOptions& opt = {}) {
  detail::check_parity_data(data, 4, 1);
  std::vector<double> ph(data.size()), y(data.size()), s(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double n = static_cast<double>(data[i].n);
    const double p = std::clamp(static_cast<double>(data[i].k) / n, 0.5 / n, 1.0 - 0.5 / n);
    ph[i] = data[i].phase;
    y[i] = data[i].parity();
    s[i] = 2.0 * std::sqrt(p * (1.0 - p) / n);
  }
  return wls_fit(ph, y, s, opt);
}

// Even-parity statistics of a (filtered) ShotTable over atoms `sub`.
inline ParityPoint parity_point(const ShotTable& t, double phase, const std::vector<std::size_t>& sub = {}) {
  return {phase, t.even_parity_count(sub), t.size()};
}

inline void write_parity_csv(const std::vector<ParityPoint>& data, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << "phase,parity,err\n";
  f.precision(12);
  for (const auto& d : data) {
    const double n = static_cast<double>(d.n);
    const double p = static_cast<double>(d.k) / n;
    f << d.phase << ',' << d.parity() << ',' << 2.0 * std::sqrt(p * (1.0 - p) / n) << '\n';
  }
}

// ---------------------------------------------------------------------------
// SPAM correction

struct SpamModel {
  double f0 = 1.0;     // true-negative imaging fidelity
  double f1 = 1.0;     // true-positive imaging fidelity
  double b = 1.0;      // push-out success probability
  double eps_l = 0.0;  // atom loss probability during preparation
  double eps_d = 0.0;  // |1> -> |0> decay probability during preparation

  double a() const {
    require(f0 + f1 > 1.0 && b > 0.0, "SPAM matrix is singular (needs F0 + F1 > 1 and B > 0)");
    return 1.0 / (b * (f0 + f1 - 1.0));
  }
  double c() const { return 1.0 - f1 * a(); }

  void validate() const {
    for (double v : {f0, f1, b}) require(v > 0.0 && v <= 1.0, "SPAM fidelities must be in (0, 1]");
    require(eps_l >= 0.0 && eps_d >= 0.0, "SPAM error probabilities must be >= 0");
    (void)a();
  }

  // Per-atom correction matrix acting on (P0, P1) raw -> corrected.
  Eigen::Matrix2d correction_matrix() const {
    const double av = a(), cv = c();
    Eigen::Matrix2d m;
    m << 1.0 - cv, 1.0 - av - cv, cv, av + cv;
    return m;
  }
  // Per-atom confusion matrix (true -> raw): the inverse of the correction.
  Eigen::Matrix2d confusion_matrix() const { return correction_matrix().inverse(); }
};

inline nlohmann::json to_json(const SpamModel& s) {
  return {{"F0", s.f0}, {"F1", s.f1}, {"B", s.b}, {"eps_l", s.eps_l}, {"eps_d", s.eps_d}};
}

inline SpamModel spam_from_json(const nlohmann::json& j) {
  SpamModel s;
  s.f0 = j.value("F0", 1.0);
  s.f1 = j.value("F1", 1.0);
  s.b = j.value("B", 1.0);
  s.eps_l = j.value("eps_l", 0.0);
  s.eps_d = j.value("eps_d", 0.0);
  s.validate();
  return s;
}

// Applies m to every atom of a probability vector over n atoms (atom 0 most
// significant): the action of the Kronecker power without forming it.
inline std::vector<double> apply_per_atom(const std::vector<double>& p, const Eigen::Matrix2d& m) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < p.size()) ++n;
  require((std::size_t{1} << n) == p.size(), "probability vector length must be a power of two");
  std::vector<double> v = p;
  for (std::size_t atom = 0; atom < n; ++atom) {
    const std::size_t stride = std::size_t{1} << (n - 1 - atom);
    for (std::size_t base = 0; base < v.size(); ++base) {
      if (base & stride) continue;
      const double x0 = v[base], x1 = v[base | stride];
      v[base] = m(0, 0) * x0 + m(0, 1) * x1;
      v[base | stride] = m(1, 0) * x0 + m(1, 1) * x1;
    }
  }
  return v;
}

struct MeasurementCorrection {
  std::vector<double> probabilities;  // clipped and renormalized
  std::vector<double> pre_clip;       // raw corrected values
  bool clipped = false;
};

inline MeasurementCorrection measurement_correct(const std::vector<double>& raw, const SpamModel& spam) {
  spam.validate();
  double total = 0.0;
  for (double p : raw) {
    require(p >= 0.0, "probabilities must be non-negative");
    total += p;
  }
  require(std::abs(total - 1.0) < 1e-9, "probabilities must sum to 1");
  MeasurementCorrection out;
  out.pre_clip = apply_per_atom(raw, spam.correction_matrix());
  out.probabilities = out.pre_clip;
  double s = 0.0;
  for (auto& p : out.probabilities) {
    if (p < 0.0) {
      p = 0.0;
      out.clipped = true;
    }
    s += p;
  }
  for (auto& p : out.probabilities) p /= s;
  return out;
}

// True -> raw readout map (the forward model of measurement_correct).
inline std::vector<double> measurement_forward(const std::vector<double>& truth, const SpamModel& spam) {
  return apply_per_atom(truth, spam.confusion_matrix());
}

struct PrepCorrection {
  double p00 = 0.0, p11 = 0.0, contrast = 0.0;
  bool out_of_range = false;
};

// First-order state-preparation correction of two-atom Bell statistics:
//   P00m = f P00c + 2 eps_d / 4 + cos^2(pi/8) 2 eps_l
//   P11m = f P11c + 2 eps_d / 4
//   Cm   = f Cc - eps_d,          f = 1 - 2 eps_l - 2 eps_d.
// Inputs are measurement-corrected values.
inline PrepCorrection state_prep_correct(double p00m, double p11m, double cm, const SpamModel& spam) {
  require(spam.eps_l < 0.05 && spam.eps_d < 0.05, "first-order correction needs eps_l, eps_d < 0.05");
  require(spam.eps_l >= 0.0 && spam.eps_d >= 0.0, "SPAM error probabilities must be >= 0");
  const double f = 1.0 - 2.0 * spam.eps_l - 2.0 * spam.eps_d;
  const double c8 = std::cos(kPi / 8.0);
  PrepCorrection out;
  out.p00 = (p00m - 0.5 * spam.eps_d - c8 * c8 * 2.0 * spam.eps_l) / f;
  out.p11 = (p11m - 0.5 * spam.eps_d) / f;
  out.contrast = (cm + spam.eps_d) / f;
  for (double v : {out.p00, out.p11, out.contrast})
    if (v < 0.0 || v > 1.0) out.out_of_range = true;
  return out;
}

// Bell fidelity F = (P00 + P11 + C) / 2.
inline double bell_fidelity(double p00, double p11, double contrast) {
  for (double v : {p00, p11, contrast}) require(v >= 0.0 && v <= 1.0 + 1e-12, "fidelity inputs must be in [0, 1]");
  return 0.5 * (p00 + p11 + contrast);
}

// GHZ fidelity F = (P_0...0 + P_1...1 + C) / 2 from the population overlap.
inline double ghz_fidelity(double overlap_population, double contrast) {
  for (double v : {overlap_population, contrast})
    require(v >= 0.0 && v <= 1.0 + 1e-12, "fidelity inputs must be in [0, 1]");
  return 0.5 * (overlap_population + contrast);
}

// Population overlap implied by a fidelity and contrast.
inline double ghz_overlap_from(double fidelity, double contrast) { return 2.0 * fidelity - contrast; }

}  // namespace clockq
