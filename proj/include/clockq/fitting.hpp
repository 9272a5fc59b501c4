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

// Thin C++ wrappers around the GSL optimizers used across the library:
// Levenberg-Marquardt nonlinear least squares (gsl_multifit_nlinear) and
// derivative-free simplex minimization (gsl_multimin nmsimplex2).

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <vector>

#include "clockq/core.hpp"

namespace clockq {

namespace detail {
// GSL's default handler aborts the process; library code reports status
// codes instead, so the handler is disabled once per process.
inline void quiet_gsl() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}
}  // namespace detail

// Residual function: fills r (size m) for parameters x (size n).
using ResidualFn = std::function<void(const std::vector<double>& x, std::vector<double>& r)>;

struct LeastSquaresResult {
  std::vector<double> x;
  std::vector<double> stderr_;      // sqrt(diag(cov)) scaled as requested
  Eigen::MatrixXd covariance;       // (J^T J)^{-1}
  double chi2 = 0.0;
  int status = 0;
  bool converged = false;
};

// Minimizes sum r_i(x)^2 with Levenberg-Marquardt and a finite-difference
// Jacobian. When scale_by_chi2 is true the covariance is multiplied by
// chi2/(m-n), the usual choice for unweighted residuals.
inline LeastSquaresResult least_squares(const ResidualFn& fn, std::vector<double> x0,
                                        std::size_t m, bool scale_by_chi2,
                                        std::size_t max_iter = 500) {
  detail::quiet_gsl();
  const std::size_t n = x0.size();
  require(m >= n, "least squares needs at least as many residuals as parameters");
  struct Ctx {
    const ResidualFn* fn;
    std::size_t n;
    std::vector<double> xbuf, rbuf;
  } ctx{&fn, n, std::vector<double>(n), std::vector<double>(m)};

  gsl_multifit_nlinear_fdf fdf;
  fdf.f = [](const gsl_vector* x, void* p, gsl_vector* f) -> int {
    auto* c = static_cast<Ctx*>(p);
    for (std::size_t i = 0; i < c->n; ++i) c->xbuf[i] = gsl_vector_get(x, i);
    (*c->fn)(c->xbuf, c->rbuf);
    for (std::size_t i = 0; i < c->rbuf.size(); ++i) {
      if (!std::isfinite(c->rbuf[i])) return GSL_EDOM;
      gsl_vector_set(f, i, c->rbuf[i]);
    }
    return GSL_SUCCESS;
  };
  fdf.df = nullptr;
  fdf.fvv = nullptr;
  fdf.n = m;
  fdf.p = n;
  fdf.params = &ctx;

  gsl_multifit_nlinear_parameters params = gsl_multifit_nlinear_default_parameters();
  gsl_multifit_nlinear_workspace* w =
      gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &params, m, n);
  gsl_vector_view xv = gsl_vector_view_array(x0.data(), n);
  LeastSquaresResult res;
  res.status = gsl_multifit_nlinear_init(&xv.vector, &fdf, w);
  int info = 0;
  if (res.status == GSL_SUCCESS)
    res.status = gsl_multifit_nlinear_driver(max_iter, 1e-12, 1e-12, 1e-12, nullptr, nullptr, &info, w);
  res.converged = res.status == GSL_SUCCESS;

  gsl_vector* x = gsl_multifit_nlinear_position(w);
  res.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(x, i);
  gsl_vector* f = gsl_multifit_nlinear_residual(w);
  gsl_blas_ddot(f, f, &res.chi2);

  gsl_matrix* J = gsl_multifit_nlinear_jac(w);
  gsl_matrix* cov = gsl_matrix_alloc(n, n);
  gsl_multifit_nlinear_covar(J, 0.0, cov);
  res.covariance.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double scale = (scale_by_chi2 && m > n) ? res.chi2 / static_cast<double>(m - n) : 1.0;
  res.stderr_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      res.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gsl_matrix_get(cov, i, j) * scale;
    res.stderr_[i] = std::sqrt(std::max(0.0, gsl_matrix_get(cov, i, i) * scale));
  }
  gsl_matrix_free(cov);
  gsl_multifit_nlinear_free(w);
  return res;
}

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool converged = false;
};

// Nelder-Mead simplex minimization (gsl nmsimplex2). `step` sets the
// initial simplex size per coordinate.
inline SimplexResult simplex_minimize(const ObjectiveFn& fn, const std::vector<double>& x0,
                                      const std::vector<double>& step, std::size_t max_iter,
                                      double size_tol) {
  detail::quiet_gsl();
  const std::size_t n = x0.size();
  require(step.size() == n, "simplex step size must match parameter count");
  struct Ctx {
    const ObjectiveFn* fn;
    std::vector<double> buf;
  } ctx{&fn, std::vector<double>(n)};
  gsl_multimin_function f;
  f.n = n;
  f.params = &ctx;
  f.f = [](const gsl_vector* x, void* p) -> double {
    auto* c = static_cast<Ctx*>(p);
    for (std::size_t i = 0; i < c->buf.size(); ++i) c->buf[i] = gsl_vector_get(x, i);
    const double v = (*c->fn)(c->buf);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(ss, i, step[i]);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &f, x, ss);
  SimplexResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) {
      // No further progress possible: converged if the simplex has collapsed.
      res.converged = gsl_multimin_fminimizer_size(s) < 1e-6;
      break;
    }
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) {
      res.converged = true;
      break;
    }
  }
  res.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(s->x, i);
  res.value = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(ss);
  return res;
}

// Ordinary least-squares line y = a + b x with R^2.
struct LineFit {
  double intercept = 0.0, slope = 0.0, r2 = 0.0, slope_err = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "line fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  require(den != 0.0, "degenerate abscissa in line fit");
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ym = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
    ss_tot += (y[i] - ym) * (y[i] - ym);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (x.size() > 2) f.slope_err = std::sqrt(ss_res / (n - 2.0) * n / den);
  return f;
}

}  // namespace clockq
