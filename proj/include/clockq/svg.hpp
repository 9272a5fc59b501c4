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

// Minimal deterministic SVG line/scatter plots. Output depends only on the
// data (fixed number formatting, no timestamps).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clockq/core.hpp"

namespace clockq {

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> err;  // optional symmetric y errors
  bool markers = true;
  bool line = true;
};

struct SvgPlot {
  std::string title, x_label, y_label;
  std::vector<SvgSeries> series;
  std::vector<double> hlines;  // horizontal reference lines
  int width = 640, height = 420;
};

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}
inline std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}
}  // namespace detail

inline std::string render_svg(const SvgPlot& p) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.err.size() ? s.err[i] : 0.0;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i] - e);
      y1 = std::max(y1, s.y[i] + e);
    }
  }
  for (double h : p.hlines) {
    y0 = std::min(y0, h);
    y1 = std::max(y1, h);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = p.width - ml - mr, ph = p.height - mt - mb;
  auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << p.width << "\" height=\"" << p.height << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << p.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << detail::esc(p.title)
    << "</text>\n";
  o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    o << "<text x=\"" << detail::fmt(sx(xv)) << "\" y=\"" << detail::fmt(mt + ph + 16)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::fmt(xv) << "</text>\n";
    o << "<text x=\"" << detail::fmt(ml - 6) << "\" y=\"" << detail::fmt(sy(yv) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt(yv) << "</text>\n";
  }
  o << "<text x=\"" << detail::fmt(ml + pw / 2) << "\" y=\"" << p.height - 10
    << "\" text-anchor=\"middle\" font-size=\"13\">" << detail::esc(p.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << detail::fmt(mt + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
    << "transform=\"rotate(-90 16 " << detail::fmt(mt + ph / 2) << ")\">" << detail::esc(p.y_label) << "</text>\n";
  for (double h : p.hlines)
    o << "<line x1=\"" << ml << "\" x2=\"" << ml + pw << "\" y1=\"" << detail::fmt(sy(h)) << "\" y2=\""
      << detail::fmt(sy(h)) << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* c = colors[k % 6];
    if (s.line && s.x.size() > 1) {
      o << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) o << detail::fmt(sx(s.x[i])) << ',' << detail::fmt(sy(s.y[i])) << ' ';
      o << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i < s.err.size() && s.err[i] > 0.0)
        o << "<line x1=\"" << detail::fmt(sx(s.x[i])) << "\" x2=\"" << detail::fmt(sx(s.x[i])) << "\" y1=\""
          << detail::fmt(sy(s.y[i] - s.err[i])) << "\" y2=\"" << detail::fmt(sy(s.y[i] + s.err[i]))
          << "\" stroke=\"" << c << "\"/>\n";
      if (s.markers)
        o << "<circle cx=\"" << detail::fmt(sx(s.x[i])) << "\" cy=\"" << detail::fmt(sy(s.y[i]))
          << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    }
    o << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 + 15 * static_cast<int>(k) << "\" font-size=\"12\" fill=\""
      << c << "\">" << detail::esc(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_svg(const SvgPlot& p, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw RuntimeFailure("cannot write " + path);
  f << render_svg(p);
}

}  // namespace clockq
