// Copyright 2026 The bballoc Authors
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

#include "bballoc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace bballoc {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 30;
constexpr double kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fixed(double v, int digits = 1) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

void write_svg(std::ostream& out, const PlotTable& table) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = 0.0;
  double y_hi = -std::numeric_limits<double>::infinity();
  for (double x : table.x) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
  }
  for (const PlotSeries& s : table.series) {
    for (std::size_t k = 0; k < s.mean.size(); ++k) {
      if (!std::isfinite(s.mean[k])) continue;
      const double sd = std::isfinite(s.sd[k]) ? s.sd[k] : 0.0;
      y_lo = std::min(y_lo, s.mean[k] - sd);
      y_hi = std::max(y_hi, s.mean[k] + sd);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = x_hi = 0.0;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (!std::isfinite(y_hi) || y_hi <= y_lo) y_hi = y_lo + 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"18\" font-size=\"13\">" << escape(table.metric) << " vs "
      << escape(table.axis) << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y_lo + (y_hi - y_lo) * t / 4.0;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(py(yv) + 4) << "\" text-anchor=\"end\">"
        << tick_label(yv) << "</text>\n";
  }
  for (double x : table.x) {
    out << "<text x=\"" << fixed(px(x)) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
      << escape(table.axis) << "</text>\n";

  for (std::size_t s = 0; s < table.series.size(); ++s) {
    const PlotSeries& series = table.series[s];
    const char* color = kColors[s % std::size(kColors)];
    std::string points;
    for (std::size_t k = 0; k < table.x.size() && k < series.mean.size(); ++k) {
      if (!std::isfinite(series.mean[k])) continue;
      const double x = px(table.x[k]);
      const double sd = std::isfinite(series.sd[k]) ? series.sd[k] : 0.0;
      points += fixed(x) + "," + fixed(py(series.mean[k])) + " ";
      out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(py(series.mean[k] - sd)) << "\" x2=\""
          << fixed(x) << "\" y2=\"" << fixed(py(series.mean[k] + sd)) << "\" stroke=\"" << color
          << "\"/>\n";
      out << "<circle cx=\"" << fixed(x) << "\" cy=\"" << fixed(py(series.mean[k]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(s + 1);
    out << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kWidth - kRight + 35 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly << "\">" << escape(series.name)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace bballoc
