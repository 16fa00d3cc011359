// Copyright 2026 The restack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RESTACK_REPORT_HPP_
#define RESTACK_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "restack/sim.hpp"

namespace restack {

// CSV and SVG emission.  All numbers go through one fixed format so that two
// identically seeded executions produce byte-identical artifacts.

namespace detail {

inline std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string FormatCoord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

inline std::string FormatTick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return std::string(buf);
}

inline std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  return out;
}

}  // namespace detail

// Batch aggregate: one row per round, columns t,mean_regret,std_regret,bound.
inline void write_batch_csv(const std::string& path, const BatchResult& batch) {
  std::ofstream out = detail::OpenForWrite(path);
  out << "t,mean_regret,std_regret,bound\n";
  for (std::size_t t = 0; t < batch.bound.size(); ++t) {
    out << (t + 1) << ',' << detail::FormatDouble(batch.mean_regret[t]) << ','
        << detail::FormatDouble(batch.std_regret[t]) << ','
        << detail::FormatDouble(batch.bound[t]) << '\n';
  }
}

// Single run: t, commitment entries, reputation entries, follower type
// (1-based, matching the config syntax), realized payoff.
inline void write_run_csv(const std::string& path, const RunLedger& run) {
  std::ofstream out = detail::OpenForWrite(path);
  const int n = run.rounds.empty() ? 0 : static_cast<int>(run.rounds[0].x.size());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= n; ++i) out << ",z" << i;
  out << ",g,payoff\n";
  for (const RoundRecord& round : run.rounds) {
    out << round.t;
    for (int i = 0; i < n; ++i) out << ',' << detail::FormatDouble(round.x[i]);
    for (int i = 0; i < n; ++i) out << ',' << detail::FormatDouble(round.z[i]);
    out << ',' << (round.g + 1) << ',' << detail::FormatDouble(round.payoff)
        << '\n';
  }
}

// Self-contained SVG: mean regret with a +/- one-std band, the theoretical
// bound, and a quarter-scale copy of the bound for visual comparison when the
// bound dwarfs the empirical curve.
inline void write_batch_svg(const std::string& path, const std::string& title,
                            const BatchResult& batch) {
  const int horizon = static_cast<int>(batch.bound.size());
  if (horizon == 0) throw std::runtime_error("svg: empty batch");
  const bool have_regret = !batch.mean_regret.empty();

  const double width = 860.0, height = 520.0;
  const double ml = 86.0, mr = 24.0, mt = 48.0, mb = 58.0;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  double y_min = 0.0, y_max = batch.bound.back();
  if (have_regret) {
    for (int t = 0; t < horizon; ++t) {
      y_min = std::min(y_min, batch.mean_regret[t] - batch.std_regret[t]);
      y_max = std::max(y_max, batch.mean_regret[t] + batch.std_regret[t]);
    }
  }
  const double pad = 0.05 * (y_max - y_min == 0.0 ? 1.0 : y_max - y_min);
  y_max += pad;
  y_min -= pad;

  const auto sx = [&](double t) { return ml + plot_w * (t - 1.0) / std::max(1.0, horizon - 1.0); };
  const auto sy = [&](double v) { return mt + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };
  const auto polyline = [&](const std::vector<double>& ys, double scale) {
    std::string pts;
    for (int t = 0; t < horizon; ++t) {
      pts += detail::FormatCoord(sx(t + 1.0)) + "," +
             detail::FormatCoord(sy(scale * ys[t])) + " ";
    }
    return pts;
  };

  std::ofstream out = detail::OpenForWrite(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"17\">" << title << "</text>\n";

  // Axes, gridlines, ticks.
  for (int i = 0; i <= 5; ++i) {
    const double v = y_min + (y_max - y_min) * i / 5.0;
    const double y = sy(v);
    out << "<line x1=\"" << ml << "\" y1=\"" << detail::FormatCoord(y)
        << "\" x2=\"" << ml + plot_w << "\" y2=\"" << detail::FormatCoord(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << detail::FormatCoord(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << detail::FormatTick(v) << "</text>\n";
    const double t = 1.0 + (horizon - 1.0) * i / 5.0;
    const double x = sx(t);
    out << "<text x=\"" << detail::FormatCoord(x) << "\" y=\""
        << mt + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" << detail::FormatTick(t) << "</text>\n";
  }
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">round t</text>\n";
  out << "<text x=\"20\" y=\"" << mt + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 " << mt + plot_h / 2
      << ")\">prefix-benchmark regret</text>\n";

  // One-sigma band (mean + std forward, mean - std backward).
  if (have_regret) {
    std::string band;
    for (int t = 0; t < horizon; ++t) {
      band += detail::FormatCoord(sx(t + 1.0)) + "," +
              detail::FormatCoord(sy(batch.mean_regret[t] + batch.std_regret[t])) + " ";
    }
    for (int t = horizon - 1; t >= 0; --t) {
      band += detail::FormatCoord(sx(t + 1.0)) + "," +
              detail::FormatCoord(sy(batch.mean_regret[t] - batch.std_regret[t])) + " ";
    }
    out << "<polygon points=\"" << band
        << "\" fill=\"#4477aa\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
    out << "<polyline points=\"" << polyline(batch.mean_regret, 1.0)
        << "\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"2\"/>\n";
  }
  out << "<polyline points=\"" << polyline(batch.bound, 1.0)
      << "\" fill=\"none\" stroke=\"#cc3311\" stroke-width=\"2\"/>\n";
  out << "<polyline points=\"" << polyline(batch.bound, 0.25)
      << "\" fill=\"none\" stroke=\"#cc3311\" stroke-width=\"2\" "
         "stroke-dasharray=\"6 4\"/>\n";

  // Legend.
  const double lx = ml + 16, ly = mt + 12;
  out << "<rect x=\"" << lx - 8 << "\" y=\"" << ly - 14 << "\" width=\"250\" "
         "height=\"74\" fill=\"white\" fill-opacity=\"0.85\" "
         "stroke=\"#999999\"/>\n";
  const auto legend_row = [&](int i, const std::string& color,
                              const std::string& dash, const std::string& label) {
    const double y = ly + 18.0 * i;
    out << "<line x1=\"" << lx << "\" y1=\"" << y << "\" x2=\"" << lx + 30
        << "\" y2=\"" << y << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") << "/>\n";
    out << "<text x=\"" << lx + 38 << "\" y=\"" << y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << label
        << "</text>\n";
  };
  legend_row(0, "#4477aa", "", "mean regret (1-sigma band)");
  legend_row(1, "#cc3311", "", "theoretical bound");
  legend_row(2, "#cc3311", "6 4", "theoretical bound x 0.25");
  out << "</svg>\n";
}

}  // namespace restack

#endif  // RESTACK_REPORT_HPP_
