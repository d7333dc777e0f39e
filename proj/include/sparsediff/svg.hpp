#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "sparsediff/common.hpp"
#include "sparsediff/experiment.hpp"

namespace sparsediff {

// Minimal static SVG line chart on log-log axes.
inline void write_loglog_svg(const std::string& dest, const std::string& title,
                             const std::string& ylabel, const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  require(xs.size() == ys.size() && !xs.empty(), "write_loglog_svg: bad series");
  for (std::size_t i = 0; i < xs.size(); ++i)
    require(xs[i] > 0.0 && ys[i] > 0.0, "write_loglog_svg: log axes need positive data");

  const int w = 560, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = std::log10(xs.front()), x1 = std::log10(xs.back());
  double y0 = kInf, y1 = -kInf;
  for (double y : ys) {
    y0 = std::min(y0, std::log10(y));
    y1 = std::max(y1, std::log10(y));
  }
  if (x1 - x0 < 1e-12) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
  const double ypad = 0.08 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;

  auto px = [&](double x) { return ml + (std::log10(x) - x0) / (x1 - x0) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (std::log10(y) - y0) / (y1 - y0) * (h - mt - mb); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };

  std::ofstream out(dest, std::ios::trunc);
  if (!out) throw io_error("write_loglog_svg: cannot open " + dest);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">" << title << "</text>\n";

  // Axes.
  out << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";

  // X ticks at the data points, y ticks at decades plus endpoints.
  for (double x : xs) {
    out << "<line x1=\"" << px(x) << "\" y1=\"" << h - mb << "\" x2=\"" << px(x) << "\" y2=\""
        << h - mb + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(x) << "\" y=\"" << h - mb + 20
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << num(x)
        << "</text>\n";
  }
  for (double e = std::ceil(y0); e <= std::floor(y1) + 1e-9; e += 1.0) {
    const double y = std::pow(10.0, e);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
        << py(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << num(y)
        << "</text>\n";
  }
  for (double y : {std::pow(10.0, y0 + ypad), std::pow(10.0, y1 - ypad)}) {
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
        << py(y) << "\" stroke=\"gray\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"10\" fill=\"gray\" "
           "font-family=\"sans-serif\">" << num(y) << "</text>\n";
  }

  out << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 10
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">n</text>\n"
      << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 " << (mt + h - mb) / 2 << ")\">" << ylabel
      << "</text>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) out << px(xs[i]) << "," << py(ys[i]) << " ";
  out << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx=\"" << px(xs[i]) << "\" cy=\"" << py(ys[i])
        << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  out << "</svg>\n";
  if (!out) throw io_error("write_loglog_svg: write failed for " + dest);
}

/// One SVG per error norm: median ||theta_hat - theta0||_q against n.
inline void write_error_plots(const std::string& dir, const std::vector<SummaryRow>& rows) {
  std::vector<double> ns;
  for (const auto& r : rows) ns.push_back(r.n);
  const struct {
    const char* file;
    const char* label;
    double SummaryRow::* field;
  } plots[] = {
      {"err_l1_vs_n.svg", "median error (l1)", &SummaryRow::err_l1_med},
      {"err_l2_vs_n.svg", "median error (l2)", &SummaryRow::err_l2_med},
      {"err_linf_vs_n.svg", "median error (linf)", &SummaryRow::err_linf_med},
  };
  for (const auto& pl : plots) {
    std::vector<double> ys;
    bool ok = true;
    for (const auto& r : rows) {
      const double v = r.*pl.field;
      if (!(v > 0.0) || !std::isfinite(v)) ok = false;
      ys.push_back(v);
    }
    if (ok) write_loglog_svg(dir + "/" + pl.file, "estimation error vs n", pl.label, ns, ys);
  }
}

}  // namespace sparsediff
