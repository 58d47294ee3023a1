#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "qbm/csv.hpp"
#include "qbm/errors.hpp"

namespace qbm {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 720;
  int height = 480;
  std::vector<SvgSeries> series;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct AxisRange {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double map(double v, double pix_lo, double pix_hi) const {
    double a = log ? std::log10(v) : v;
    double l = log ? std::log10(lo) : lo;
    double h = log ? std::log10(hi) : hi;
    if (h == l) h = l + 1.0;
    return pix_lo + (a - l) / (h - l) * (pix_hi - pix_lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int e0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
      const int e1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
      for (int e = e0; e <= e1; ++e) out.push_back(std::pow(10.0, e));
      if (out.size() < 2) {
        out = {lo, hi};
      }
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 0.5 * step; v += step) {
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
  }
};

}  // namespace detail

inline std::string render_svg(const SvgChart& chart) {
  using detail::svg_num;
  const double ml = 72, mr = 18, mt = chart.title.empty() ? 18 : 40, mb = 52;
  const double x0 = ml, x1 = chart.width - mr;
  const double y0 = chart.height - mb, y1 = mt;  // y pixels grow downward

  detail::AxisRange xr, yr;
  xr.log = chart.log_x;
  yr.log = chart.log_y;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = s.x[i], py = s.y[i];
      if (!std::isfinite(px) || !std::isfinite(py)) continue;
      if (chart.log_x && px <= 0) continue;
      if (chart.log_y && py <= 0) continue;
      xlo = std::min(xlo, px);
      xhi = std::max(xhi, px);
      ylo = std::min(ylo, py);
      yhi = std::max(yhi, py);
    }
  }
  if (!std::isfinite(xlo) || !std::isfinite(ylo)) {
    throw validation_error("svg chart has no plottable points");
  }
  if (!chart.log_y) {
    const double pad = 0.05 * (yhi - ylo + (yhi == ylo ? 1.0 : 0.0));
    ylo -= pad;
    yhi += pad;
  }
  xr.lo = xlo;
  xr.hi = xhi;
  yr.lo = ylo;
  yr.hi = yhi;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(chart.width) + "\" height=\"" +
       std::to_string(chart.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!chart.title.empty()) {
    s += "<text x=\"" + svg_num(0.5 * chart.width) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" +
         detail::xml_escape(chart.title) + "</text>\n";
  }

  for (double tv : xr.ticks()) {
    const double px = xr.map(tv, x0, x1);
    s += "<line x1=\"" + svg_num(px) + "\" y1=\"" + svg_num(y0) + "\" x2=\"" +
         svg_num(px) + "\" y2=\"" + svg_num(y1) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + svg_num(px) + "\" y=\"" + svg_num(y0 + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">" +
         svg_num(tv) + "</text>\n";
  }
  for (double tv : yr.ticks()) {
    const double py = yr.map(tv, y0, y1);
    s += "<line x1=\"" + svg_num(x0) + "\" y1=\"" + svg_num(py) + "\" x2=\"" +
         svg_num(x1) + "\" y2=\"" + svg_num(py) +
         "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + svg_num(x0 - 6) + "\" y=\"" + svg_num(py + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
         svg_num(tv) + "</text>\n";
  }
  s += "<rect x=\"" + svg_num(x0) + "\" y=\"" + svg_num(y1) + "\" width=\"" +
       svg_num(x1 - x0) + "\" height=\"" + svg_num(y0 - y1) +
       "\" fill=\"none\" stroke=\"#333333\"/>\n";

  for (const auto& ser : chart.series) {
    std::string pts;
    bool open = false;
    auto flush = [&]() {
      if (open && !pts.empty()) {
        s += "<polyline fill=\"none\" stroke=\"" + ser.color +
             "\" stroke-width=\"1.6\"" +
             (ser.dashed ? std::string(" stroke-dasharray=\"6 4\"") : "") +
             " points=\"" + pts + "\"/>\n";
      }
      pts.clear();
      open = false;
    };
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      const double vx = ser.x[i], vy = ser.y[i];
      const bool ok = std::isfinite(vx) && std::isfinite(vy) &&
                      (!chart.log_x || vx > 0) && (!chart.log_y || vy > 0);
      if (!ok) {
        flush();
        continue;
      }
      pts += svg_num(xr.map(vx, x0, x1)) + "," + svg_num(yr.map(vy, y0, y1)) + " ";
      open = true;
    }
    flush();
  }

  double ly = y1 + 16;
  for (const auto& ser : chart.series) {
    if (ser.label.empty()) continue;
    s += "<line x1=\"" + svg_num(x1 - 150) + "\" y1=\"" + svg_num(ly - 4) +
         "\" x2=\"" + svg_num(x1 - 122) + "\" y2=\"" + svg_num(ly - 4) +
         "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"" +
         (ser.dashed ? std::string(" stroke-dasharray=\"6 4\"") : "") + "/>\n";
    s += "<text x=\"" + svg_num(x1 - 116) + "\" y=\"" + svg_num(ly) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::xml_escape(ser.label) + "</text>\n";
    ly += 16;
  }

  if (!chart.x_label.empty()) {
    s += "<text x=\"" + svg_num(0.5 * (x0 + x1)) + "\" y=\"" +
         svg_num(chart.height - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">" +
         detail::xml_escape(chart.x_label) + "</text>\n";
  }
  if (!chart.y_label.empty()) {
    s += "<text x=\"16\" y=\"" + svg_num(0.5 * (y0 + y1)) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
         " transform=\"rotate(-90 16 " +
         svg_num(0.5 * (y0 + y1)) + ")\">" +
         detail::xml_escape(chart.y_label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void write_svg(const std::filesystem::path& path, const SvgChart& chart) {
  detail::atomic_write_text(path, render_svg(chart));
}

/// Square heatmap of |values| on a symmetric axis, for density-matrix
/// visualisation. Values are row-major with the row index increasing along
/// the vertical axis.
struct SvgHeatmap {
  std::string title;
  double half_span = 1.0;
  std::size_t n = 0;
  std::vector<double> values;
  int size = 640;
};

inline std::string render_svg(const SvgHeatmap& map) {
  using detail::svg_num;
  if (map.n == 0 || map.values.size() != map.n * map.n) {
    throw validation_error("heatmap value count must equal n*n");
  }
  double vmax = 0.0;
  for (double v : map.values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;

  const double m = 46;
  const double cell = (map.size - 2 * m) / static_cast<double>(map.n);
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(map.size) + "\" height=\"" + std::to_string(map.size) +
       "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!map.title.empty()) {
    s += "<text x=\"" + svg_num(0.5 * map.size) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" +
         detail::xml_escape(map.title) + "</text>\n";
  }
  for (std::size_t i = 0; i < map.n; ++i) {
    for (std::size_t j = 0; j < map.n; ++j) {
      const double u = std::abs(map.values[i * map.n + j]) / vmax;
      if (u < 1.0 / 512.0) continue;  // leave background white
      const int level = static_cast<int>(255.0 * (1.0 - u) + 0.5);
      s += std::string("<rect x=\"") +
           svg_num(m + static_cast<double>(j) * cell) + "\" y=\"" +
           svg_num(map.size - m - static_cast<double>(i + 1) * cell) +
           "\" width=\"" + svg_num(cell + 0.5) + "\" height=\"" +
           svg_num(cell + 0.5) + "\" fill=\"rgb(" + std::to_string(level) +
           "," + std::to_string(level) + ",255)\"/>\n";
    }
  }
  s += "<rect x=\"" + svg_num(m) + "\" y=\"" + svg_num(m) + "\" width=\"" +
       svg_num(map.size - 2 * m) + "\" height=\"" + svg_num(map.size - 2 * m) +
       "\" fill=\"none\" stroke=\"#333333\"/>\n";
  s += "<text x=\"" + svg_num(0.5 * map.size) + "\" y=\"" +
       svg_num(map.size - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
       "[-" +
       svg_num(map.half_span) + ", " + svg_num(map.half_span) + "]</text>\n";
  s += "</svg>\n";
  return s;
}

inline void write_svg(const std::filesystem::path& path, const SvgHeatmap& map) {
  detail::atomic_write_text(path, render_svg(map));
}

}  // namespace qbm
