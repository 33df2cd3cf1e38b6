// Self-contained SVG renderings: survival curves, weighted trajectory
// curves (both with censor glyphs and an at-risk table), and power curves.
// No external fonts, scripts, or stylesheets; byte-identical output for
// identical input.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wta/km.hpp"
#include "wta/power.hpp"
#include "wta/wta_curve.hpp"

namespace wta {

enum class CensorGlyph { kWye, kTick };

struct PlotOptions {
  int width = 840;
  int height = 500;
  std::string title;
  std::string x_label = "Time";
  CensorGlyph glyph = CensorGlyph::kWye;
  int at_risk_columns = 7;
};

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const std::vector<std::string>& arm_palette() {
  static const std::vector<std::string> p = {"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#8c564b"};
  return p;
}

inline std::string method_color(Method m) {
  switch (m) {
    case Method::kKm: return "#7f7f7f";
    case Method::kWtaAnalytic: return "#1f77b4";
    case Method::kWtaComputational: return "#2ca02c";
    case Method::kGee: return "#ff7f0e";
  }
  return "#000000";
}

// Round tick spacing to 1/2/5 times a power of ten.
inline double nice_step(double span, int target) {
  if (span <= 0.0 || target <= 0) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0})
    if (raw <= mult * mag + 1e-12) return mult * mag;
  return 10.0 * mag;
}

inline std::vector<double> ticks(double lo, double hi, int target) {
  const double step = nice_step(hi - lo, target);
  std::vector<double> out;
  double t = std::ceil(lo / step - 1e-9) * step;
  for (; t <= hi + 1e-9; t += step) out.push_back(std::abs(t) < 1e-12 ? 0.0 : t);
  return out;
}

struct Frame {
  double x0, y0, x1, y1;  // pixel corners of the data region (y grows down)
  double xlo, xhi, ylo, yhi;

  double x(double v) const { return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0); }
  double y(double v) const { return y1 - (v - ylo) / (yhi - ylo) * (y1 - y0); }
};

inline void open_svg(std::ostringstream& out, int w, int h) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

inline void text(std::ostringstream& out, double x, double y,
                 const std::string& s, const char* anchor = "middle",
                 int size = 12, const char* extra = "") {
  out << "<text x=\"" << num(x) << "\" y=\"" << num(y)
      << "\" font-family=\"sans-serif\" font-size=\"" << size
      << "\" text-anchor=\"" << anchor << "\"" << extra << ">" << escape(s)
      << "</text>\n";
}

inline void line(std::ostringstream& out, double x1, double y1, double x2,
                 double y2, const std::string& color = "#333333",
                 double width = 1.0) {
  out << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\""
      << num(x2) << "\" y2=\"" << num(y2) << "\" stroke=\"" << color
      << "\" stroke-width=\"" << num(width) << "\"/>\n";
}

inline void axes(std::ostringstream& out, const Frame& f,
                 const std::vector<double>& xticks,
                 const std::vector<double>& yticks,
                 const std::string& x_label, const std::string& y_label) {
  line(out, f.x0, f.y1, f.x1, f.y1);
  line(out, f.x0, f.y0, f.x0, f.y1);
  for (double t : xticks) {
    const double px = f.x(t);
    line(out, px, f.y1, px, f.y1 + 4);
    text(out, px, f.y1 + 17, num(t), "middle", 11);
  }
  for (double t : yticks) {
    const double py = f.y(t);
    line(out, f.x0 - 4, py, f.x0, py);
    text(out, f.x0 - 7, py + 4, num(t), "end", 11);
    line(out, f.x0, py, f.x1, py, "#e0e0e0", 0.5);
  }
  text(out, (f.x0 + f.x1) / 2, f.y1 + 34, x_label, "middle", 12);
  out << "<g transform=\"translate(14," << num((f.y0 + f.y1) / 2)
      << ") rotate(-90)\">";
  text(out, 0, 0, y_label, "middle", 12);
  out << "</g>\n";
}

inline void censor_glyph(std::ostringstream& out, double x, double y,
                         CensorGlyph glyph, const std::string& color) {
  if (glyph == CensorGlyph::kTick) {
    line(out, x, y - 5, x, y + 5, color, 1.3);
    return;
  }
  // Wye: stem down from the point, two arms up.
  line(out, x, y, x, y + 5, color, 1.3);
  line(out, x, y, x - 4, y - 4, color, 1.3);
  line(out, x, y, x + 4, y - 4, color, 1.3);
}

inline void step_path(std::ostringstream& out,
                      const std::vector<std::pair<double, double>>& points,
                      const Frame& f, const std::string& color) {
  if (points.empty()) return;
  std::ostringstream d;
  d << "M " << num(f.x(points[0].first)) << ' ' << num(f.y(points[0].second));
  for (std::size_t i = 1; i < points.size(); ++i) {
    d << " H " << num(f.x(points[i].first));
    d << " V " << num(f.y(points[i].second));
  }
  out << "<path d=\"" << d.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.8\"/>\n";
}

inline void legend(std::ostringstream& out, double x, double y,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double ly = y + 16.0 * static_cast<double>(i);
    line(out, x, ly, x + 22, ly, entries[i].second, 2.0);
    text(out, x + 28, ly + 4, entries[i].first, "start", 11);
  }
}

// At-risk counts listed under the time axis at each tick.
inline void at_risk_table(std::ostringstream& out, const Frame& f,
                          const std::vector<double>& xticks, double top,
                          const std::vector<std::string>& arm_names,
                          const std::vector<std::vector<int>>& counts) {
  text(out, f.x0, top, "At risk", "start", 11, " font-style=\"italic\"");
  for (std::size_t a = 0; a < arm_names.size(); ++a) {
    const double row_y = top + 15.0 * static_cast<double>(a + 1);
    text(out, f.x0 - 7, row_y, arm_names[a], "end", 11);
    for (std::size_t k = 0; k < xticks.size(); ++k)
      text(out, f.x(xticks[k]), row_y, std::to_string(counts[a][k]), "middle", 11);
  }
}

}  // namespace svg_detail

inline std::string km_plot_svg(const std::map<std::string, SurvivalCurve>& curves,
                               int max_time, const PlotOptions& options = {}) {
  using namespace svg_detail;
  std::ostringstream out;
  const auto n_arms = curves.size();
  const double table_h = 20.0 + 15.0 * static_cast<double>(n_arms);
  const int height = options.height;
  open_svg(out, options.width, height);
  Frame f;
  f.x0 = 64;
  f.x1 = options.width - 130.0;
  f.y0 = options.title.empty() ? 24.0 : 40.0;
  f.y1 = height - 56.0 - table_h;
  f.xlo = 0.0;
  f.xhi = std::max(1.0, static_cast<double>(max_time));
  f.ylo = 0.0;
  f.yhi = 1.0;
  if (!options.title.empty()) text(out, options.width / 2.0, 22, options.title, "middle", 14);
  const auto xticks = ticks(f.xlo, f.xhi, options.at_risk_columns - 1);
  const auto yticks = ticks(0.0, 1.0, 5);
  axes(out, f, xticks, yticks, options.x_label, "Survival probability");

  std::vector<std::pair<std::string, std::string>> legend_entries;
  std::vector<std::string> arm_names;
  std::vector<std::vector<int>> risk_rows;
  std::size_t color_idx = 0;
  for (const auto& [arm, curve] : curves) {
    const std::string color = arm_palette()[color_idx++ % arm_palette().size()];
    std::vector<std::pair<double, double>> pts{{0.0, 1.0}};
    for (const auto& s : curve.steps)
      pts.emplace_back(static_cast<double>(s.time), s.survival);
    pts.emplace_back(f.xhi, pts.back().second);
    step_path(out, pts, f, color);

    const auto value_at = [&](double t) {
      double v = 1.0;
      for (const auto& s : curve.steps)
        if (s.time <= t) v = s.survival;
        else break;
      return v;
    };
    for (const auto& mark : curve.censor_marks)
      censor_glyph(out, f.x(mark.time), f.y(value_at(mark.time)), options.glyph,
                   color);

    const auto at_risk_at = [&](double t) {
      int n = curve.n0;
      for (const auto& s : curve.steps)
        if (s.time < t) n -= s.events;
      for (const auto& m : curve.censor_marks)
        if (m.time < t) n -= m.count;
      return n;
    };
    std::vector<int> row;
    for (double t : xticks) row.push_back(at_risk_at(t));
    risk_rows.push_back(std::move(row));
    arm_names.push_back(arm);
    legend_entries.emplace_back("arm " + arm, color);
  }
  legend(out, f.x1 + 14, f.y0 + 10, legend_entries);
  at_risk_table(out, f, xticks, f.y1 + 46, arm_names, risk_rows);
  out << "</svg>\n";
  return out.str();
}

inline std::string wta_plot_svg(const WeightedTrajectoryCurve& curve,
                                const PlotOptions& options = {}) {
  using namespace svg_detail;
  std::ostringstream out;
  const auto n_arms = curve.arms.size();
  const double table_h = 20.0 + 15.0 * static_cast<double>(n_arms);
  open_svg(out, options.width, options.height);

  double ylo = 0.0, yhi = 1.0;
  double xhi = 1.0;
  for (const auto& arm : curve.arms)
    for (const auto& s : arm.steps) {
      ylo = std::min(ylo, s.health_status);
      yhi = std::max(yhi, s.health_status);
      xhi = std::max(xhi, static_cast<double>(s.time));
    }
  yhi += 0.02;
  if (ylo < 0.0) ylo -= 0.02;

  Frame f;
  f.x0 = 64;
  f.x1 = options.width - 130.0;
  f.y0 = options.title.empty() ? 24.0 : 40.0;
  f.y1 = options.height - 56.0 - table_h;
  f.xlo = 0.0;
  f.xhi = xhi;
  f.ylo = ylo;
  f.yhi = yhi;
  if (!options.title.empty())
    text(out, options.width / 2.0, 22, options.title, "middle", 14);
  const auto xticks = ticks(f.xlo, f.xhi, options.at_risk_columns - 1);
  const auto yticks = ticks(f.ylo, f.yhi, 6);
  axes(out, f, xticks, yticks, options.x_label, "Weighted health status");

  std::vector<std::pair<std::string, std::string>> legend_entries;
  std::vector<std::string> arm_names;
  std::vector<std::vector<int>> risk_rows;
  std::size_t color_idx = 0;
  for (const auto& arm : curve.arms) {
    const std::string color = arm_palette()[color_idx++ % arm_palette().size()];
    std::vector<std::pair<double, double>> pts;
    for (const auto& s : arm.steps)
      pts.emplace_back(static_cast<double>(s.time), s.health_status);
    step_path(out, pts, f, color);

    const auto status_at = [&](int t) {
      double v = 1.0;
      for (const auto& s : arm.steps)
        if (s.time <= t) v = s.health_status;
        else break;
      return v;
    };
    for (const auto& mark : arm.censor_marks)
      censor_glyph(out, f.x(mark.time), f.y(status_at(mark.time)), options.glyph,
                   color);

    std::vector<int> row;
    for (double t : xticks) {
      int n = 0;
      for (const auto& s : arm.steps)
        if (s.time == static_cast<int>(std::lround(t))) n = s.at_risk;
      row.push_back(n);
    }
    risk_rows.push_back(std::move(row));
    arm_names.push_back(arm.arm);
    legend_entries.emplace_back("arm " + arm.arm, color);
  }
  legend(out, f.x1 + 14, f.y0 + 10, legend_entries);
  at_risk_table(out, f, xticks, f.y1 + 46, arm_names, risk_rows);
  out << "</svg>\n";
  return out.str();
}

// Power against sample size, one panel per hazard ratio, one line per method.
inline std::string power_plot_svg(const PowerResult& result,
                                  const PlotOptions& options = {}) {
  using namespace svg_detail;
  const auto& grid = result.grid;
  const int panels = static_cast<int>(grid.hazard_ratios.size());
  const int panel_w = std::max(220, (options.width - 140) / std::max(panels, 1));
  const int width = panel_w * panels + 200;
  const int height = options.height;
  std::ostringstream out;
  open_svg(out, width, height);
  if (!options.title.empty()) text(out, width / 2.0, 22, options.title, "middle", 14);

  const double n_lo = static_cast<double>(grid.sample_sizes.front());
  const double n_hi = static_cast<double>(grid.sample_sizes.back());
  for (int p = 0; p < panels; ++p) {
    Frame f;
    f.x0 = 64.0 + p * panel_w;
    f.x1 = f.x0 + panel_w - 26.0;
    f.y0 = 48.0;
    f.y1 = height - 64.0;
    f.xlo = n_lo;
    f.xhi = std::max(n_hi, n_lo + 1.0);
    f.ylo = 0.0;
    f.yhi = 1.0;
    const auto xticks = ticks(f.xlo, f.xhi, 4);
    const auto yticks = ticks(0.0, 1.0, 5);
    axes(out, f, xticks, yticks, "Sample size",
         p == 0 ? "Rejection fraction" : "");
    char label[48];
    std::snprintf(label, sizeof label, "hazard ratio %.3g", grid.hazard_ratios[p]);
    text(out, (f.x0 + f.x1) / 2, 40, label, "middle", 12);

    for (Method m : grid.methods) {
      std::ostringstream pline;
      bool first = true;
      for (const auto& cell : result.cells) {
        if (cell.method != m || cell.hazard_ratio != grid.hazard_ratios[p])
          continue;
        pline << (first ? "" : " ") << num(f.x(cell.n)) << ',' << num(f.y(cell.power));
        first = false;
      }
      out << "<polyline fill=\"none\" stroke=\"" << method_color(m)
          << "\" stroke-width=\"1.8\" points=\"" << pline.str() << "\"/>\n";
    }
  }
  std::vector<std::pair<std::string, std::string>> legend_entries;
  for (Method m : grid.methods)
    legend_entries.emplace_back(method_name(m), method_color(m));
  legend(out, width - 150.0, 56.0, legend_entries);
  out << "</svg>\n";
  return out.str();
}

}  // namespace wta
