#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

// Minimal static SVG emission for the optional plot artifacts. Reports are
// the contract; these are a convenience for eyeballing a run.

namespace credulens::plots {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline void svg_open(std::ostream& out, int w, int h, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"12\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title
      << "</text>\n";
}

inline void svg_close(std::ostream& out) { out << "</svg>\n"; }

}  // namespace detail

// Per-user percentages, one series per population; missing values (outliers)
// are drawn below the zero line.
struct ScatterSeries {
  std::string label;
  std::string color;
  std::vector<double> values;  // NaN marks an outlier
};

inline void scatter_plot(std::ostream& out, const std::string& title,
                         std::span<const ScatterSeries> series) {
  const int w = 760, h = 420, left = 50, top = 40, bottom = 40;
  detail::svg_open(out, w, h, title);
  const double plot_h = h - top - bottom;
  std::size_t max_n = 1;
  for (const auto& s : series) max_n = std::max(max_n, s.values.size());
  auto ypos = [&](double pct) { return top + plot_h * (1.0 - pct / 100.0); };
  out << "<line x1=\"" << left << "\" y1=\"" << detail::num(ypos(0)) << "\" x2=\"" << w - 20
      << "\" y2=\"" << detail::num(ypos(0)) << "\" stroke=\"#888\"/>\n";
  for (int pct = 0; pct <= 100; pct += 20)
    out << "<text x=\"8\" y=\"" << detail::num(ypos(pct) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << pct << "</text>\n";
  int legend_y = 36;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double x = left + (w - left - 30) * static_cast<double>(i) /
                                  static_cast<double>(max_n);
      const bool outlier = !(s.values[i] == s.values[i]);  // NaN check
      const double y = outlier ? ypos(0) + 12 : ypos(s.values[i]);
      out << "<circle cx=\"" << detail::num(x) << "\" cy=\"" << detail::num(y)
          << "\" r=\"2\" fill=\"" << s.color << "\" fill-opacity=\"0.6\"/>\n";
    }
    out << "<text x=\"" << w - 160 << "\" y=\"" << legend_y
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << s.color << "\">"
        << s.label << "</text>\n";
    legend_y += 14;
  }
  detail::svg_close(out);
}

struct CurvePoint {
  double x, y;
};

inline void coverage_plot(std::ostream& out, const std::string& title,
                          std::span<const CurvePoint> c_ge, std::span<const CurvePoint> nc_lt,
                          double max_x) {
  const int w = 760, h = 420, left = 50, top = 40, bottom = 40;
  detail::svg_open(out, w, h, title);
  const double plot_h = h - top - bottom, plot_w = w - left - 30;
  auto xpos = [&](double x) { return left + plot_w * (max_x > 0 ? x / max_x : 0.0); };
  auto ypos = [&](double pct) { return top + plot_h * (1.0 - pct / 100.0); };
  auto draw = [&](std::span<const CurvePoint> pts, const char* color) {
    for (const auto& p : pts)
      out << "<circle cx=\"" << detail::num(xpos(p.x)) << "\" cy=\"" << detail::num(ypos(p.y))
          << "\" r=\"2\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
  };
  draw(c_ge, "purple");
  draw(nc_lt, "green");
  out << "<text x=\"" << w - 170 << "\" y=\"36\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"purple\">% C &#8805; x</text>\n"
      << "<text x=\"" << w - 170 << "\" y=\"50\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"green\">% NC &lt; x</text>\n";
  detail::svg_close(out);
}

struct BarGroup {
  std::string bin;
  double a = 0.0;
  double b = 0.0;
};

inline void decile_bars(std::ostream& out, const std::string& title, const std::string& a_label,
                        const std::string& b_label, std::span<const BarGroup> groups) {
  const int w = 760, h = 420, left = 40, top = 40, bottom = 60;
  detail::svg_open(out, w, h, title);
  double max_v = 1.0;
  for (const auto& g : groups) max_v = std::max({max_v, g.a, g.b});
  const double plot_h = h - top - bottom;
  const double group_w = (w - left - 20) / static_cast<double>(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double x0 = left + group_w * static_cast<double>(i);
    const double bar_w = group_w * 0.35;
    const double ha = plot_h * groups[i].a / max_v;
    const double hb = plot_h * groups[i].b / max_v;
    out << "<rect x=\"" << detail::num(x0) << "\" y=\"" << detail::num(top + plot_h - ha)
        << "\" width=\"" << detail::num(bar_w) << "\" height=\"" << detail::num(ha)
        << "\" fill=\"purple\"/>\n";
    out << "<rect x=\"" << detail::num(x0 + bar_w + 1) << "\" y=\""
        << detail::num(top + plot_h - hb) << "\" width=\"" << detail::num(bar_w)
        << "\" height=\"" << detail::num(hb) << "\" fill=\"green\"/>\n";
    out << "<text x=\"" << detail::num(x0) << "\" y=\"" << h - 36
        << "\" font-family=\"sans-serif\" font-size=\"8\" transform=\"rotate(35 "
        << detail::num(x0) << ' ' << h - 36 << ")\">" << groups[i].bin << "</text>\n";
  }
  out << "<text x=\"" << w - 170 << "\" y=\"36\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"purple\">" << a_label << "</text>\n"
      << "<text x=\"" << w - 170 << "\" y=\"50\" font-family=\"sans-serif\" font-size=\"11\" "
         "fill=\"green\">" << b_label << "</text>\n";
  detail::svg_close(out);
}

}  // namespace credulens::plots
