#ifndef KHAYAL_FIGURES_HPP
#define KHAYAL_FIGURES_HPP

// Static SVG renderings of expression tables and their box plots.

#include <algorithm>
#include <cstdio>
#include <string>

#include "khayal/aggregate.hpp"

namespace khayal {

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(w) + "\" height=\"" + svg_num(h) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string svg_text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" text-anchor=\"" + anchor + "\">" + svg_escape(s) +
         "</text>\n";
}

}  // namespace detail

/// Artist x syllable heat map; darker means more variation, hatched grey
/// means no data.
inline std::string svg_heatmap(const ExpressionTable& t, const std::string& title) {
  const double cell = 40.0, left = 90.0, top = 40.0;
  const double w = left + cell * static_cast<double>(t.syllables.size()) + 20.0;
  const double h = top + cell * static_cast<double>(t.artists.size()) + 30.0;
  double vmax = 0.0;
  for (const auto& row : t.cells)
    for (const auto& c : row)
      if (c.value) vmax = std::max(vmax, *c.value);
  if (vmax <= 0.0) vmax = 1.0;

  std::string s = detail::svg_open(w, h);
  s += detail::svg_text(w / 2, 18, title);
  for (std::size_t c = 0; c < t.syllables.size(); ++c)
    s += detail::svg_text(left + cell * (static_cast<double>(c) + 0.5), top + cell * t.artists.size() + 16,
                          t.syllables[c]);
  for (std::size_t r = 0; r < t.artists.size(); ++r) {
    const double y = top + cell * static_cast<double>(r);
    s += detail::svg_text(left - 6, y + cell / 2 + 4, t.artists[r], "end");
    for (std::size_t c = 0; c < t.syllables.size(); ++c) {
      const double x = left + cell * static_cast<double>(c);
      const auto& v = t.at(r, c).value;
      std::string fill = "#dddddd";
      if (v) {
        const int shade = static_cast<int>(255.0 * (1.0 - std::clamp(*v / vmax, 0.0, 1.0)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02xff", shade, shade);
        fill = buf;
      }
      s += "<rect x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(y) + "\" width=\"" +
           detail::svg_num(cell) + "\" height=\"" + detail::svg_num(cell) + "\" fill=\"" + fill +
           "\" stroke=\"white\"/>\n";
      if (v) s += detail::svg_text(x + cell / 2, y + cell / 2 + 4, detail::svg_num(*v));
    }
  }
  return s + "</svg>\n";
}

/// One box per syllable with whiskers at min/max and the column means
/// joined by a dotted line.
inline std::string svg_boxplot(const DistributionSummary& d, const std::string& title) {
  const double col = 50.0, left = 50.0, top = 30.0, height = 220.0;
  const double w = left + col * static_cast<double>(d.columns.size()) + 20.0;
  const double h = top + height + 40.0;
  double vmax = 0.0;
  for (const auto& b : d.columns) vmax = std::max(vmax, b.max);
  if (vmax <= 0.0) vmax = 1.0;
  auto y_of = [&](double v) { return top + height * (1.0 - v / vmax); };

  std::string s = detail::svg_open(w, h);
  s += detail::svg_text(w / 2, 18, title);
  s += "<line x1=\"" + detail::svg_num(left) + "\" y1=\"" + detail::svg_num(top) + "\" x2=\"" +
       detail::svg_num(left) + "\" y2=\"" + detail::svg_num(top + height) + "\" stroke=\"black\"/>\n";
  s += detail::svg_text(left - 4, top + 4, detail::svg_num(vmax), "end");
  s += detail::svg_text(left - 4, top + height + 4, "0", "end");
  std::string means;
  for (std::size_t i = 0; i < d.columns.size(); ++i) {
    const auto& b = d.columns[i];
    const double cx = left + col * (static_cast<double>(i) + 0.5);
    const double bw = col * 0.5;
    s += "<line x1=\"" + detail::svg_num(cx) + "\" y1=\"" + detail::svg_num(y_of(b.max)) + "\" x2=\"" +
         detail::svg_num(cx) + "\" y2=\"" + detail::svg_num(y_of(b.min)) + "\" stroke=\"black\"/>\n";
    s += "<rect x=\"" + detail::svg_num(cx - bw / 2) + "\" y=\"" + detail::svg_num(y_of(b.q3)) + "\" width=\"" +
         detail::svg_num(bw) + "\" height=\"" + detail::svg_num(y_of(b.q1) - y_of(b.q3)) +
         "\" fill=\"#cfe0f5\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + detail::svg_num(cx - bw / 2) + "\" y1=\"" + detail::svg_num(y_of(b.median)) + "\" x2=\"" +
         detail::svg_num(cx + bw / 2) + "\" y2=\"" + detail::svg_num(y_of(b.median)) + "\" stroke=\"black\"/>\n";
    means += (means.empty() ? "" : " ") + detail::svg_num(cx) + "," + detail::svg_num(y_of(b.mean));
    s += detail::svg_text(cx, top + height + 16, b.syllable);
  }
  if (!means.empty())
    s += "<polyline points=\"" + means + "\" fill=\"none\" stroke=\"#c03030\" stroke-dasharray=\"3,3\"/>\n";
  return s + "</svg>\n";
}

}  // namespace khayal

#endif  // KHAYAL_FIGURES_HPP
