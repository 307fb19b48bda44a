#include "coat/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace coat {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  // Trim trailing zeros for compactness ("12.00" -> "12", "0.50" -> "0.5").
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

std::string format_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape_text(const std::string& s) {
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

}  // namespace

SvgCanvas::SvgCanvas(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("svg: non-positive size");
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double stroke_width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
           "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& stroke, double stroke_width) {
  if (pts.size() < 2) return;
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += ' ';
    body_ += num(pts[i].first) + "," + num(pts[i].second);
  }
  body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_width) + "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill,
                       const std::string& stroke, double stroke_width) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + fill + "\"";
  if (!stroke.empty())
    body_ += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"";
  body_ += "/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, double size,
                     const std::string& fill, const std::string& anchor) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
           "\" font-family=\"sans-serif\" fill=\"" + fill + "\" text-anchor=\"" +
           anchor + "\">" + escape_text(s) + "</text>\n";
}

std::string SvgCanvas::render() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
         "width=\"" + std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
         "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
         "\">\n" + body_ + "</svg>\n";
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("svg: cannot open '" + path + "' for writing");
  out << render();
  if (!out) throw std::runtime_error("svg: write failed for '" + path + "'");
}

std::string heat_color(double t) {
  // Stops loosely following a perceptually ordered dark-to-bright ramp.
  static const double stops[5][3] = {{68, 1, 84},     // dark violet
                                     {59, 82, 139},   // blue
                                     {33, 145, 140},  // teal
                                     {94, 201, 98},   // green
                                     {253, 231, 37}}; // yellow
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * 4.0;
  const int i = std::min(3, static_cast<int>(pos));
  const double f = pos - i;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

std::string series_color(int i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[((i % 8) + 8) % 8];
}

SvgCanvas render_line_chart(int width, int height, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<LineSeries>& series) {
  SvgCanvas svg(width, height);
  svg.rect(0, 0, width, height, "#ffffff");
  const double ml = 70, mr = 20, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double ymin = 0.0, ymax = 1.0;
  std::size_t xmax = 1;
  bool any = false;
  for (const LineSeries& s : series) {
    for (double v : s.ys) {
      if (!std::isfinite(v)) continue;
      if (!any) {
        ymin = ymax = v;
        any = true;
      } else {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
    xmax = std::max(xmax, s.ys.size());
  }
  if (!any) ymin = 0.0, ymax = 1.0;
  if (ymax - ymin < 1e-12) {
    ymax += 0.5;
    ymin -= 0.5;
  }

  const auto px = [&](double x) { return ml + (x - 1.0) / std::max<double>(1.0, xmax - 1.0) * pw; };
  const auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  // Frame and tick labels.
  svg.line(ml, mt, ml, mt + ph, "#000000", 1.2);
  svg.line(ml, mt + ph, ml + pw, mt + ph, "#000000", 1.2);
  svg.text(ml - 8, py(ymax) + 4, format_label(ymax), 12, "#000000", "end");
  svg.text(ml - 8, py(ymin) + 4, format_label(ymin), 12, "#000000", "end");
  svg.text(px(1), mt + ph + 18, "1", 12, "#000000", "middle");
  svg.text(px(static_cast<double>(xmax)), mt + ph + 18, std::to_string(xmax), 12,
           "#000000", "middle");
  svg.text(ml + pw / 2, mt + ph + 36, x_label, 13, "#000000", "middle");
  svg.text(16, mt + ph / 2, y_label, 13, "#000000", "middle");
  svg.text(width / 2.0, 24, title, 15, "#000000", "middle");

  for (const LineSeries& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      if (std::isfinite(s.ys[i])) pts.emplace_back(px(static_cast<double>(i + 1)), py(s.ys[i]));
    }
    svg.polyline(pts, s.color, 1.6);
  }

  // Legend, top-right corner of the plot area.
  double ly = mt + 14;
  for (const LineSeries& s : series) {
    if (s.label.empty()) continue;
    svg.line(ml + pw - 110, ly - 4, ml + pw - 90, ly - 4, s.color, 2.5);
    svg.text(ml + pw - 84, ly, s.label, 12, "#000000", "start");
    ly += 16;
  }
  return svg;
}

}  // namespace coat
