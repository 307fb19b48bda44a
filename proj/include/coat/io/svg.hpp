#pragma once

// Minimal standalone SVG emission: enough shapes for heatmaps, scatter
// trajectories, and line plots, with no external plotting dependency.

#include <string>
#include <utility>
#include <vector>

namespace coat {

class SvgCanvas {
 public:
  SvgCanvas(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  void rect(double x, double y, double w, double h, const std::string& fill);
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width);
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double stroke_width);
  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "", double stroke_width = 0.0);
  /// anchor: "start", "middle", or "end".
  void text(double x, double y, const std::string& s, double size,
            const std::string& fill, const std::string& anchor = "start");

  std::string render() const;
  void save(const std::string& path) const;

 private:
  int width_, height_;
  std::string body_;
};

/// Five-stop dark-blue -> teal -> green -> yellow colormap for t in [0,1];
/// values outside the range are clamped.
std::string heat_color(double t);

/// Small qualitative palette for multi-series line plots.
std::string series_color(int i);

/// One curve of a line chart; x is the 1-based element position.
struct LineSeries {
  std::string label;
  std::string color;
  std::vector<double> ys;
};

/// Draws a framed line chart (axes, min/max ticks, legend) onto a fresh
/// canvas of the given size.
SvgCanvas render_line_chart(int width, int height, const std::string& title,
                            const std::string& x_label, const std::string& y_label,
                            const std::vector<LineSeries>& series);

}  // namespace coat
