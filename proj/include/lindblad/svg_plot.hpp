#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lindblad/complex_matrix.hpp"
#include "lindblad/report_io.hpp"

// Small self-contained SVG emitter for the diagnostic plots: scatter series
// plus optional fitted lines, on linear or log-log axes.

namespace lindblad {

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string color = "#1f6fb2";
};

struct PlotLine {
  std::string label;
  double slope = 0.0;
  double intercept = 0.0;  // in axis coordinates (log space for log-log plots)
  std::string color = "#c23b22";
};

namespace detail {

struct AxisMap {
  double lo = 0.0, hi = 1.0;
  double pix_lo = 0.0, pix_hi = 1.0;

  double operator()(double v) const {
    const double t = (v - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

}  // namespace detail

// Log-log scatter plot; points with a nonpositive coordinate are skipped.
// Fit lines are drawn through log-space coordinates: log y = slope log x + intercept.
inline std::string plot_loglog(const std::vector<PlotSeries>& series,
                               const std::vector<PlotLine>& lines, const std::string& title,
                               const std::string& x_label, const std::string& y_label) {
  constexpr double width = 640.0, height = 480.0, margin = 64.0;
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!(s.xs[i] > 0.0) || !(s.ys[i] > 0.0)) continue;
      const double lx = std::log10(s.xs[i]);
      const double ly = std::log10(s.ys[i]);
      if (first) {
        xmin = xmax = lx;
        ymin = ymax = ly;
        first = false;
      } else {
        xmin = std::min(xmin, lx);
        xmax = std::max(xmax, lx);
        ymin = std::min(ymin, ly);
        ymax = std::max(ymax, ly);
      }
    }
  if (first) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  if (xmax - xmin < 1e-9) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
  detail::AxisMap mx{xmin - xpad, xmax + xpad, margin, width - margin};
  detail::AxisMap my{ymin - ypad, ymax + ypad, height - margin, margin};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"15\">" + title + "</text>\n";
  svg += "<line x1=\"" + format_short(margin) + "\" y1=\"" + format_short(height - margin) +
         "\" x2=\"" + format_short(width - margin) + "\" y2=\"" + format_short(height - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_short(margin) + "\" y1=\"" + format_short(height - margin) +
         "\" x2=\"" + format_short(margin) + "\" y2=\"" + format_short(margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"320\" y=\"466\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"13\">log10 " + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"13\" transform=\"rotate(-90 18 240)\">log10 " + y_label + "</text>\n";

  // decade ticks
  for (int d = static_cast<int>(std::floor(xmin)); d <= static_cast<int>(std::ceil(xmax)); ++d) {
    const double px = mx(static_cast<double>(d));
    if (px < margin || px > width - margin) continue;
    svg += "<line x1=\"" + format_short(px) + "\" y1=\"" + format_short(height - margin) +
           "\" x2=\"" + format_short(px) + "\" y2=\"" + format_short(height - margin + 6.0) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_short(px) + "\" y=\"" + format_short(height - margin + 20.0) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
           std::to_string(d) + "</text>\n";
  }
  for (int d = static_cast<int>(std::floor(ymin)); d <= static_cast<int>(std::ceil(ymax)); ++d) {
    const double py = my(static_cast<double>(d));
    if (py < margin || py > height - margin) continue;
    svg += "<line x1=\"" + format_short(margin - 6.0) + "\" y1=\"" + format_short(py) +
           "\" x2=\"" + format_short(margin) + "\" y2=\"" + format_short(py) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_short(margin - 10.0) + "\" y=\"" + format_short(py + 4.0) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" +
           std::to_string(d) + "</text>\n";
  }

  const double ln10 = std::log(10.0);
  for (const auto& line : lines) {
    // convert natural-log fit to log10 axes: log10 y = slope log10 x + intercept/ln 10
    const double x0 = xmin, x1 = xmax;
    const double y0 = line.slope * x0 + line.intercept / ln10;
    const double y1 = line.slope * x1 + line.intercept / ln10;
    svg += "<line x1=\"" + format_short(mx(x0)) + "\" y1=\"" + format_short(my(y0)) +
           "\" x2=\"" + format_short(mx(x1)) + "\" y2=\"" + format_short(my(y1)) +
           "\" stroke=\"" + line.color + "\" stroke-dasharray=\"6 4\"/>\n";
  }

  double legend_y = margin + 8.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!(s.xs[i] > 0.0) || !(s.ys[i] > 0.0)) continue;
      svg += "<circle cx=\"" + format_short(mx(std::log10(s.xs[i]))) + "\" cy=\"" +
             format_short(my(std::log10(s.ys[i]))) + "\" r=\"3.5\" fill=\"" + s.color +
             "\"/>\n";
    }
    svg += "<text x=\"" + format_short(width - margin - 4.0) + "\" y=\"" +
           format_short(legend_y) + "\" text-anchor=\"end\" font-family=\"monospace\" "
           "font-size=\"12\" fill=\"" + s.color + "\">" + s.label + "</text>\n";
    legend_y += 16.0;
  }
  for (const auto& line : lines) {
    svg += "<text x=\"" + format_short(width - margin - 4.0) + "\" y=\"" +
           format_short(legend_y) + "\" text-anchor=\"end\" font-family=\"monospace\" "
           "font-size=\"12\" fill=\"" + line.color + "\">" + line.label + "</text>\n";
    legend_y += 16.0;
  }
  svg += "</svg>\n";
  return svg;
}

// Linear-axis polyline plot (used for time traces).
inline std::string plot_lines(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label) {
  constexpr double width = 640.0, height = 480.0, margin = 64.0;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (first) {
        xmin = xmax = s.xs[i];
        ymin = ymax = s.ys[i];
        first = false;
      } else {
        xmin = std::min(xmin, s.xs[i]);
        xmax = std::max(xmax, s.xs[i]);
        ymin = std::min(ymin, s.ys[i]);
        ymax = std::max(ymax, s.ys[i]);
      }
    }
  if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
  if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
  detail::AxisMap mx{xmin, xmax, margin, width - margin};
  detail::AxisMap my{ymin, ymax, height - margin, margin};

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"15\">" + title + "</text>\n";
  svg += "<line x1=\"" + format_short(margin) + "\" y1=\"" + format_short(height - margin) +
         "\" x2=\"" + format_short(width - margin) + "\" y2=\"" + format_short(height - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_short(margin) + "\" y1=\"" + format_short(height - margin) +
         "\" x2=\"" + format_short(margin) + "\" y2=\"" + format_short(margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<text x=\"320\" y=\"466\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"13\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"13\" transform=\"rotate(-90 18 240)\">" + y_label + "</text>\n";

  double legend_y = margin + 8.0;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (i) points += ' ';
      points += format_short(mx(s.xs[i])) + "," + format_short(my(s.ys[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"" + points + "\"/>\n";
    svg += "<text x=\"" + format_short(width - margin - 4.0) + "\" y=\"" +
           format_short(legend_y) + "\" text-anchor=\"end\" font-family=\"monospace\" "
           "font-size=\"12\" fill=\"" + s.color + "\">" + s.label + "</text>\n";
    legend_y += 16.0;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace lindblad
