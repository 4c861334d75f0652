#include "polopt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace polopt::svg {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 50;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string header(const std::string& title) {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         title + "</text>\n";
  return out;
}

}  // namespace

std::string vector_field_svg(const std::vector<Arrow>& arrows, double x_min, double x_max,
                             double y_min, double y_max, const std::string& title) {
  const double sx = (kWidth - 2.0 * kMargin) / std::max(x_max - x_min, 1e-12);
  const double sy = (kHeight - 2.0 * kMargin) / std::max(y_max - y_min, 1e-12);
  const auto px = [&](double x) { return kMargin + (x - x_min) * sx; };
  const auto py = [&](double y) { return kHeight - kMargin - (y - y_min) * sy; };

  std::string out = header(title);
  const double arrow_len = 0.4 * std::min((x_max - x_min), (y_max - y_min)) /
                           std::sqrt(std::max<double>(arrows.size(), 1.0));
  for (const Arrow& a : arrows) {
    if (!std::isfinite(a.dx) || !std::isfinite(a.dy)) continue;
    const double norm = std::hypot(a.dx, a.dy);
    if (norm < 1e-300) continue;
    const double ex = a.x + arrow_len * a.dx / norm;
    const double ey = a.y + arrow_len * a.dy / norm;
    out += "<line x1=\"" + num(px(a.x)) + "\" y1=\"" + num(py(a.y)) + "\" x2=\"" + num(px(ex)) +
           "\" y2=\"" + num(py(ey)) + "\" stroke=\"" + a.color + "\" stroke-width=\"1\"/>\n";
    out += "<circle cx=\"" + num(px(ex)) + "\" cy=\"" + num(py(ey)) + "\" r=\"1.5\" fill=\"" +
           a.color + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string line_chart_svg(const std::vector<Series>& series, const std::string& title,
                           bool log_y) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  const auto y_of = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, y_of(s.y[i]));
      y_max = std::max(y_max, y_of(s.y[i]));
    }
  }
  if (!(x_min < x_max)) { x_min = 0.0; x_max = 1.0; }
  if (!(y_min < y_max)) { y_min = 0.0; y_max = 1.0; }

  const double sx = (kWidth - 2.0 * kMargin) / (x_max - x_min);
  const double sy = (kHeight - 2.0 * kMargin) / (y_max - y_min);
  std::string out = header(title);
  int label_row = 0;
  for (const Series& s : series) {
    std::string points;
    bool open = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) {
        if (open) {
          out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"" + points + "\"/>\n";
          points.clear();
          open = false;
        }
        continue;
      }
      const double px = kMargin + (s.x[i] - x_min) * sx;
      const double py = kHeight - kMargin - (y_of(s.y[i]) - y_min) * sy;
      points += num(px) + "," + num(py) + " ";
      open = true;
    }
    if (open)
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" points=\"" + points + "\"/>\n";
    out += "<text x=\"" + std::to_string(kWidth - kMargin) + "\" y=\"" +
           std::to_string(kMargin + 16 * label_row++) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + s.color +
           "\">" + s.label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace polopt::svg
