#pragma once

#include <string>
#include <vector>

namespace polopt::svg {

struct Arrow {
  double x = 0.0, y = 0.0;    // base point, data coordinates
  double dx = 0.0, dy = 0.0;  // direction, data coordinates
  std::string color = "#000000";
};

struct Series {
  std::vector<double> x;
  std::vector<double> y;  // non-finite samples break the polyline
  std::string color = "#000000";
  std::string label;
};

/// Quiver plot of unit-scaled arrows on a data-coordinate canvas.
std::string vector_field_svg(const std::vector<Arrow>& arrows, double x_min, double x_max,
                             double y_min, double y_max, const std::string& title);

/// Log-scale line chart (y is plotted as log10).
std::string line_chart_svg(const std::vector<Series>& series, const std::string& title,
                           bool log_y = true);

}  // namespace polopt::svg
