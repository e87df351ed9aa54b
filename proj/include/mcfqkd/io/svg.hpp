// Static SVG line charts.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mcfqkd::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

/// Non-finite points (and x <= 0 on a log axis) break the polyline.
void write_svg_plot(std::ostream& out, const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace mcfqkd::io
