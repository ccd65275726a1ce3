#pragma once

#include <string>
#include <vector>

namespace mfdfa {

struct SvgLine {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Self-contained SVG line chart with axes, tick labels and a legend.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgLine>& lines);

}  // namespace mfdfa
