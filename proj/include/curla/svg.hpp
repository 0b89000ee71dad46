#pragma once
#include <string>
#include <vector>

#include "curla/geometry.hpp"

namespace curla {

struct SvgSeries {
  std::string label;
  std::vector<Vec2> points;  // logical coordinates
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 720;
  int height = 440;
};

// Standalone SVG line chart. Each polyline also carries its logical
// coordinates in a data-points attribute so tests can check curve values
// without reversing the pixel transform.
void write_svg_chart(const std::string& path, const SvgChart& chart);

}  // namespace curla
