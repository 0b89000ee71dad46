#pragma once
#include <vector>

#include "curla/sim.hpp"

namespace curla {

struct RasterConfig {
  int width = 40;   // pixels, lateral axis
  int height = 80;  // pixels, forward axis
  double forward_range = 40.0;       // meters ahead of the agent
  double back_range = 10.0;          // meters behind
  double lateral_half_range = 7.5;   // meters to each side
  double lane_band_intensity = 0.5;
  double centerline_intensity = 0.8;
  double traffic_intensity = 1.0;
  double centerline_half_thickness = 0.25;  // meters
};

// Grayscale ego frame, forward = up (row 0 is farthest ahead), values in
// [0, 1]. Row-major.
struct RasterFrame {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
};

// Deterministic function of the snapshot: lane band at 0.5, centerline at
// 0.8, traffic footprints at 1.0 on top, background 0.
RasterFrame rasterize(const EnvSnapshot& snapshot, const RasterConfig& config);

}  // namespace curla
