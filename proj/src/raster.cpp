#include "curla/raster.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "curla/kernels.hpp"

namespace curla {
namespace {

struct Segment {
  Vec2 a;
  Vec2 ab;
  double len2 = 0.0;
};

double point_segment_dist2(const Vec2& p, const Segment& s) {
  double t = s.len2 > 0.0 ? (p - s.a).dot(s.ab) / s.len2 : 0.0;
  t = clamp(t, 0.0, 1.0);
  const Vec2 c = s.a + s.ab * t;
  return (p - c).norm2();
}

}  // namespace

RasterFrame rasterize(const EnvSnapshot& snapshot, const RasterConfig& config) {
  RasterFrame frame;
  frame.width = config.width;
  frame.height = config.height;
  frame.values.assign(static_cast<std::size_t>(config.width) * config.height, 0.0);

  const Vec2 fwd = heading_vec(snapshot.agent.heading);
  const Vec2 left = left_normal(snapshot.agent.heading);
  const double span_fwd = config.forward_range + config.back_range;
  const double span_lat = 2.0 * config.lateral_half_range;
  const double lane_half = snapshot.track->lane_half_width();

  // Pixels only need centerline distances up to lane_half_width, so segments
  // outside the window's inflated bounding box cannot change the frame.
  const Vec2 corners[4] = {
      snapshot.agent.position + fwd * config.forward_range + left * config.lateral_half_range,
      snapshot.agent.position + fwd * config.forward_range - left * config.lateral_half_range,
      snapshot.agent.position - fwd * config.back_range + left * config.lateral_half_range,
      snapshot.agent.position - fwd * config.back_range - left * config.lateral_half_range,
  };
  double min_x = corners[0].x, max_x = corners[0].x;
  double min_y = corners[0].y, max_y = corners[0].y;
  for (const Vec2& corner : corners) {
    min_x = std::min(min_x, corner.x);
    max_x = std::max(max_x, corner.x);
    min_y = std::min(min_y, corner.y);
    max_y = std::max(max_y, corner.y);
  }
  const double inflate = lane_half + 1e-6;
  min_x -= inflate;
  max_x += inflate;
  min_y -= inflate;
  max_y += inflate;

  const auto& wps = snapshot.track->waypoints();
  std::vector<Segment> segments;
  segments.reserve(64);
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const Vec2& a = wps[i].position;
    const Vec2& b = wps[(i + 1) % wps.size()].position;
    if (std::max(a.x, b.x) < min_x || std::min(a.x, b.x) > max_x ||
        std::max(a.y, b.y) < min_y || std::min(a.y, b.y) > max_y)
      continue;
    segments.push_back({a, b - a, (b - a).norm2()});
  }

  const double centerline2 =
      config.centerline_half_thickness * config.centerline_half_thickness;
  const double lane2 = lane_half * lane_half;

  const int total = config.width * config.height;
#pragma omp parallel for schedule(static) if (kernels::parallel_enabled())
  for (int pixel = 0; pixel < total; ++pixel) {
    const int row = pixel / config.width;
    const int col = pixel % config.width;
    // Pixel centers; row 0 maps to forward_range, col 0 to the agent's left.
    const double forward =
        config.forward_range - (row + 0.5) * span_fwd / config.height;
    const double lateral =
        config.lateral_half_range - (col + 0.5) * span_lat / config.width;
    const Vec2 world = snapshot.agent.position + fwd * forward + left * lateral;

    double best2 = std::numeric_limits<double>::infinity();
    for (const Segment& segment : segments)
      best2 = std::min(best2, point_segment_dist2(world, segment));

    double value = 0.0;
    if (best2 <= centerline2)
      value = config.centerline_intensity;
    else if (best2 <= lane2)
      value = config.lane_band_intensity;
    for (const TrafficPose& traffic : snapshot.traffic) {
      const Vec2 rel = world - traffic.position;
      const Vec2 dir = heading_vec(traffic.heading);
      const Vec2 nrm = left_normal(traffic.heading);
      if (std::abs(rel.dot(dir)) <= traffic.half_length &&
          std::abs(rel.dot(nrm)) <= traffic.half_width) {
        value = config.traffic_intensity;
        break;
      }
    }
    frame.values[static_cast<std::size_t>(pixel)] = value;
  }
  return frame;
}

}  // namespace curla
