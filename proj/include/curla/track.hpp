#pragma once
#include <cstddef>
#include <vector>

#include "curla/geometry.hpp"

namespace curla {

struct Waypoint {
  Vec2 position;
  double tangent_heading = 0.0;  // radians, (-pi, pi]
  double arc_length_s = 0.0;     // cumulative polyline meters from origin
};

enum class TrackShape { Circle, Oval, RoundedRectangle };

// Shape descriptor consumed by build_track(). Dimensions in meters.
struct TrackSpec {
  TrackShape shape = TrackShape::Oval;
  double radius = 50.0;            // circle
  double straight_length = 100.0;  // oval: length of each straight
  double end_radius = 20.0;        // oval: semicircle end radius
  double rect_width = 120.0;       // rounded rectangle outer extents
  double rect_height = 60.0;
  double corner_radius = 15.0;
  double spacing = 1.0;  // waypoint spacing, must lie in (0.1, 2.0]
  double lane_half_width = 2.0;
};

struct TrackProjection {
  double nearest_s = 0.0;              // [0, total_length)
  double lateral_offset = 0.0;         // unsigned distance to centerline
  double signed_lateral_offset = 0.0;  // positive = left of travel direction
  double tangent_heading = 0.0;
  Vec2 nearest_point;
};

// Closed-loop centerline as a piecewise-linear polyline with arc-length
// parameterization. Immutable after construction; safe to share across
// threads read-only.
class Track {
 public:
  Track(std::vector<Waypoint> waypoints, double lane_half_width);

  const std::vector<Waypoint>& waypoints() const { return waypoints_; }
  double total_length() const { return total_length_; }
  double lane_half_width() const { return lane_half_width_; }

  // Nearest-point query over all segments (closing segment included).
  // Ties resolve to the smallest s.
  TrackProjection project(const Vec2& point) const;

  // Pose on the centerline at arc position s (wrapped into [0, L)).
  Vec2 position_at(double s) const;
  double heading_at(double s) const;

  // cumulative_distance / total_length; may exceed 1 on multi-lap runs.
  double lap_progress(double cumulative_distance) const;

 private:
  std::size_t segment_index_for(double s) const;

  std::vector<Waypoint> waypoints_;
  double total_length_ = 0.0;
  double lane_half_width_ = 0.0;
};

Track build_track(const TrackSpec& spec);

// Wrapped difference (vehicle_heading - tangent_heading) in (-pi, pi].
inline double heading_error(const TrackProjection& proj, double vehicle_heading) {
  return wrap_angle(vehicle_heading - proj.tangent_heading);
}

}  // namespace curla
