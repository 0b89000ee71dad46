#include "curla/track.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace curla {
namespace {

// Analytic pose on a closed loop made of straight and arc pieces, used by
// build_track to sample waypoints at uniform arc steps.
struct Piece {
  bool is_arc = false;
  Vec2 start;            // straights
  double heading = 0.0;  // straight heading / unused for arcs
  Vec2 center;           // arcs
  double radius = 0.0;
  double angle0 = 0.0;  // arc start angle at the center
  double length = 0.0;
};

void sample_loop(const std::vector<Piece>& pieces, double spacing,
                 std::vector<Waypoint>& out) {
  double total = 0.0;
  for (const auto& p : pieces) total += p.length;
  const int n = std::max(8, static_cast<int>(std::ceil(total / spacing)));
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = total * static_cast<double>(i) / static_cast<double>(n);
    for (const auto& p : pieces) {
      if (s > p.length) {
        s -= p.length;
        continue;
      }
      Waypoint wp;
      if (p.is_arc) {
        const double a = p.angle0 + s / p.radius;  // CCW
        wp.position = p.center + Vec2{std::cos(a), std::sin(a)} * p.radius;
        wp.tangent_heading = wrap_angle(a + kPi / 2.0);
      } else {
        wp.position = p.start + heading_vec(p.heading) * s;
        wp.tangent_heading = wrap_angle(p.heading);
      }
      out.push_back(wp);
      break;
    }
  }
}

}  // namespace

Track::Track(std::vector<Waypoint> waypoints, double lane_half_width)
    : waypoints_(std::move(waypoints)), lane_half_width_(lane_half_width) {
  if (waypoints_.size() < 3)
    throw std::invalid_argument("track needs at least 3 waypoints");
  if (lane_half_width_ <= 0.0)
    throw std::invalid_argument("lane_half_width must be positive");

  double s = 0.0;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    waypoints_[i].arc_length_s = s;
    const Vec2& a = waypoints_[i].position;
    const Vec2& b = waypoints_[(i + 1) % waypoints_.size()].position;
    const double seg = (b - a).norm();
    if (seg <= 0.0)
      throw std::invalid_argument("duplicate consecutive waypoints");
    if (seg > 2.0 + 1e-9)
      throw std::invalid_argument("waypoint spacing exceeds 2 m");
    s += seg;
  }
  total_length_ = s;
}

TrackProjection Track::project(const Vec2& point) const {
  const std::size_t n = waypoints_.size();
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  double best_t = 0.0;
  Vec2 best_point;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = waypoints_[i].position;
    const Vec2& b = waypoints_[(i + 1) % n].position;
    const Vec2 ab = b - a;
    const double len2 = ab.norm2();
    double t = len2 > 0.0 ? (point - a).dot(ab) / len2 : 0.0;
    t = clamp(t, 0.0, 1.0);
    const Vec2 cand = a + ab * t;
    const double d2 = (point - cand).norm2();
    if (d2 < best_d2) {  // strict: ties keep the earlier (smaller-s) segment
      best_d2 = d2;
      best_i = i;
      best_t = t;
      best_point = cand;
    }
  }

  const Waypoint& a = waypoints_[best_i];
  const Waypoint& b = waypoints_[(best_i + 1) % n];
  const double seg_len = (b.position - a.position).norm();

  TrackProjection proj;
  proj.nearest_point = best_point;
  proj.nearest_s = std::fmod(a.arc_length_s + best_t * seg_len, total_length_);
  proj.lateral_offset = std::sqrt(best_d2);
  proj.tangent_heading = wrap_angle(
      a.tangent_heading + best_t * wrap_angle(b.tangent_heading - a.tangent_heading));
  proj.signed_lateral_offset =
      (point - best_point).dot(left_normal(proj.tangent_heading));
  return proj;
}

std::size_t Track::segment_index_for(double s) const {
  // Last waypoint whose arc_length_s <= s.
  auto it = std::upper_bound(
      waypoints_.begin(), waypoints_.end(), s,
      [](double v, const Waypoint& wp) { return v < wp.arc_length_s; });
  return static_cast<std::size_t>(std::distance(waypoints_.begin(), it)) - 1;
}

Vec2 Track::position_at(double s) const {
  s = std::fmod(s, total_length_);
  if (s < 0.0) s += total_length_;
  const std::size_t i = segment_index_for(s);
  const Waypoint& a = waypoints_[i];
  const Waypoint& b = waypoints_[(i + 1) % waypoints_.size()];
  const double seg_len = (b.position - a.position).norm();
  const double t = seg_len > 0.0 ? (s - a.arc_length_s) / seg_len : 0.0;
  return a.position + (b.position - a.position) * t;
}

double Track::heading_at(double s) const {
  s = std::fmod(s, total_length_);
  if (s < 0.0) s += total_length_;
  const std::size_t i = segment_index_for(s);
  const Waypoint& a = waypoints_[i];
  const Waypoint& b = waypoints_[(i + 1) % waypoints_.size()];
  const double seg_len = (b.position - a.position).norm();
  const double t = seg_len > 0.0 ? (s - a.arc_length_s) / seg_len : 0.0;
  return wrap_angle(a.tangent_heading +
                    t * wrap_angle(b.tangent_heading - a.tangent_heading));
}

double Track::lap_progress(double cumulative_distance) const {
  if (cumulative_distance < 0.0)
    throw std::invalid_argument("cumulative_distance must be >= 0");
  return cumulative_distance / total_length_;
}

Track build_track(const TrackSpec& spec) {
  if (!(spec.spacing > 0.1 && spec.spacing <= 2.0))
    throw std::invalid_argument("waypoint spacing must lie in (0.1, 2.0] m");

  std::vector<Piece> pieces;
  switch (spec.shape) {
    case TrackShape::Circle: {
      if (spec.radius <= 0.0) throw std::invalid_argument("radius must be positive");
      Piece arc;
      arc.is_arc = true;
      arc.center = {0.0, 0.0};
      arc.radius = spec.radius;
      arc.angle0 = 0.0;
      arc.length = 2.0 * kPi * spec.radius;
      pieces.push_back(arc);
      break;
    }
    case TrackShape::Oval: {
      const double s = spec.straight_length;
      const double r = spec.end_radius;
      if (s <= 0.0 || r <= 0.0)
        throw std::invalid_argument("oval dimensions must be positive");
      // CCW stadium: bottom straight, right semicircle, top straight, left.
      Piece bottom{false, {-s / 2.0, -r}, 0.0, {}, 0.0, 0.0, s};
      Piece right{true, {}, 0.0, {s / 2.0, 0.0}, r, -kPi / 2.0, kPi * r};
      Piece top{false, {s / 2.0, r}, kPi, {}, 0.0, 0.0, s};
      Piece left{true, {}, 0.0, {-s / 2.0, 0.0}, r, kPi / 2.0, kPi * r};
      pieces = {bottom, right, top, left};
      break;
    }
    case TrackShape::RoundedRectangle: {
      const double w = spec.rect_width;
      const double h = spec.rect_height;
      const double r = spec.corner_radius;
      if (w <= 0.0 || h <= 0.0 || r <= 0.0)
        throw std::invalid_argument("rectangle dimensions must be positive");
      if (w <= 2.0 * r || h <= 2.0 * r)
        throw std::invalid_argument("corner radius too large for rectangle");
      const double sw = w - 2.0 * r;  // straight extents
      const double sh = h - 2.0 * r;
      const double hw = w / 2.0, hh = h / 2.0;
      pieces = {
          {false, {-sw / 2.0, -hh}, 0.0, {}, 0.0, 0.0, sw},
          {true, {}, 0.0, {sw / 2.0, -hh + r}, r, -kPi / 2.0, kPi * r / 2.0},
          {false, {hw, -sh / 2.0}, kPi / 2.0, {}, 0.0, 0.0, sh},
          {true, {}, 0.0, {sw / 2.0, hh - r}, r, 0.0, kPi * r / 2.0},
          {false, {sw / 2.0, hh}, kPi, {}, 0.0, 0.0, sw},
          {true, {}, 0.0, {-sw / 2.0, hh - r}, r, kPi / 2.0, kPi * r / 2.0},
          {false, {-hw, sh / 2.0}, -kPi / 2.0, {}, 0.0, 0.0, sh},
          {true, {}, 0.0, {-sw / 2.0, -hh + r}, r, kPi, kPi * r / 2.0},
      };
      break;
    }
  }

  std::vector<Waypoint> wps;
  sample_loop(pieces, spec.spacing, wps);
  return Track(std::move(wps), spec.lane_half_width);
}

}  // namespace curla
