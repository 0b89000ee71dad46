#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <cmath>

#include "curla/rng.hpp"
#include "curla/track.hpp"

using namespace curla;

namespace {

TrackSpec circle_spec(double radius, double spacing = 1.0) {
  TrackSpec spec;
  spec.shape = TrackShape::Circle;
  spec.radius = radius;
  spec.spacing = spacing;
  return spec;
}

// Independent oracle: nearest point by dense sampling of the centerline.
double brute_force_lateral_offset(const Track& track, const Vec2& point) {
  double best = std::numeric_limits<double>::infinity();
  const double step = 0.001;
  for (double s = 0.0; s < track.total_length(); s += step) {
    const Vec2 c = track.position_at(s);
    best = std::min(best, (point - c).norm());
  }
  return best;
}

}  // namespace

TEST_CASE("circle track length matches circumference") {
  const Track track = build_track(circle_spec(50.0));
  CHECK(track.total_length() ==
        doctest::Approx(2.0 * kPi * 50.0).epsilon(0.001));
}

TEST_CASE("oval track length matches perimeter formula") {
  TrackSpec spec;
  spec.shape = TrackShape::Oval;
  spec.straight_length = 100.0;
  spec.end_radius = 20.0;
  const Track track = build_track(spec);
  CHECK(track.total_length() ==
        doctest::Approx(200.0 + 2.0 * kPi * 20.0).epsilon(0.001));
}

TEST_CASE("rounded rectangle length matches perimeter formula") {
  TrackSpec spec;
  spec.shape = TrackShape::RoundedRectangle;
  spec.rect_width = 120.0;
  spec.rect_height = 60.0;
  spec.corner_radius = 15.0;
  const Track track = build_track(spec);
  const double expected = 2.0 * (120.0 - 30.0) + 2.0 * (60.0 - 30.0) +
                          2.0 * kPi * 15.0;
  CHECK(track.total_length() == doctest::Approx(expected).epsilon(0.001));
}

TEST_CASE("build_track rejects bad specs") {
  CHECK_THROWS_AS(build_track(circle_spec(50.0, 5.0)), std::invalid_argument);
  CHECK_THROWS_AS(build_track(circle_spec(-1.0)), std::invalid_argument);
  TrackSpec rect;
  rect.shape = TrackShape::RoundedRectangle;
  rect.rect_width = 20.0;
  rect.rect_height = 20.0;
  rect.corner_radius = 15.0;
  CHECK_THROWS_AS(build_track(rect), std::invalid_argument);
}

TEST_CASE("track invariants hold after construction") {
  const Track track = build_track(circle_spec(50.0));
  const auto& wps = track.waypoints();
  for (std::size_t i = 1; i < wps.size(); ++i)
    CHECK(wps[i].arc_length_s > wps[i - 1].arc_length_s);
  const double seam = (wps.back().position - wps.front().position).norm();
  CHECK(seam <= 2.0);
}

TEST_CASE("projection on the centerline is zero offset") {
  const Track track = build_track(circle_spec(50.0));
  const TrackProjection proj = track.project(track.position_at(37.25));
  CHECK(proj.lateral_offset <= 1e-9);
}

TEST_CASE("projection offset matches brute-force oracle") {
  const Track track = build_track(circle_spec(50.0));
  // Point 1.5 m radially outward from the centerline.
  const double theta = 0.7;
  const Vec2 point{51.5 * std::cos(theta), 51.5 * std::sin(theta)};
  const TrackProjection proj = track.project(point);
  CHECK(proj.lateral_offset == doctest::Approx(1.5).epsilon(0.01));
  CHECK(proj.lateral_offset ==
        doctest::Approx(brute_force_lateral_offset(track, point)).epsilon(1e-4));
}

TEST_CASE("projection at the track origin returns s = 0") {
  const Track track = build_track(circle_spec(50.0));
  const TrackProjection proj = track.project(track.waypoints().front().position);
  CHECK(proj.nearest_s == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("normal-displacement property: offset recovers |n| within 1 cm") {
  const Track track = build_track(circle_spec(50.0));
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.uniform(0.0, track.total_length());
    const double n = rng.uniform(-5.0, 5.0);
    const Vec2 base = track.position_at(s);
    const Vec2 point = base + left_normal(track.heading_at(s)) * n;
    const TrackProjection proj = track.project(point);
    CHECK(std::abs(proj.lateral_offset - std::abs(n)) <= 0.01);
    if (std::abs(n) > 0.05) {
      CHECK(proj.signed_lateral_offset * n > 0.0);  // sign convention: left positive
    }
  }
}

TEST_CASE("projection is idempotent") {
  const Track track = build_track(circle_spec(50.0));
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec2 point{rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0)};
    const TrackProjection proj = track.project(point);
    CHECK(track.project(proj.nearest_point).lateral_offset <= 1e-6);
  }
}

TEST_CASE("heading_error wraps into (-pi, pi]") {
  TrackProjection proj;
  proj.tangent_heading = 0.4;
  CHECK(heading_error(proj, 0.4) == doctest::Approx(0.0));
  CHECK(heading_error(proj, 0.4 + kPi / 9.0) == doctest::Approx(kPi / 9.0));
  CHECK(heading_error(proj, 0.4 - 2.0 * kPi + 0.1) == doctest::Approx(0.1));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    proj.tangent_heading = rng.uniform(-kPi, kPi);
    const double alpha = heading_error(proj, rng.uniform(-20.0, 20.0));
    CHECK(alpha > -kPi);
    CHECK(alpha <= kPi);
  }
}

TEST_CASE("lap_progress is linear and rejects negatives") {
  const Track track = build_track(circle_spec(50.0));
  const double length = track.total_length();
  CHECK(track.lap_progress(0.0) == 0.0);
  CHECK(track.lap_progress(length) == doctest::Approx(1.0));
  CHECK(track.lap_progress(1.5 * length) == doctest::Approx(1.5));
  CHECK_THROWS_AS(track.lap_progress(-1.0), std::invalid_argument);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const double a = rng.uniform(0.0, 5.0 * length);
    const double b = rng.uniform(0.0, 5.0 * length);
    CHECK(track.lap_progress(a + b) ==
          doctest::Approx(track.lap_progress(a) + track.lap_progress(b)));
  }
}
