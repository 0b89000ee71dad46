#pragma once
#include <cmath>

namespace curla {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
  double norm2() const { return x * x + y * y; }
};

inline Vec2 heading_vec(double heading) {
  return {std::cos(heading), std::sin(heading)};
}

// Left-pointing normal of a heading direction.
inline Vec2 left_normal(double heading) {
  return {-std::sin(heading), std::cos(heading)};
}

// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a > kPi) a -= 2.0 * kPi;
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

inline constexpr double kKmhPerMps = 3.6;
inline double kmh_to_mps(double v) { return v / kKmhPerMps; }
inline double mps_to_kmh(double v) { return v * kKmhPerMps; }

}  // namespace curla
