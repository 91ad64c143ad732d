#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace gridcross {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

/// Euclidean distance between two global points.
inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Identifies the physical lane element a segment lies on. Two segments with
/// equal keys are subsets of the same straight lane line or the same turn arc.
struct ElementKey {
  enum class Kind { Lane, Turn } kind = Kind::Lane;
  int a = 0;
  int b = 0;
  int c = 0;
  bool operator==(const ElementKey&) const = default;
};

/// Straight line or circular arc, parameterized by arc length from its start.
class Segment {
 public:
  enum class Kind { Line, Arc };

  static Segment line(Vec2 from, Vec2 to, ElementKey key);
  /// `sweep` is signed: positive is counter-clockwise.
  static Segment arc(Vec2 center, double radius, double start_angle, double sweep, ElementKey key);

  Kind kind() const { return kind_; }
  const ElementKey& key() const { return key_; }
  double length() const { return length_; }

  Vec2 start() const { return point_at(0.0); }
  Vec2 end() const { return point_at(length_); }
  Vec2 point_at(double s) const;
  /// Unit tangent in the direction of travel.
  Vec2 tangent_at(double s) const;

  /// Arc-length coordinate of the closest point when it lies within `tol`
  /// of the segment, else nullopt.
  std::optional<double> project(Vec2 pt, double tol) const;
  double distance_to(Vec2 pt) const;

  // Line data
  Vec2 from() const { return from_; }
  Vec2 to() const { return to_; }
  // Arc data
  Vec2 center() const { return center_; }
  double radius() const { return radius_; }
  double start_angle() const { return start_angle_; }
  double sweep() const { return sweep_; }

 private:
  Kind kind_ = Kind::Line;
  ElementKey key_{};
  Vec2 from_{}, to_{};
  Vec2 center_{};
  double radius_ = 0.0;
  double start_angle_ = 0.0;
  double sweep_ = 0.0;
  double length_ = 0.0;
};

/// Points common to both segments. Collinear lines and coincident arcs
/// report the endpoints of their overlap.
std::vector<Vec2> intersect(const Segment& a, const Segment& b, double tol = 1e-9);

}  // namespace gridcross
