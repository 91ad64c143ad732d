#include "gridcross/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace gridcross {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_positive(double angle) {
  double a = std::fmod(angle, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

void push_unique(std::vector<Vec2>& out, Vec2 p, double tol) {
  for (const Vec2& q : out) {
    if (distance(p, q) <= tol) return;
  }
  out.push_back(p);
}

// Intersections of the infinite line through `from` with direction `dir`
// against a circle; tangency is reported once.
std::vector<Vec2> line_circle(Vec2 from, Vec2 dir, Vec2 center, double radius, double tol) {
  const double len = dir.norm();
  const Vec2 u = dir * (1.0 / len);
  const double t0 = (center - from).dot(u);
  const Vec2 foot = from + u * t0;
  const double h = distance(foot, center);
  if (h > radius + tol) return {};
  if (std::abs(h - radius) <= tol) return {foot};
  const double half = std::sqrt(radius * radius - h * h);
  return {foot - u * half, foot + u * half};
}

std::vector<Vec2> circle_circle(Vec2 c0, double r0, Vec2 c1, double r1, double tol) {
  const double d = distance(c0, c1);
  if (d < tol) return {};
  if (d > r0 + r1 + tol || d < std::abs(r0 - r1) - tol) return {};
  const Vec2 u = (c1 - c0) * (1.0 / d);
  const double a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
  const Vec2 mid = c0 + u * a;
  const double h2 = r0 * r0 - a * a;
  if (h2 <= tol * tol) return {mid};
  const double h = std::sqrt(h2);
  const Vec2 n{-u.y, u.x};
  return {mid + n * h, mid - n * h};
}

}  // namespace

Segment Segment::line(Vec2 from, Vec2 to, ElementKey key) {
  Segment s;
  s.kind_ = Kind::Line;
  s.key_ = key;
  s.from_ = from;
  s.to_ = to;
  s.length_ = distance(from, to);
  return s;
}

Segment Segment::arc(Vec2 center, double radius, double start_angle, double sweep,
                     ElementKey key) {
  Segment s;
  s.kind_ = Kind::Arc;
  s.key_ = key;
  s.center_ = center;
  s.radius_ = radius;
  s.start_angle_ = start_angle;
  s.sweep_ = sweep;
  s.length_ = radius * std::abs(sweep);
  return s;
}

Vec2 Segment::point_at(double s) const {
  if (kind_ == Kind::Line) {
    if (length_ == 0.0) return from_;
    const double t = s / length_;
    return from_ + (to_ - from_) * t;
  }
  const double theta = start_angle_ + std::copysign(s / radius_, sweep_);
  return {center_.x + radius_ * std::cos(theta), center_.y + radius_ * std::sin(theta)};
}

Vec2 Segment::tangent_at(double s) const {
  if (kind_ == Kind::Line) return (to_ - from_) * (1.0 / length_);
  const double theta = start_angle_ + std::copysign(s / radius_, sweep_);
  if (sweep_ > 0.0) return {-std::sin(theta), std::cos(theta)};
  return {std::sin(theta), -std::cos(theta)};
}

std::optional<double> Segment::project(Vec2 pt, double tol) const {
  double s = 0.0;
  if (kind_ == Kind::Line) {
    const Vec2 d = to_ - from_;
    s = length_ > 0.0 ? std::clamp((pt - from_).dot(d) / length_, 0.0, length_) : 0.0;
  } else {
    const double phi = std::atan2(pt.y - center_.y, pt.x - center_.x);
    const double offset = wrap_positive(sweep_ > 0.0 ? phi - start_angle_ : start_angle_ - phi);
    const double span = std::abs(sweep_);
    if (offset <= span) {
      s = offset * radius_;
    } else {
      // Outside the swept range: the nearer endpoint wins.
      s = distance(pt, start()) <= distance(pt, end()) ? 0.0 : length_;
    }
  }
  if (distance(pt, point_at(s)) <= tol) return s;
  return std::nullopt;
}

double Segment::distance_to(Vec2 pt) const {
  const double s = *project(pt, std::numeric_limits<double>::infinity());
  return distance(pt, point_at(s));
}

std::vector<Vec2> intersect(const Segment& a, const Segment& b, double tol) {
  std::vector<Vec2> candidates;
  using K = Segment::Kind;

  if (a.kind() == K::Line && b.kind() == K::Line) {
    const Vec2 d1 = a.to() - a.from();
    const Vec2 d2 = b.to() - b.from();
    const double denom = d1.cross(d2);
    if (std::abs(denom) <= 1e-12 * d1.norm() * d2.norm()) {
      // Parallel: only collinear overlaps share points.
      for (Vec2 p : {a.start(), a.end()}) candidates.push_back(p);
      for (Vec2 p : {b.start(), b.end()}) candidates.push_back(p);
    } else {
      const double t = (b.from() - a.from()).cross(d2) / denom;
      candidates.push_back(a.from() + d1 * t);
    }
  } else if (a.kind() == K::Arc && b.kind() == K::Arc) {
    if (distance(a.center(), b.center()) <= tol && std::abs(a.radius() - b.radius()) <= tol) {
      for (Vec2 p : {a.start(), a.end(), b.start(), b.end()}) candidates.push_back(p);
    } else {
      candidates = circle_circle(a.center(), a.radius(), b.center(), b.radius(), tol);
    }
  } else {
    const Segment& ln = a.kind() == K::Line ? a : b;
    const Segment& ar = a.kind() == K::Line ? b : a;
    candidates = line_circle(ln.from(), ln.to() - ln.from(), ar.center(), ar.radius(), tol);
  }

  std::vector<Vec2> out;
  const double accept = std::max(tol, 1e-7);
  for (Vec2 p : candidates) {
    if (a.project(p, accept) && b.project(p, accept)) push_unique(out, p, accept);
  }
  return out;
}

}  // namespace gridcross
