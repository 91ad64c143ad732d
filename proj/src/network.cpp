#include "gridcross/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "gridcross/error.hpp"

namespace gridcross {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kNudge = 1e-6;

Vec2 right_normal(Heading h) {
  const Vec2 d = direction(h);
  return {d.y, -d.x};
}

bool horizontal(Heading h) { return h == Heading::East || h == Heading::West; }

ElementKey lane_key(Heading h, int road) {
  return {ElementKey::Kind::Lane, static_cast<int>(h), road, 0};
}

ElementKey turn_key(int intersection, Heading h, Move m) {
  return {ElementKey::Kind::Turn, intersection, static_cast<int>(h), static_cast<int>(m)};
}

double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

}  // namespace

Vec2 direction(Heading h) {
  switch (h) {
    case Heading::East: return {1.0, 0.0};
    case Heading::North: return {0.0, 1.0};
    case Heading::West: return {-1.0, 0.0};
    case Heading::South: return {0.0, -1.0};
  }
  return {};
}

Heading turned(Heading h, Move m) {
  const int k = static_cast<int>(h);
  switch (m) {
    case Move::Straight: return h;
    case Move::Left: return static_cast<Heading>((k + 1) % 4);
    case Move::Right: return static_cast<Heading>((k + 3) % 4);
  }
  return h;
}

const char* to_string(Move m) {
  switch (m) {
    case Move::Straight: return "straight";
    case Move::Right: return "right";
    case Move::Left: return "left";
  }
  return "?";
}

void GridSpec::validate() const {
  if (rows < 1) throw InvalidConfiguration("network.rows", "must be >= 1");
  if (cols < 1) throw InvalidConfiguration("network.cols", "must be >= 1");
  if (!(lane_width > 0.0)) throw InvalidConfiguration("network.lane_width_m", "must be > 0");
  if (!(sector_unit > 0.0)) throw InvalidConfiguration("network.sector_unit_m", "must be > 0");
  if (stub_multiple < 1) throw InvalidConfiguration("network.stub_multiple", "must be >= 1");
  auto check = [](const std::vector<int>& m, int expected, const char* key) {
    if (!m.empty() && static_cast<int>(m.size()) != expected) {
      throw InvalidConfiguration(key, "expected " + std::to_string(expected) + " entries");
    }
    for (int v : m) {
      if (v < 1) throw InvalidConfiguration(key, "multiples must be >= 1");
    }
  };
  check(x_multiples, cols - 1, "network.x_multiples");
  check(y_multiples, rows - 1, "network.y_multiples");
  // Intersection boxes are 2 L_w wide; arcs and boxes must not overlap.
  const double box = 2.0 * lane_width;
  if (stub_multiple * sector_unit <= box) {
    throw InvalidConfiguration("network.stub_multiple", "boundary stub shorter than a road width");
  }
  auto check_gap = [&](const std::vector<int>& m, int gaps, const char* key) {
    for (int i = 0; i < gaps; ++i) {
      const int k = m.empty() ? 1 : m[static_cast<std::size_t>(i)];
      if (k * sector_unit <= 2.0 * box) throw InvalidConfiguration(key, "sector shorter than two road widths");
    }
  };
  check_gap(x_multiples, cols - 1, "network.x_multiples");
  check_gap(y_multiples, rows - 1, "network.y_multiples");
}

// ---------------------------------------------------------------------------
// Path

Path::Path(std::vector<Segment> segments, std::vector<Move> turns)
    : segments_(std::move(segments)), turns_(std::move(turns)) {
  offsets_.reserve(segments_.size());
  lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  hi_ = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Segment& seg : segments_) {
    offsets_.push_back(length_);
    length_ += seg.length();
    // Arc extremes are bounded by center +- radius.
    const Vec2 a = seg.kind() == Segment::Kind::Line ? seg.from() : seg.center() - Vec2{seg.radius(), seg.radius()};
    const Vec2 b = seg.kind() == Segment::Kind::Line ? seg.to() : seg.center() + Vec2{seg.radius(), seg.radius()};
    lo_ = {std::min({lo_.x, a.x, b.x}), std::min({lo_.y, a.y, b.y})};
    hi_ = {std::max({hi_.x, a.x, b.x}), std::max({hi_.y, a.y, b.y})};
  }
}

std::size_t Path::segment_at(double p) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), p);
  if (it == offsets_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
}

Vec2 Path::to_global(double p) const {
  if (!(p >= 0.0 && p <= length_) || segments_.empty()) {
    throw OutOfDomain("local coordinate " + std::to_string(p) + " outside [0, " +
                      std::to_string(length_) + "]");
  }
  const std::size_t i = segment_at(p);
  const Segment& seg = segments_[i];
  return seg.point_at(std::min(p - offsets_[i], seg.length()));
}

std::optional<double> Path::locate(Vec2 point, double tol) const {
  if (point.x < lo_.x - tol || point.x > hi_.x + tol || point.y < lo_.y - tol ||
      point.y > hi_.y + tol) {
    return std::nullopt;
  }
  std::optional<double> best;
  double best_dist = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    const auto s = seg.project(point, tol);
    if (!s) continue;
    const double d = distance(point, seg.point_at(*s));
    if (d < best_dist) {
      best_dist = d;
      best = offsets_[i] + *s;
    }
  }
  return best;
}

double Path::to_local(Vec2 point, double tol) const {
  if (auto s = locate(point, tol)) return *s;
  throw NotOnPath("point (" + std::to_string(point.x) + ", " + std::to_string(point.y) +
                  ") is not on the path");
}

std::optional<ElementKey> Path::key_before(double p) const {
  if (p <= kNudge || segments_.empty()) return std::nullopt;
  return segments_[segment_at(std::min(p, length_) - kNudge)].key();
}

std::optional<ElementKey> Path::key_after(double p) const {
  if (p >= length_ - kNudge || segments_.empty()) return std::nullopt;
  return segments_[segment_at(std::max(p, 0.0) + kNudge)].key();
}

// ---------------------------------------------------------------------------
// RoadNetwork

RoadNetwork RoadNetwork::build_grid(const GridSpec& spec) {
  spec.validate();
  RoadNetwork net;
  net.spec_ = spec;
  const double stub = spec.stub_multiple * spec.sector_unit;
  auto axis = [&](int count, const std::vector<int>& multiples, std::vector<double>& out) {
    double at = stub;
    for (int i = 0; i < count; ++i) {
      out.push_back(at);
      if (i + 1 < count) {
        const int m = multiples.empty() ? 1 : multiples[static_cast<std::size_t>(i)];
        at += m * spec.sector_unit;
      }
    }
    return at + stub;
  };
  net.width_ = axis(spec.cols, spec.x_multiples, net.road_x_);
  net.height_ = axis(spec.rows, spec.y_multiples, net.road_y_);

  // Entry ids: East rows, West rows, North cols, South cols. Exits likewise.
  for (Heading h : {Heading::East, Heading::West, Heading::North, Heading::South}) {
    const int count = horizontal(h) ? spec.rows : spec.cols;
    for (int road = 0; road < count; ++road) {
      const double lane = net.lane_coordinate(h, road);
      Vec2 in, out;
      switch (h) {
        case Heading::East: in = {0.0, lane}; out = {net.width_, lane}; break;
        case Heading::West: in = {net.width_, lane}; out = {0.0, lane}; break;
        case Heading::North: in = {lane, 0.0}; out = {lane, net.height_}; break;
        case Heading::South: in = {lane, net.height_}; out = {lane, 0.0}; break;
      }
      net.entries_.push_back({static_cast<int>(net.entries_.size()), h, road, in});
      net.exits_.push_back({static_cast<int>(net.exits_.size()), h, road, out});
    }
  }
  return net;
}

double RoadNetwork::lane_coordinate(Heading h, int road) const {
  const double half = spec_.lane_width / 2.0;
  switch (h) {
    case Heading::East: return road_y(road) - half;
    case Heading::West: return road_y(road) + half;
    case Heading::North: return road_x(road) + half;
    case Heading::South: return road_x(road) - half;
  }
  return 0.0;
}

int RoadNetwork::entry_id(Heading h, int road) const {
  for (const Port& p : entries_) {
    if (p.heading == h && p.road == road) return p.id;
  }
  throw OutOfDomain("no entry port for road " + std::to_string(road));
}

int RoadNetwork::exit_id(Heading h, int road) const {
  for (const Port& p : exits_) {
    if (p.heading == h && p.road == road) return p.id;
  }
  throw OutOfDomain("no exit port for road " + std::to_string(road));
}

bool RoadNetwork::is_u_turn(int entry, int exit) const {
  const Port& in = entries_.at(static_cast<std::size_t>(entry));
  const Port& out = exits_.at(static_cast<std::size_t>(exit));
  return out.road == in.road && out.heading == turned(turned(in.heading, Move::Left), Move::Left);
}

namespace {

struct Approach {
  int col = 0;
  int row = 0;
  Heading heading = Heading::East;
};

Approach first_approach(const RoadNetwork& net, const Port& in) {
  switch (in.heading) {
    case Heading::East: return {0, in.road, in.heading};
    case Heading::West: return {net.cols() - 1, in.road, in.heading};
    case Heading::North: return {in.road, 0, in.heading};
    case Heading::South: return {in.road, net.rows() - 1, in.heading};
  }
  return {};
}

// Next approach after leaving (col,row) with heading h, or nullopt on exit.
std::optional<Approach> advance(const RoadNetwork& net, int col, int row, Heading h) {
  const Vec2 d = direction(h);
  const int c = col + static_cast<int>(d.x);
  const int r = row + static_cast<int>(d.y);
  if (c < 0 || r < 0 || c >= net.cols() || r >= net.rows()) return std::nullopt;
  return Approach{c, r, h};
}

}  // namespace

Path RoadNetwork::make_path(const Route& route) const {
  const Port& in = entries_.at(static_cast<std::size_t>(route.entry));
  const double lw = spec_.lane_width;
  std::vector<Segment> segs;
  std::vector<Move> turns;
  auto add_line = [&](Vec2 from, Vec2 to, ElementKey key) {
    if (!segs.empty() && segs.back().kind() == Segment::Kind::Line && segs.back().key() == key) {
      from = segs.back().from();
      segs.pop_back();
    }
    segs.push_back(Segment::line(from, to, key));
  };

  Approach at = first_approach(*this, in);
  Vec2 cur = in.point;
  for (Move m : route.moves) {
    const Vec2 center{road_x(at.col), road_y(at.row)};
    const Vec2 dir = direction(at.heading);
    const Vec2 rn = right_normal(at.heading);
    const int road = horizontal(at.heading) ? at.row : at.col;
    const int node = at.row * cols() + at.col;
    const Vec2 box_in = center + rn * (lw / 2.0) - dir * lw;
    add_line(cur, box_in, lane_key(at.heading, road));

    const Heading next = turned(at.heading, m);
    if (m == Move::Straight) {
      const Vec2 box_out = center + rn * (lw / 2.0) + dir * lw;
      add_line(box_in, box_out, lane_key(at.heading, road));
      cur = box_out;
    } else {
      const bool right = m == Move::Right;
      const Vec2 pivot = center - dir * lw + (right ? rn * lw : rn * -lw);
      const double radius = right ? lw / 2.0 : 1.5 * lw;
      const double sweep = right ? -kHalfPi : kHalfPi;
      Segment arc = Segment::arc(pivot, radius, angle_of(box_in - pivot), sweep,
                                 turn_key(node, at.heading, m));
      cur = arc.end();
      segs.push_back(arc);
    }
    turns.push_back(m);
    const auto nxt = advance(*this, at.col, at.row, next);
    if (!nxt) {
      const int exit_road = horizontal(next) ? at.row : at.col;
      const Port& out = exits_.at(static_cast<std::size_t>(exit_id(next, exit_road)));
      add_line(cur, out.point, lane_key(next, exit_road));
      return Path(std::move(segs), std::move(turns));
    }
    at = *nxt;
  }
  throw OutOfDomain("route ends inside the network");
}

std::vector<Route> RoadNetwork::shortest_routes(int entry, int exit, bool allow_left,
                                                std::size_t cap) const {
  const Port& in = entries_.at(static_cast<std::size_t>(entry));
  const Port& target = exits_.at(static_cast<std::size_t>(exit));
  const int n_states = rows() * cols() * 4;
  auto index = [&](const Approach& a) {
    return (a.row * cols() + a.col) * 4 + static_cast<int>(a.heading);
  };
  std::vector<Move> moves{Move::Straight, Move::Right};
  if (allow_left) moves.push_back(Move::Left);

  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  // Hops-to-target per approach state, relaxed to a fixed point.
  std::vector<int> dist(static_cast<std::size_t>(n_states), kInf);
  auto hops_after = [&](const Approach& a, Move m) {
    const Heading h = turned(a.heading, m);
    const auto nxt = advance(*this, a.col, a.row, h);
    if (!nxt) {
      const int road = horizontal(h) ? a.row : a.col;
      return (h == target.heading && road == target.road) ? 1 : kInf;
    }
    const int d = dist[static_cast<std::size_t>(index(*nxt))];
    return d >= kInf ? kInf : d + 1;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (int r = 0; r < rows(); ++r) {
      for (int c = 0; c < cols(); ++c) {
        for (int k = 0; k < 4; ++k) {
          const Approach a{c, r, static_cast<Heading>(k)};
          int best = kInf;
          for (Move m : moves) best = std::min(best, hops_after(a, m));
          int& d = dist[static_cast<std::size_t>(index(a))];
          if (best < d) {
            d = best;
            changed = true;
          }
        }
      }
    }
  }

  std::vector<Route> routes;
  const Approach start = first_approach(*this, in);
  if (dist[static_cast<std::size_t>(index(start))] >= kInf) return routes;

  std::vector<char> visited(static_cast<std::size_t>(rows() * cols()), 0);
  std::vector<Move> trail;
  std::function<void(const Approach&)> dfs = [&](const Approach& a) {
    if (routes.size() >= cap) return;
    const int node = a.row * cols() + a.col;
    if (visited[static_cast<std::size_t>(node)]) return;
    visited[static_cast<std::size_t>(node)] = 1;
    const int here = dist[static_cast<std::size_t>(index(a))];
    for (Move m : moves) {
      if (hops_after(a, m) != here) continue;
      trail.push_back(m);
      const Heading h = turned(a.heading, m);
      if (auto nxt = advance(*this, a.col, a.row, h)) {
        dfs(*nxt);
      } else {
        routes.push_back({entry, exit, trail});
      }
      trail.pop_back();
    }
    visited[static_cast<std::size_t>(node)] = 0;
  };
  dfs(start);
  return routes;
}

// ---------------------------------------------------------------------------
// Collision points

CollisionPointRegistry::CollisionPointRegistry(std::vector<CollisionPoint> points,
                                               std::size_t path_count)
    : points_(std::move(points)), along_(path_count) {
  for (std::size_t id = 0; id < points_.size(); ++id) {
    for (const PathCoordinate& pc : points_[id].on_paths) {
      along_.at(static_cast<std::size_t>(pc.path))
          .push_back({static_cast<int>(id), pc.s, pc.before, pc.after, points_[id].cluster});
    }
  }
  for (auto& hits : along_) {
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.s < b.s || (a.s == b.s && a.point < b.point);
    });
  }
}

namespace {

/// Distance from a point to the part of `path` within `window` of arc length `around`.
double distance_near(const Path& path, double around, double window, Vec2 pt) {
  double best = std::numeric_limits<double>::infinity();
  const auto& segs = path.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double lo = path.offsets()[i];
    if (lo > around + window || lo + segs[i].length() < around - window) continue;
    best = std::min(best, segs[i].distance_to(pt));
  }
  return best;
}

struct LocalShape {
  std::optional<ElementKey> before, after;
  bool operator==(const LocalShape&) const = default;
};

}  // namespace

void CollisionPointRegistry::assign_zones(std::span<const Path> paths, double clearance) {
  constexpr double kStep = 0.05;
  const double reach = 4.0 * clearance + 10.0;
  for (CollisionPoint& cp : points_) {
    // Paths through the point grouped by their local shape.
    std::vector<LocalShape> shapes;
    std::vector<std::size_t> rep, shape_of(cp.on_paths.size());
    for (std::size_t k = 0; k < cp.on_paths.size(); ++k) {
      const Path& path = paths[static_cast<std::size_t>(cp.on_paths[k].path)];
      const double s = cp.on_paths[k].s;
      LocalShape shape{path.key_before(s), path.key_after(s)};
      auto it = std::find(shapes.begin(), shapes.end(), shape);
      if (it == shapes.end()) {
        shapes.push_back(shape);
        rep.push_back(k);
        it = shapes.end() - 1;
      }
      shape_of[k] = static_cast<std::size_t>(it - shapes.begin());
    }
    std::vector<double> before(shapes.size(), 0.0), after(shapes.size(), 0.0);
    for (std::size_t a = 0; a < shapes.size(); ++a) {
      const PathCoordinate& pa = cp.on_paths[rep[a]];
      const Path& path_a = paths[static_cast<std::size_t>(pa.path)];
      for (std::size_t b = 0; b < shapes.size(); ++b) {
        if (a == b) continue;
        const PathCoordinate& pb = cp.on_paths[rep[b]];
        const Path& path_b = paths[static_cast<std::size_t>(pb.path)];
        auto close = [&](double s) {
          return distance_near(path_b, pb.s, reach, path_a.to_global(s)) < clearance;
        };
        const bool shared_before = shapes[a].before && shapes[a].before == shapes[b].before;
        const bool shared_after = shapes[a].after && shapes[a].after == shapes[b].after;
        if (!shared_before) {
          double d = 0.0;
          while (d < reach && pa.s - d - kStep >= 0.0 && close(pa.s - d - kStep)) d += kStep;
          before[a] = std::max(before[a], d + kStep);
        }
        if (!shared_after) {
          double d = 0.0;
          while (d < reach && pa.s + d + kStep <= path_a.length() && close(pa.s + d + kStep)) d += kStep;
          after[a] = std::max(after[a], d + kStep);
        }
      }
    }
    for (std::size_t k = 0; k < cp.on_paths.size(); ++k) {
      cp.on_paths[k].before = before[shape_of[k]];
      cp.on_paths[k].after = after[shape_of[k]];
    }
  }
  *this = CollisionPointRegistry(std::move(points_), along_.size());
}

void CollisionPointRegistry::assign_clusters(const RoadNetwork& net) {
  for (CollisionPoint& cp : points_) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < net.rows(); ++r) {
      for (int c = 0; c < net.cols(); ++c) {
        const double d = distance(cp.where, {net.road_x(c), net.road_y(r)});
        if (d < best) {
          best = d;
          cp.cluster = r * net.cols() + c;
        }
      }
    }
  }
  *this = CollisionPointRegistry(std::move(points_), along_.size());
}

std::optional<double> CollisionPointRegistry::coordinate(int point, int path) const {
  for (const PathCoordinate& pc : points_.at(static_cast<std::size_t>(point)).on_paths) {
    if (pc.path == path) return pc.s;
  }
  return std::nullopt;
}

void CollisionPointRegistry::write_csv(std::ostream& os) const {
  os << "h_x,h_y,path_ids,local_coords\n";
  char buf[64];
  for (const CollisionPoint& cp : points_) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,", cp.where.x, cp.where.y);
    os << buf;
    for (std::size_t i = 0; i < cp.on_paths.size(); ++i) {
      os << (i ? " " : "") << cp.on_paths[i].path;
    }
    os << ',';
    for (std::size_t i = 0; i < cp.on_paths.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.6f", i ? " " : "", cp.on_paths[i].s);
      os << buf;
    }
    os << '\n';
  }
}

namespace {

// A shared point is a conflict when the two paths cross there or join
// there from different elements. Shared stretches and forks are left to
// frontal-vehicle handling.
bool is_conflict(const Path& a, double sa, const Path& b, double sb) {
  const auto fa = a.key_after(sa), fb = b.key_after(sb);
  const auto ba = a.key_before(sa), bb = b.key_before(sb);
  const bool same_forward = fa && fb && *fa == *fb;
  const bool same_backward = ba && bb && *ba == *bb;
  if (!same_forward && !same_backward) return true;
  return same_forward && !same_backward && ba && bb;
}

struct Box {
  Vec2 lo, hi;
};

Box bounds(const Segment& s) {
  if (s.kind() == Segment::Kind::Line) {
    return {{std::min(s.from().x, s.to().x), std::min(s.from().y, s.to().y)},
            {std::max(s.from().x, s.to().x), std::max(s.from().y, s.to().y)}};
  }
  const Vec2 r{s.radius(), s.radius()};
  return {s.center() - r, s.center() + r};
}

bool overlaps(const Box& a, const Box& b, double tol) {
  return a.lo.x <= b.hi.x + tol && b.lo.x <= a.hi.x + tol && a.lo.y <= b.hi.y + tol &&
         b.lo.y <= a.hi.y + tol;
}

}  // namespace

CollisionPointRegistry collision_points(std::span<const Path> paths, double merge_tol) {
  std::vector<Vec2> found;
  auto add = [&](Vec2 p) {
    for (const Vec2& q : found) {
      if (distance(p, q) <= merge_tol) return;
    }
    found.push_back(p);
  };

  std::vector<std::vector<Box>> boxes(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (const Segment& s : paths[i].segments()) boxes[i].push_back(bounds(s));
  }

  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      const Path& a = paths[i];
      const Path& b = paths[j];
      for (std::size_t si = 0; si < a.segments().size(); ++si) {
        for (std::size_t sj = 0; sj < b.segments().size(); ++sj) {
          if (!overlaps(boxes[i][si], boxes[j][sj], 1e-6)) continue;
          for (Vec2 p : intersect(a.segments()[si], b.segments()[sj])) {
            const auto sa = a.locate(p, 1e-6);
            const auto sb = b.locate(p, 1e-6);
            if (sa && sb && is_conflict(a, *sa, b, *sb)) add(p);
          }
        }
      }
    }
  }

  std::vector<CollisionPoint> points;
  for (Vec2 p : found) {
    CollisionPoint cp{p, -1, {}};
    for (std::size_t k = 0; k < paths.size(); ++k) {
      if (auto s = paths[k].locate(p, kSnapTolerance)) {
        cp.on_paths.push_back({static_cast<int>(k), *s});
      }
    }
    if (cp.on_paths.size() >= 2) points.push_back(std::move(cp));
  }
  return CollisionPointRegistry(std::move(points), paths.size());
}

std::vector<CollisionPointRegistry::Hit> pending_points(const CollisionPointRegistry& registry,
                                                        int path, double p) {
  std::vector<CollisionPointRegistry::Hit> out;
  for (const auto& hit : registry.along(path)) {
    if (hit.s > p) out.push_back(hit);
  }
  return out;
}

std::vector<int> contenders(const CollisionPointRegistry& registry, int point,
                            std::span<const PathPosition> vehicles) {
  std::vector<int> out;
  for (const PathPosition& v : vehicles) {
    const auto s = registry.coordinate(point, v.path);
    if (s && *s > v.p) out.push_back(v.vehicle);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> frontal_set(std::size_t index, std::span<const PathPosition> vehicles,
                             std::span<const Path> paths, double tol) {
  const PathPosition& me = vehicles[index];
  const Path& own = paths[static_cast<std::size_t>(me.path)];
  std::vector<int> out;
  for (std::size_t j = 0; j < vehicles.size(); ++j) {
    if (j == index) continue;
    const PathPosition& other = vehicles[j];
    const Vec2 g = paths[static_cast<std::size_t>(other.path)].to_global(other.p);
    const auto s = own.locate(g, tol);
    if (s && *s > me.p) out.push_back(other.vehicle);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gridcross
