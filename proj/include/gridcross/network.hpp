#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gridcross/geometry.hpp"

namespace gridcross {

/// Crossings closer than this are one collision point.
inline constexpr double kMergeTolerance = 0.1;
/// Lateral distance within which a global point counts as lying on a path.
inline constexpr double kSnapTolerance = 0.1;

enum class Heading : int { East = 0, North = 1, West = 2, South = 3 };
enum class Move : int { Straight = 0, Right = 1, Left = 2 };

Vec2 direction(Heading h);
Heading turned(Heading h, Move m);
const char* to_string(Move m);

/// Manhattan grid description. Spacings are integer multiples of the sector unit.
struct GridSpec {
  int rows = 2;                  ///< horizontal roads
  int cols = 2;                  ///< vertical roads
  double lane_width = 3.5;       ///< L_w [m]
  double sector_unit = 30.0;     ///< D_w [m]
  std::vector<int> x_multiples;  ///< gaps between vertical roads, size cols-1 (empty: all 1)
  std::vector<int> y_multiples;  ///< gaps between horizontal roads, size rows-1 (empty: all 1)
  int stub_multiple = 1;         ///< boundary-to-first-intersection length

  void validate() const;
};

/// Boundary road end. `heading` is the travel direction through the port.
struct Port {
  int id = 0;
  Heading heading = Heading::East;
  int road = 0;  ///< row index for East/West, column index for North/South
  Vec2 point;
};

/// Sequence of moves taken at each intersection met from an entry port.
struct Route {
  int entry = 0;
  int exit = 0;
  std::vector<Move> moves;
  bool operator==(const Route&) const = default;
};

/// Arc-length parameterized vehicle path with local/global maps.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<Segment> segments, std::vector<Move> turns = {});

  double length() const { return length_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<Move>& turns() const { return turns_; }
  /// Cumulative arc length at the start of each segment.
  const std::vector<double>& offsets() const { return offsets_; }

  /// Local-to-global map. Throws OutOfDomain outside [0, length].
  Vec2 to_global(double p) const;
  /// Global-to-local map. Throws NotOnPath when the point is farther than `tol`.
  double to_local(Vec2 point, double tol = kSnapTolerance) const;
  /// Non-throwing membership test; returns the local coordinate when on path.
  std::optional<double> locate(Vec2 point, double tol = kSnapTolerance) const;

  std::size_t segment_at(double p) const;
  /// Lane element just before / after `p`, if any.
  std::optional<ElementKey> key_before(double p) const;
  std::optional<ElementKey> key_after(double p) const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> offsets_;
  std::vector<Move> turns_;
  double length_ = 0.0;
  Vec2 lo_, hi_;
};

class RoadNetwork {
 public:
  /// Throws InvalidConfiguration on non-positive dimensions.
  static RoadNetwork build_grid(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int rows() const { return spec_.rows; }
  int cols() const { return spec_.cols; }
  int intersection_count() const { return spec_.rows * spec_.cols; }
  double lane_width() const { return spec_.lane_width; }
  double road_x(int col) const { return road_x_.at(static_cast<std::size_t>(col)); }
  double road_y(int row) const { return road_y_.at(static_cast<std::size_t>(row)); }
  double width() const { return width_; }
  double height() const { return height_; }

  /// Lane centerline offset (signed) of travel heading `h` on road `road`.
  /// For East/West this is a y coordinate, for North/South an x coordinate.
  double lane_coordinate(Heading h, int road) const;

  const std::vector<Port>& entries() const { return entries_; }
  const std::vector<Port>& exits() const { return exits_; }
  int entry_id(Heading h, int road) const;
  int exit_id(Heading h, int road) const;
  /// True when the exit is the entry's own road end.
  bool is_u_turn(int entry, int exit) const;

  /// Geometry of a route: lines along lane centerlines, quarter arcs for turns.
  Path make_path(const Route& route) const;

  /// All minimum-hop routes between two ports that never revisit an
  /// intersection, optionally without left turns. Empty when unreachable.
  std::vector<Route> shortest_routes(int entry, int exit, bool allow_left,
                                     std::size_t cap = 4096) const;

 private:
  GridSpec spec_;
  std::vector<double> road_x_, road_y_;
  double width_ = 0.0, height_ = 0.0;
  std::vector<Port> entries_, exits_;
};

/// Where one path passes a collision point.
struct PathCoordinate {
  int path = 0;
  double s = 0.0;
  /// Conflict zone around the point: the path stays within the clearance
  /// of another path through the point on [s - before, s + after].
  double before = 0.0;
  double after = 0.0;
};

struct CollisionPoint {
  Vec2 where;
  int cluster = -1;  ///< intersection the point belongs to
  std::vector<PathCoordinate> on_paths;  ///< ascending path id
};

/// Registry of collision points: transversal crossings and merge entries.
class CollisionPointRegistry {
 public:
  struct Hit {
    int point = 0;
    double s = 0.0;
    double before = 0.0;
    double after = 0.0;
    int cluster = -1;
  };

  CollisionPointRegistry() = default;
  CollisionPointRegistry(std::vector<CollisionPoint> points, std::size_t path_count);

  const std::vector<CollisionPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  /// Collision points on a path ordered by increasing local coordinate.
  const std::vector<Hit>& along(int path) const { return along_.at(static_cast<std::size_t>(path)); }
  /// Local coordinate of a point on a path, if the path passes it.
  std::optional<double> coordinate(int point, int path) const;

  /// Measures the conflict zone of every (point, path) pair: how far before
  /// and after the point the path comes closer than `clearance` to another
  /// path through it. Portions shared with the other path are excluded.
  void assign_zones(std::span<const Path> paths, double clearance);

  /// Tags every point with the index of the nearest intersection of `net`.
  void assign_clusters(const RoadNetwork& net);

  /// Columns: h_x,h_y,path_ids,local_coords (lists space-separated).
  void write_csv(std::ostream& os) const;

 private:
  std::vector<CollisionPoint> points_;
  std::vector<std::vector<Hit>> along_;
};

CollisionPointRegistry collision_points(std::span<const Path> paths,
                                        double merge_tol = kMergeTolerance);

/// A vehicle's position along its own path.
struct PathPosition {
  int vehicle = 0;
  int path = 0;
  double p = 0.0;
};

/// Collision points still ahead of local coordinate `p` on `path`.
std::vector<CollisionPointRegistry::Hit> pending_points(const CollisionPointRegistry& registry,
                                                        int path, double p);

/// Vehicles that have yet to cross `point`, ascending id.
std::vector<int> contenders(const CollisionPointRegistry& registry, int point,
                            std::span<const PathPosition> vehicles);

/// Vehicles located on the path of `vehicles[index]` and ahead of it, ascending id.
std::vector<int> frontal_set(std::size_t index, std::span<const PathPosition> vehicles,
                             std::span<const Path> paths, double tol = kSnapTolerance);

}  // namespace gridcross
