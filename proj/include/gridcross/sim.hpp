#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "gridcross/config.hpp"
#include "gridcross/dynamics.hpp"
#include "gridcross/network.hpp"
#include "gridcross/trace_io.hpp"

namespace gridcross {

/// All routes vehicles may be assigned, their paths, and the collision points among them.
struct RouteCatalog {
  std::vector<Route> routes;
  std::vector<Path> paths;  ///< paths[i] belongs to routes[i]
  /// Candidate route indices per (entry, requested exit); index entry * exits + exit.
  std::vector<std::vector<int>> options;
  /// Exit actually served per (entry, requested exit); differs when rerouted.
  std::vector<int> served_exit;
  CollisionPointRegistry registry;
  int exit_count = 0;

  /// `clearance` sizes the conflict zones around collision points.
  static RouteCatalog build(const RoadNetwork& net, bool allow_left, double clearance);
  const std::vector<int>& candidates(int entry, int exit) const;
  bool rerouted(int entry, int exit) const;
  double mean_length() const;
};

struct Vehicle {
  int id = 0;
  int route = 0;
  VehicleState state;
  VehicleParams params;
  double last_input = 0.0;
};

struct RunStats {
  long ticks = 0;
  int injected = 0;
  int completed = 0;
  int reroutes = 0;
  int infeasible = 0;
  int dropped_rows = 0;
  int deadlock_warnings = 0;
  int safety_violations = 0;
  int max_auction_iterations = 0;
  bool incomplete = false;
};

struct RunResult {
  Trace trace;
  RunStats stats;
};

class World {
 public:
  explicit World(SimConfig config);

  const SimConfig& config() const { return config_; }
  const RoadNetwork& network() const { return network_; }
  const RouteCatalog& catalog() const { return catalog_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const Trace& trace() const { return trace_; }
  const RunStats& stats() const { return stats_; }
  long tick() const { return tick_; }

  /// Places a vehicle directly, bypassing injection. Returns its id.
  int add_vehicle(int route, VehicleState state, double v_ref);

  /// One tick of the pipeline: sets, auctions, control, dynamics, removal,
  /// injection, logging.
  void step();

  /// JSON-lines sink receiving one record per solved controller problem.
  void set_qp_dump(std::ostream* os) { qp_dump_ = os; }

  /// Priority sets of the most recent tick, by vehicle order.
  const std::vector<std::vector<int>>& last_priority() const { return last_priority_; }
  /// (vehicle id, point) pairs each vehicle yielded to at the most recent tick.
  const std::vector<std::vector<std::pair<int, int>>>& last_precedence() const { return last_precedence_; }
  const std::vector<std::vector<int>>& last_frontal() const { return last_frontal_; }

 private:
  void inject();
  bool entry_clear(int entry, double v_ref) const;

  SimConfig config_;
  RoadNetwork network_;
  RouteCatalog catalog_;
  std::mt19937_64 rng_;
  std::vector<Vehicle> vehicles_;
  std::vector<std::vector<std::string>> pending_events_;  ///< parallel to vehicles_
  std::vector<std::vector<int>> last_priority_;
  std::vector<std::vector<std::pair<int, int>>> last_precedence_;
  std::vector<std::vector<int>> last_frontal_;
  Trace trace_;
  RunStats stats_;
  long tick_ = 0;
  int next_id_ = 1;
  std::ostream* qp_dump_ = nullptr;
};

/// Automatic tick cap: 40 * target * mean path length / (slowest injection speed * T_s).
long default_tick_cap(const SimConfig& config, const RouteCatalog& catalog);

/// Runs until the completed-vehicle target or the tick cap.
RunResult run(const SimConfig& config, std::ostream* qp_dump = nullptr);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);

}  // namespace gridcross
