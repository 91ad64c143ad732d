#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridcross/geometry.hpp"

namespace gridcross::cbaa {

/// One agent's winners list and bids list. Agent ids are 1-based; 0 marks
/// an empty slot (paired with bid 0).
struct Lists {
  std::vector<int> winners;
  std::vector<double> bids;

  static Lists empty(std::size_t slots) { return {std::vector<int>(slots, 0), std::vector<double>(slots, 0.0)}; }
  std::size_t size() const { return winners.size(); }
  bool contains(int agent) const;
  bool operator==(const Lists&) const = default;
};

/// Bid ordering with a deterministic tie-break: equal values favour the lower agent id.
constexpr bool outbids(double value, int agent, double other_value, int other_agent) {
  if (value != other_value) return value > other_value;
  if (other_agent == 0) return agent != 0;
  return agent != 0 && agent < other_agent;
}

/// Undirected communication graph over agents 1..S.
class CommGraph {
 public:
  explicit CommGraph(int size);

  static CommGraph complete(int size);
  static CommGraph line(int size);
  static CommGraph ring(int size);
  /// Edge between every pair closer than `radius`. positions[k] belongs to agent k+1.
  static CommGraph disk(std::span<const Vec2> positions, double radius);

  void add_edge(int a, int b);
  int size() const { return static_cast<int>(adjacency_.size()); }
  const std::vector<int>& neighbors(int agent) const;
  bool connected() const;
  /// Connected components as ascending agent-id lists.
  std::vector<std::vector<int>> components() const;

 private:
  std::vector<std::vector<int>> adjacency_;
};

/// Graph diameter in hops. Throws ProtocolError when disconnected.
int shortest_path_bound(const CommGraph& graph);

/// Local auction: place `value` at the earliest slot it outbids, unless the
/// agent is already listed.
Lists phase1_bid(int agent, double value, const Lists& previous);

/// Slot-wise max-consensus over the agent's own lists and those received
/// from its neighbours.
Lists phase2_update(const Lists& own, std::span<const Lists> received);

struct AuctionResult {
  Lists agreed;
  int iterations = 0;
  /// transcript[k][a] = lists of agent a+1 after iteration k+1 (only when recorded).
  std::vector<std::vector<Lists>> transcript;
};

/// Synchronous rounds of phase 1 then phase 2 until every agent holds the
/// same complete list. bids[k] is agent k+1's value. Throws ProtocolError on
/// a disconnected graph or size mismatch.
AuctionResult run_auction(std::span<const double> bids, const CommGraph& graph,
                          bool record_transcript = false);

/// Bid for crossing a point: (p_v v + p_d) / (d + eps).
constexpr double compute_bid(double speed, double distance_to_point, double p_v, double p_d,
                             double eps) {
  return (p_v * speed + p_d) / (distance_to_point + eps);
}

/// Agents listed before `agent` in any of the agreed winners lists.
/// Throws ProtocolError if the agent is missing from a list.
std::vector<int> priority_set(int agent, std::span<const std::vector<int>> winners_lists);

std::string transcript_json(const AuctionResult& result);

}  // namespace gridcross::cbaa
