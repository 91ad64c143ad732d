#include "gridcross/cbaa.hpp"

#include <algorithm>
#include <deque>
#include <json.hpp>
#include <set>

#include "gridcross/error.hpp"

namespace gridcross::cbaa {

bool Lists::contains(int agent) const {
  return std::find(winners.begin(), winners.end(), agent) != winners.end();
}

CommGraph::CommGraph(int size) {
  if (size < 1) throw ProtocolError("communication graph needs at least one agent");
  adjacency_.resize(static_cast<std::size_t>(size));
}

CommGraph CommGraph::complete(int size) {
  CommGraph g(size);
  for (int a = 1; a <= size; ++a) {
    for (int b = a + 1; b <= size; ++b) g.add_edge(a, b);
  }
  return g;
}

CommGraph CommGraph::line(int size) {
  CommGraph g(size);
  for (int a = 1; a < size; ++a) g.add_edge(a, a + 1);
  return g;
}

CommGraph CommGraph::ring(int size) {
  CommGraph g = line(size);
  if (size > 2) g.add_edge(size, 1);
  return g;
}

CommGraph CommGraph::disk(std::span<const Vec2> positions, double radius) {
  CommGraph g(static_cast<int>(positions.size()));
  for (std::size_t a = 0; a < positions.size(); ++a) {
    for (std::size_t b = a + 1; b < positions.size(); ++b) {
      if (distance(positions[a], positions[b]) <= radius) {
        g.add_edge(static_cast<int>(a) + 1, static_cast<int>(b) + 1);
      }
    }
  }
  return g;
}

void CommGraph::add_edge(int a, int b) {
  if (a == b) throw ProtocolError("self-loop on agent " + std::to_string(a));
  if (a < 1 || b < 1 || a > size() || b > size()) throw ProtocolError("edge outside agent range");
  auto& na = adjacency_[static_cast<std::size_t>(a - 1)];
  if (std::find(na.begin(), na.end(), b) != na.end()) return;
  na.push_back(b);
  adjacency_[static_cast<std::size_t>(b - 1)].push_back(a);
  std::sort(na.begin(), na.end());
  auto& nb = adjacency_[static_cast<std::size_t>(b - 1)];
  std::sort(nb.begin(), nb.end());
}

const std::vector<int>& CommGraph::neighbors(int agent) const {
  return adjacency_.at(static_cast<std::size_t>(agent - 1));
}

namespace {

std::vector<int> bfs_hops(const CommGraph& g, int source) {
  std::vector<int> hops(static_cast<std::size_t>(g.size()), -1);
  std::deque<int> queue{source};
  hops[static_cast<std::size_t>(source - 1)] = 0;
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (int b : g.neighbors(a)) {
      auto& h = hops[static_cast<std::size_t>(b - 1)];
      if (h < 0) {
        h = hops[static_cast<std::size_t>(a - 1)] + 1;
        queue.push_back(b);
      }
    }
  }
  return hops;
}

}  // namespace

bool CommGraph::connected() const {
  const auto hops = bfs_hops(*this, 1);
  return std::none_of(hops.begin(), hops.end(), [](int h) { return h < 0; });
}

std::vector<std::vector<int>> CommGraph::components() const {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(static_cast<std::size_t>(size()), 0);
  for (int a = 1; a <= size(); ++a) {
    if (seen[static_cast<std::size_t>(a - 1)]) continue;
    const auto hops = bfs_hops(*this, a);
    std::vector<int> comp;
    for (int b = 1; b <= size(); ++b) {
      if (hops[static_cast<std::size_t>(b - 1)] >= 0) {
        comp.push_back(b);
        seen[static_cast<std::size_t>(b - 1)] = 1;
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

int shortest_path_bound(const CommGraph& graph) {
  int diameter = 0;
  for (int a = 1; a <= graph.size(); ++a) {
    for (int h : bfs_hops(graph, a)) {
      if (h < 0) throw ProtocolError("communication graph is disconnected");
      diameter = std::max(diameter, h);
    }
  }
  return diameter;
}

Lists phase1_bid(int agent, double value, const Lists& previous) {
  Lists next = previous;
  if (previous.contains(agent)) return next;
  for (std::size_t j = 0; j < previous.size(); ++j) {
    if (outbids(value, agent, previous.bids[j], previous.winners[j])) {
      next.winners[j] = agent;
      next.bids[j] = value;
      break;
    }
  }
  return next;
}

Lists phase2_update(const Lists& own, std::span<const Lists> received) {
  Lists next = own;
  for (const Lists& msg : received) {
    if (msg.size() != own.size()) throw ProtocolError("list length mismatch in phase 2");
    for (std::size_t j = 0; j < own.size(); ++j) {
      if (outbids(msg.bids[j], msg.winners[j], next.bids[j], next.winners[j])) {
        next.bids[j] = msg.bids[j];
        next.winners[j] = msg.winners[j];
      }
    }
  }
  return next;
}

namespace {

bool agreed(const std::vector<Lists>& lists) {
  const Lists& ref = lists.front();
  if (std::any_of(lists.begin() + 1, lists.end(), [&](const Lists& l) { return l != ref; })) {
    return false;
  }
  std::vector<int> sorted = ref.winners;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] != static_cast<int>(k) + 1) return false;
  }
  return true;
}

}  // namespace

AuctionResult run_auction(std::span<const double> bids, const CommGraph& graph,
                          bool record_transcript) {
  const int n = static_cast<int>(bids.size());
  if (n != graph.size()) throw ProtocolError("bid count does not match graph size");
  const int bound = n * shortest_path_bound(graph);
  for (double b : bids) {
    if (!(b > 0.0)) throw ProtocolError("bids must be positive");
  }

  const auto slots = static_cast<std::size_t>(n);
  std::vector<Lists> lists(slots, Lists::empty(slots));
  std::vector<Lists> placed(slots);
  AuctionResult result;
  std::vector<Lists> inbox;
  // Worst case is S*l; the extra margin only turns a protocol bug into an error.
  for (int kappa = 1; kappa <= bound + n; ++kappa) {
    for (int a = 1; a <= n; ++a) {
      const auto i = static_cast<std::size_t>(a - 1);
      placed[i] = phase1_bid(a, bids[i], lists[i]);
    }
    for (int a = 1; a <= n; ++a) {
      inbox.clear();
      for (int b : graph.neighbors(a)) inbox.push_back(placed[static_cast<std::size_t>(b - 1)]);
      lists[static_cast<std::size_t>(a - 1)] = phase2_update(placed[static_cast<std::size_t>(a - 1)], inbox);
    }
    if (record_transcript) result.transcript.push_back(lists);
    if (agreed(lists)) {
      result.agreed = lists.front();
      result.iterations = kappa;
      return result;
    }
  }
  throw ProtocolError("auction did not reach agreement within S*l iterations");
}

std::vector<int> priority_set(int agent, std::span<const std::vector<int>> winners_lists) {
  std::set<int> ahead;
  for (const auto& list : winners_lists) {
    const auto it = std::find(list.begin(), list.end(), agent);
    if (it == list.end()) {
      throw ProtocolError("agent " + std::to_string(agent) + " missing from an agreed list");
    }
    ahead.insert(list.begin(), it);
  }
  return {ahead.begin(), ahead.end()};
}

std::string transcript_json(const AuctionResult& result) {
  nlohmann::json j;
  j["iterations"] = result.iterations;
  j["winners"] = result.agreed.winners;
  j["bids"] = result.agreed.bids;
  nlohmann::json rounds = nlohmann::json::array();
  for (std::size_t k = 0; k < result.transcript.size(); ++k) {
    nlohmann::json agents = nlohmann::json::array();
    for (std::size_t a = 0; a < result.transcript[k].size(); ++a) {
      agents.push_back({{"agent", a + 1},
                        {"winners", result.transcript[k][a].winners},
                        {"bids", result.transcript[k][a].bids}});
    }
    rounds.push_back({{"iteration", k + 1}, {"agents", agents}});
  }
  j["rounds"] = rounds;
  return j.dump(2);
}

}  // namespace gridcross::cbaa
