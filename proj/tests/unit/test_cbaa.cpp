#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include <json.hpp>

#include "gridcross/cbaa.hpp"
#include "gridcross/error.hpp"
#include "oracles.hpp"

using namespace gridcross;
using namespace gridcross::cbaa;

namespace {

std::vector<std::vector<int>> adjacency(const CommGraph& g) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.size()));
  for (int a = 1; a <= g.size(); ++a) {
    for (int b : g.neighbors(a)) adj[static_cast<std::size_t>(a - 1)].push_back(b - 1);
  }
  return adj;
}

CommGraph random_tree(int n, std::mt19937_64& rng) {
  CommGraph g(n);
  for (int a = 2; a <= n; ++a) g.add_edge(a, 1 + static_cast<int>(rng() % static_cast<unsigned>(a - 1)));
  return g;
}

std::vector<double> distinct_bids(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> bid(0.01, 10.0);
  std::set<double> seen;
  std::vector<double> out;
  while (static_cast<int>(out.size()) < n) {
    const double b = bid(rng);
    if (seen.insert(b).second) out.push_back(b);
  }
  return out;
}

}  // namespace

TEST_CASE("phase one places a bid at the first slot it outbids") {
  Lists prev = Lists::empty(3);
  prev.winners = {2, 0, 0};
  prev.bids = {5.0, 0.0, 0.0};
  const Lists l = phase1_bid(1, 3.0, prev);
  CHECK(l.winners == std::vector<int>{2, 1, 0});
  CHECK(l.bids == std::vector<double>{5.0, 3.0, 0.0});
  const Lists top = phase1_bid(3, 7.0, prev);
  CHECK(top.winners == std::vector<int>{3, 0, 0});
  CHECK(top.bids == std::vector<double>{7.0, 0.0, 0.0});
  CHECK(phase1_bid(2, 9.0, prev) == prev);
}

TEST_CASE("phase two keeps the slot-wise best") {
  Lists own = Lists::empty(2);
  own.winners = {1, 0};
  own.bids = {2.0, 0.0};
  Lists other = Lists::empty(2);
  other.winners = {2, 1};
  other.bids = {4.0, 2.0};
  const Lists out = phase2_update(own, std::vector<Lists>{other});
  CHECK(out.winners == std::vector<int>{2, 1});
  CHECK(out.bids == std::vector<double>{4.0, 2.0});
}

TEST_CASE("ties are broken toward the lower id") {
  CHECK(outbids(1.0, 2, 1.0, 5));
  CHECK_FALSE(outbids(1.0, 5, 1.0, 2));
  CHECK(outbids(0.5, 3, 0.4, 1));
  const std::vector<double> bids{2.0, 2.0, 1.0};
  CHECK(run_auction(bids, CommGraph::line(3)).agreed.winners == std::vector<int>{1, 2, 3});
}

TEST_CASE("auctions agree on the sorted order within S times the diameter") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const int kind = trial % 5;
    CommGraph g = kind == 0 ? CommGraph::complete(n)
                : kind == 1 ? CommGraph::line(n)
                : kind == 2 ? CommGraph::ring(n)
                            : random_tree(n, rng);
    if (kind == 4) {
      for (int e = 0; e < n; ++e) {
        const int a = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        const int b = 1 + static_cast<int>(rng() % static_cast<unsigned>(n));
        if (a != b) g.add_edge(a, b);
      }
    }
    const auto bids = distinct_bids(n, rng);
    const int l = oracle::diameter(adjacency(g));
    REQUIRE(l == shortest_path_bound(g));
    const AuctionResult r = run_auction(bids, g, true);
    const auto want = oracle::rank(bids);
    CAPTURE(trial);
    CHECK(r.agreed.winners == want.winners);
    CHECK(r.agreed.bids == want.bids);
    CHECK(r.iterations <= n * std::max(l, 1));
    for (std::size_t k = 1; k < r.transcript.size(); ++k) {
      for (std::size_t a = 0; a < r.transcript[k].size(); ++a) {
        for (std::size_t s = 0; s < r.transcript[k][a].bids.size(); ++s) {
          CHECK(r.transcript[k][a].bids[s] >= r.transcript[k - 1][a].bids[s]);
        }
      }
    }
  }
}

TEST_CASE("disconnected graphs and bad bids are protocol errors") {
  const std::vector<double> bids{1.0, 2.0, 3.0};
  CommGraph g(3);
  g.add_edge(1, 2);
  CHECK_FALSE(g.connected());
  CHECK(g.components().size() == 2);
  CHECK_THROWS_AS(run_auction(bids, g), ProtocolError);
  CHECK_THROWS_AS(run_auction(std::vector<double>{1.0, 0.0}, CommGraph::complete(2)), ProtocolError);
  CHECK_THROWS_AS(run_auction(bids, CommGraph::complete(2)), ProtocolError);
}

TEST_CASE("priority sets collect agents ranked ahead") {
  const std::vector<std::vector<int>> lists{{3, 1, 2}, {1, 4}};
  CHECK(priority_set(2, std::vector<std::vector<int>>{lists[0]}) == std::vector<int>{1, 3});
  CHECK(priority_set(4, std::vector<std::vector<int>>{lists[1]}) == std::vector<int>{1});
  CHECK(priority_set(1, lists) == std::vector<int>{3});
  CHECK_THROWS_AS(priority_set(5, lists), ProtocolError);
}

TEST_CASE("bids grow with speed and shrink with distance") {
  CHECK(compute_bid(10.0, 5.0, 1.0, 0.1, 0.1) > compute_bid(5.0, 5.0, 1.0, 0.1, 0.1));
  CHECK(compute_bid(10.0, 5.0, 1.0, 0.1, 0.1) > compute_bid(10.0, 8.0, 1.0, 0.1, 0.1));
  CHECK(compute_bid(0.0, 0.0, 1.0, 0.1, 0.1) == doctest::Approx(1.0));
}

TEST_CASE("disk graphs connect agents within range") {
  const std::vector<Vec2> pos{{0, 0}, {5, 0}, {20, 0}};
  const CommGraph g = CommGraph::disk(pos, 10.0);
  CHECK(g.neighbors(1) == std::vector<int>{2});
  CHECK(g.neighbors(3).empty());
  const auto j = nlohmann::json::parse(transcript_json(run_auction(std::vector<double>{1.0, 2.0}, CommGraph::complete(2), true)));
  CHECK(j["iterations"].get<int>() >= 1);
}
