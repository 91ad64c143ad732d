#include <doctest.h>

#include <algorithm>

#include "gridcross/error.hpp"
#include "gridcross/network.hpp"
#include "gridcross/sim.hpp"
#include "oracles.hpp"

using namespace gridcross;

namespace {

GridSpec spec(int rows, int cols) {
  GridSpec g;
  g.rows = rows;
  g.cols = cols;
  g.stub_multiple = 2;
  g.x_multiples.assign(static_cast<std::size_t>(cols - 1), 3);
  g.y_multiples.assign(static_cast<std::size_t>(rows - 1), 3);
  return g;
}

}  // namespace

TEST_CASE("grid build validates its dimensions") {
  GridSpec g = spec(2, 2);
  g.rows = 0;
  CHECK_THROWS_AS(RoadNetwork::build_grid(g), InvalidConfiguration);
  g = spec(2, 2);
  g.lane_width = -1.0;
  CHECK_THROWS_AS(RoadNetwork::build_grid(g), InvalidConfiguration);
  g = spec(2, 2);
  g.x_multiples = {3, 3};
  CHECK_THROWS_AS(RoadNetwork::build_grid(g), InvalidConfiguration);
}

TEST_CASE("a grid has two ports per road end") {
  const RoadNetwork net = RoadNetwork::build_grid(spec(2, 3));
  CHECK(net.entries().size() == 2 * (2 + 3));
  CHECK(net.exits().size() == 2 * (2 + 3));
  CHECK(net.intersection_count() == 6);
  for (const Port& p : net.entries()) {
    CHECK(p.point.x >= -1e-9);
    CHECK(p.point.y >= -1e-9);
    CHECK(p.point.x <= net.width() + 1e-9);
    CHECK(p.point.y <= net.height() + 1e-9);
  }
}

TEST_CASE("minimal routes match exhaustive search") {
  for (auto [rows, cols] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 3}}) {
    const RoadNetwork net = RoadNetwork::build_grid(spec(rows, cols));
    for (bool left : {true, false}) {
      for (const Port& in : net.entries()) {
        for (const Port& out : net.exits()) {
          CAPTURE(rows);
          CAPTURE(cols);
          CAPTURE(left);
          CAPTURE(in.id);
          CAPTURE(out.id);
          std::vector<std::vector<Move>> got;
          for (const Route& r : net.shortest_routes(in.id, out.id, left)) got.push_back(r.moves);
          std::sort(got.begin(), got.end());
          CHECK(got == oracle::minimal_routes(net, in.id, out.id, left));
        }
      }
    }
  }
}

TEST_CASE("paths are continuous and run from entry to exit") {
  const RoadNetwork net = RoadNetwork::build_grid(spec(2, 2));
  for (const Port& in : net.entries()) {
    for (const Port& out : net.exits()) {
      for (const Route& r : net.shortest_routes(in.id, out.id, true)) {
        const Path path = net.make_path(r);
        CHECK(distance(path.to_global(0.0), in.point) < 1e-9);
        CHECK(distance(path.to_global(path.length()), out.point) < 1e-9);
        const auto& segs = path.segments();
        for (std::size_t k = 1; k < segs.size(); ++k) {
          CHECK(distance(segs[k - 1].end(), segs[k].start()) < 1e-9);
          CHECK(segs[k - 1].tangent_at(segs[k - 1].length()).dot(segs[k].tangent_at(0.0)) ==
                doctest::Approx(1.0));
        }
        for (double s = 0.0; s < path.length(); s += 1.7) {
          CHECK(path.to_local(path.to_global(s)) == doctest::Approx(s).epsilon(1e-9));
        }
        CHECK_THROWS_AS(path.to_global(path.length() + 1.0), OutOfDomain);
        CHECK_THROWS_AS(path.to_local({-100.0, -100.0}), NotOnPath);
      }
    }
  }
}

TEST_CASE("the registry holds every crossing of every path pair") {
  const RoadNetwork net = RoadNetwork::build_grid(spec(2, 2));
  const RouteCatalog cat = RouteCatalog::build(net, true, 2.1);
  const auto& reg = cat.registry;
  for (const auto& cp : reg.points()) {
    REQUIRE(cp.on_paths.size() >= 2);
    CHECK(cp.cluster >= 0);
    for (const auto& pc : cp.on_paths) {
      CHECK(distance(cat.paths[static_cast<std::size_t>(pc.path)].to_global(pc.s), cp.where) < 0.1 + 1e-9);
      CHECK(pc.before >= 0.0);
      CHECK(pc.after >= 0.0);
    }
  }
  for (std::size_t i = 0; i < cat.paths.size(); i += 3) {
    for (std::size_t j = i + 1; j < cat.paths.size(); j += 2) {
      for (const auto& sa : cat.paths[i].segments()) {
        for (const auto& sb : cat.paths[j].segments()) {
          for (Vec2 p : oracle::crossings(sa, sb)) {
            const Vec2 ta = sa.tangent_at(*sa.project(p, 1e-6));
            const Vec2 tb = sb.tangent_at(*sb.project(p, 1e-6));
            if (std::abs(ta.cross(tb)) < 1e-3) continue;
            bool listed = false;
            for (const auto& cp : reg.points()) {
              if (distance(cp.where, p) > 0.1 + 1e-9) continue;
              const auto a = reg.coordinate(static_cast<int>(&cp - reg.points().data()), static_cast<int>(i));
              const auto b = reg.coordinate(static_cast<int>(&cp - reg.points().data()), static_cast<int>(j));
              listed = listed || (a && b);
            }
            CAPTURE(i);
            CAPTURE(j);
            CHECK(listed);
          }
        }
      }
    }
  }
  for (std::size_t path = 0; path < cat.paths.size(); ++path) {
    const auto& hits = reg.along(static_cast<int>(path));
    CHECK(std::is_sorted(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.s < b.s; }));
  }
}

TEST_CASE("frontal sets and contenders follow positions") {
  const RoadNetwork net = RoadNetwork::build_grid(spec(2, 2));
  const RouteCatalog cat = RouteCatalog::build(net, true, 2.1);
  const std::vector<PathPosition> vs{{1, 0, 10.0}, {2, 0, 30.0}, {3, 0, 5.0}};
  CHECK(frontal_set(0, vs, cat.paths) == std::vector<int>{2});
  CHECK(frontal_set(1, vs, cat.paths).empty());
  CHECK(frontal_set(2, vs, cat.paths) == std::vector<int>{1, 2});
  const auto& hits = cat.registry.along(0);
  REQUIRE(!hits.empty());
  const int point = hits.front().point;
  const auto who = contenders(cat.registry, point, vs);
  for (int id : who) {
    CHECK(vs[static_cast<std::size_t>(id - 1)].p < hits.front().s);
  }
  CHECK(pending_points(cat.registry, 0, 0.0).size() == hits.size());
  CHECK(pending_points(cat.registry, 0, cat.paths[0].length()).empty());
}
