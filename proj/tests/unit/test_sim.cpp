#include <doctest.h>

#include <algorithm>
#include <map>

#include "gridcross/sim.hpp"

using namespace gridcross;

namespace {

SimConfig quiet() {
  SimConfig c = SimConfig::defaults();
  c.traffic.injection_probability = 0.0;
  return c;
}

SimConfig short_run(std::uint64_t seed) {
  SimConfig c = SimConfig::defaults();
  c.run.seed = seed;
  c.run.target_completed = 6;
  return c;
}

}  // namespace

TEST_CASE("uniform draws stay in the unit interval") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("catalogs without left turns contain no left move") {
  const RoadNetwork net = RoadNetwork::build_grid(SimConfig::defaults().grid);
  const RouteCatalog no_left = RouteCatalog::build(net, false, 2.1);
  const RouteCatalog all = RouteCatalog::build(net, true, 2.1);
  for (const Route& r : no_left.routes) CHECK(std::count(r.moves.begin(), r.moves.end(), Move::Left) == 0);
  CHECK(all.routes.size() > no_left.routes.size());
  for (const Port& in : net.entries()) {
    for (const Port& out : net.exits()) {
      if (net.is_u_turn(in.id, out.id)) continue;
      CHECK_FALSE(no_left.candidates(in.id, out.id).empty());
      for (int r : no_left.candidates(in.id, out.id)) CHECK(no_left.routes[static_cast<std::size_t>(r)].entry == in.id);
    }
  }
}

TEST_CASE("a lone vehicle cruises to its exit") {
  World w(quiet());
  const int id = w.add_vehicle(0, {0.0, 10.0}, 15.0);
  const double length = w.catalog().paths[0].length();
  for (int k = 0; k < 400 && !w.vehicles().empty(); ++k) w.step();
  CHECK(w.vehicles().empty());
  CHECK(w.stats().completed == 1);
  const auto& last = w.trace().rows.back();
  CHECK(last.id == id);
  CHECK(last.has("complete"));
  CHECK(last.p + 0.25 * last.v >= length);
  CHECK(last.v == doctest::Approx(15.0).epsilon(0.05));
}

TEST_CASE("two vehicles meeting at a crossing keep their distance") {
  World w(quiet());
  const auto& reg = w.catalog().registry;
  const auto& hits = reg.along(0);
  REQUIRE(!hits.empty());
  const auto& cp = reg.points()[static_cast<std::size_t>(hits.front().point)];
  int other = -1;
  for (const auto& pc : cp.on_paths)
    if (pc.path != 0) other = pc.path;
  REQUIRE(other >= 0);
  const double s_ego = hits.front().s;
  const double s_other = *reg.coordinate(hits.front().point, other);
  w.add_vehicle(0, {std::max(0.0, s_ego - 30.0), 14.0}, 14.0);
  w.add_vehicle(other, {std::max(0.0, s_other - 30.0), 14.0}, 14.0);
  for (int k = 0; k < 400 && !w.vehicles().empty(); ++k) w.step();
  CHECK(w.stats().completed == 2);
  CHECK(w.stats().safety_violations == 0);
  CHECK(detect_collisions(w.trace(), 2.1).empty());
}

TEST_CASE("short runs are deterministic and respect invariants") {
  const RunResult a = run(short_run(4));
  const RunResult b = run(short_run(4));
  CHECK(trace_csv(a.trace) == trace_csv(b.trace));
  CHECK(a.stats.completed >= 6);
  CHECK(detect_collisions(a.trace, 2.1).empty());
  std::map<int, double> last_p;
  for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
    const auto& r = a.trace.rows[i];
    CHECK(r.v >= 0.0);
    CHECK(r.p >= 0.0);
    CHECK(r.p <= r.path_length + 1e-9);
    CHECK(r.u >= -9.0 - 1e-9);
    CHECK(r.u <= 5.0 + 1e-9);
    if (i > 0) {
      const auto& q = a.trace.rows[i - 1];
      CHECK((q.k < r.k || (q.k == r.k && q.id < r.id)));
    }
    if (auto it = last_p.find(r.id); it != last_p.end()) CHECK(r.p >= it->second);
    last_p[r.id] = r.p;
  }
  const RunResult c = run(short_run(5));
  CHECK(trace_csv(a.trace) != trace_csv(c.trace));
}

TEST_CASE("the tick cap ends a run as incomplete") {
  SimConfig c = short_run(1);
  c.run.tick_cap = 5;
  const RunResult r = run(c);
  CHECK(r.stats.ticks == 5);
  CHECK(r.stats.incomplete);
  CHECK(r.trace.incomplete);
}
