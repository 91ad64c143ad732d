#include "gridcross/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "gridcross/cbaa.hpp"
#include "gridcross/error.hpp"
#include "gridcross/mpc.hpp"

namespace gridcross {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

RouteCatalog RouteCatalog::build(const RoadNetwork& net, bool allow_left, double clearance) {
  RouteCatalog cat;
  const int entries = static_cast<int>(net.entries().size());
  const int exits = static_cast<int>(net.exits().size());
  cat.exit_count = exits;
  cat.options.assign(static_cast<std::size_t>(entries * exits), {});
  cat.served_exit.assign(static_cast<std::size_t>(entries * exits), -1);

  std::vector<std::vector<int>> direct(static_cast<std::size_t>(entries * exits));
  for (int e = 0; e < entries; ++e) {
    for (int x = 0; x < exits; ++x) {
      if (net.is_u_turn(e, x)) continue;
      for (Route& r : net.shortest_routes(e, x, allow_left)) {
        direct[static_cast<std::size_t>(e * exits + x)].push_back(static_cast<int>(cat.routes.size()));
        cat.paths.push_back(net.make_path(r));
        cat.routes.push_back(std::move(r));
      }
    }
  }
  for (int e = 0; e < entries; ++e) {
    for (int x = 0; x < exits; ++x) {
      if (net.is_u_turn(e, x)) continue;
      const auto idx = static_cast<std::size_t>(e * exits + x);
      int served = x;
      if (direct[idx].empty()) {
        // Nearest reachable exit to the requested one.
        served = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int y = 0; y < exits; ++y) {
          if (direct[static_cast<std::size_t>(e * exits + y)].empty()) continue;
          const double d = distance(net.exits()[static_cast<std::size_t>(x)].point,
                                    net.exits()[static_cast<std::size_t>(y)].point);
          if (d < best) {
            best = d;
            served = y;
          }
        }
        if (served < 0) throw Error("entry " + std::to_string(e) + " reaches no exit");
      }
      cat.served_exit[idx] = served;
      cat.options[idx] = direct[static_cast<std::size_t>(e * exits + served)];
    }
  }
  cat.registry = collision_points(cat.paths);
  cat.registry.assign_zones(cat.paths, clearance);
  cat.registry.assign_clusters(net);
  return cat;
}

const std::vector<int>& RouteCatalog::candidates(int entry, int exit) const {
  return options.at(static_cast<std::size_t>(entry * exit_count + exit));
}

bool RouteCatalog::rerouted(int entry, int exit) const {
  return served_exit.at(static_cast<std::size_t>(entry * exit_count + exit)) != exit;
}

double RouteCatalog::mean_length() const {
  if (paths.empty()) return 0.0;
  double sum = 0.0;
  for (const Path& p : paths) sum += p.length();
  return sum / static_cast<double>(paths.size());
}

World::World(SimConfig config)
    : config_(std::move(config)),
      network_(RoadNetwork::build_grid(config_.grid)),
      catalog_(RouteCatalog::build(network_, config_.traffic.left_turns, config_.mpc.min_distance)),
      rng_(config_.run.seed) {
  config_.validate();
}

int World::add_vehicle(int route, VehicleState state, double v_ref) {
  if (route < 0 || route >= static_cast<int>(catalog_.routes.size())) throw Error("unknown route");
  Vehicle v;
  v.id = next_id_++;
  v.route = route;
  v.state = state;
  v.params.v_ref = v_ref;
  v.params.a_min = config_.a_min;
  v.params.a_max = config_.a_max;
  v.params.path = route;
  v.params.validate();
  vehicles_.push_back(v);
  pending_events_.emplace_back();
  return v.id;
}

bool World::entry_clear(int entry, double v_ref) const {
  const double gap = config_.mpc.min_distance + config_.mpc.headway * v_ref;
  for (const Vehicle& v : vehicles_) {
    if (catalog_.routes[static_cast<std::size_t>(v.route)].entry == entry && v.state.p < gap) return false;
  }
  return true;
}

void World::inject() {
  const auto& tr = config_.traffic;
  const int exits = static_cast<int>(network_.exits().size());
  for (const Port& port : network_.entries()) {
    const double draw_inject = uniform01(rng_);
    const double draw_speed = uniform01(rng_);
    const double draw_exit = uniform01(rng_);
    const double draw_route = uniform01(rng_);
    if (!(draw_inject < tr.injection_probability)) continue;
    const double v_ref = tr.speed_min + draw_speed * (tr.speed_max - tr.speed_min);
    std::vector<int> allowed;
    for (int x = 0; x < exits; ++x)
      if (!network_.is_u_turn(port.id, x)) allowed.push_back(x);
    const int exit = allowed[std::min(allowed.size() - 1, static_cast<std::size_t>(draw_exit * static_cast<double>(allowed.size())))];
    const auto& options = catalog_.candidates(port.id, exit);
    const int route = options[std::min(options.size() - 1, static_cast<std::size_t>(draw_route * static_cast<double>(options.size())))];
    if (!entry_clear(port.id, v_ref)) continue;
    add_vehicle(route, {0.0, v_ref}, v_ref);
    ++stats_.injected;
    pending_events_.back().emplace_back("inject");
    if (catalog_.rerouted(port.id, exit)) {
      ++stats_.reroutes;
      pending_events_.back().emplace_back("reroute");
    }
  }
}

namespace {

/// Vehicles on cycles of the wait-for graph.
std::vector<bool> cycle_members(const std::vector<std::vector<int>>& edges) {
  const std::size_t n = edges.size();
  std::vector<int> color(n, 0);
  std::vector<bool> on_cycle(n, false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> frames;
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root]) continue;
    frames.push_back({static_cast<int>(root), 0});
    color[root] = 1;
    stack.push_back(static_cast<int>(root));
    while (!frames.empty()) {
      auto& [node, next] = frames.back();
      const auto& out = edges[static_cast<std::size_t>(node)];
      if (next < out.size()) {
        const int w = out[next++];
        if (color[static_cast<std::size_t>(w)] == 0) {
          color[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
          frames.push_back({w, 0});
        } else if (color[static_cast<std::size_t>(w)] == 1) {
          for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            on_cycle[static_cast<std::size_t>(*it)] = true;
            if (*it == w) break;
          }
        }
      } else {
        color[static_cast<std::size_t>(node)] = 2;
        stack.pop_back();
        frames.pop_back();
      }
    }
  }
  return on_cycle;
}

/// Orders the contenders of one point. Each returned list holds vehicle
/// indices, highest priority first; disconnected disk graphs yield one list
/// per component.
std::vector<std::vector<int>> order_contenders(const std::vector<int>& members,
                                               const std::vector<double>& bids,
                                               const std::vector<Vec2>& where,
                                               const Topology& topology, int& iterations,
                                               bool& split) {
  const int S = static_cast<int>(members.size());
  auto solve = [&](const std::vector<int>& local, const cbaa::CommGraph& graph) {
    std::vector<double> b;
    for (int a : local) b.push_back(bids[static_cast<std::size_t>(a)]);
    const auto res = cbaa::run_auction(b, graph);
    iterations = std::max(iterations, res.iterations);
    std::vector<int> order;
    for (int w : res.agreed.winners) order.push_back(members[static_cast<std::size_t>(local[static_cast<std::size_t>(w - 1)])]);
    return order;
  };
  std::vector<int> all(static_cast<std::size_t>(S));
  for (int a = 0; a < S; ++a) all[static_cast<std::size_t>(a)] = a;
  if (topology.kind == Topology::Kind::Complete) return {solve(all, cbaa::CommGraph::complete(S))};

  const auto graph = cbaa::CommGraph::disk(where, topology.radius);
  if (graph.connected()) return {solve(all, graph)};
  split = true;
  std::vector<std::vector<int>> out;
  for (const auto& comp : graph.components()) {
    std::vector<int> local;
    for (int a : comp) local.push_back(a - 1);
    if (local.size() == 1) {
      out.push_back({members[static_cast<std::size_t>(local[0])]});
      continue;
    }
    cbaa::CommGraph sub(static_cast<int>(local.size()));
    for (std::size_t x = 0; x < local.size(); ++x)
      for (int nb : graph.neighbors(local[x] + 1)) {
        auto it = std::find(local.begin(), local.end(), nb - 1);
        const auto y = static_cast<std::size_t>(it - local.begin());
        if (y > x) sub.add_edge(static_cast<int>(x) + 1, static_cast<int>(y) + 1);
      }
    out.push_back(solve(local, sub));
  }
  return out;
}

}  // namespace

void World::step() {
  const mpc::Params& mp = config_.mpc;
  const auto& registry = catalog_.registry;
  const auto& paths = catalog_.paths;
  const std::size_t n = vehicles_.size();

  // (1) frontal sets, pending points, contenders
  std::vector<PathPosition> pos(n);
  std::vector<Vec2> where(n);
  for (std::size_t i = 0; i < n; ++i) {
    pos[i] = {vehicles_[i].id, vehicles_[i].route, vehicles_[i].state.p};
    where[i] = paths[static_cast<std::size_t>(vehicles_[i].route)].to_global(vehicles_[i].state.p);
  }
  auto index = [&](int id) {
    auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                               [](const Vehicle& v, int x) { return v.id < x; });
    return static_cast<std::size_t>(it - vehicles_.begin());
  };
  std::vector<std::vector<int>> frontal(n);
  for (std::size_t i = 0; i < n; ++i) frontal[i] = frontal_set(i, pos, paths, mpc::frontal_tolerance(mp));

  // Auction participants per point are the first vehicles in line before it.
  // Vehicles still inside a conflict zone, inside an intersection, or unable to
  // stop before it keep precedence; vehicles queued behind another yield to
  // every participant.
  std::map<int, std::vector<int>> contending, clearing, queued;
  std::set<std::pair<int, int>> committed;
  for (std::size_t i = 0; i < n; ++i) {
    const Vehicle& me = vehicles_[i];
    const Path& own = paths[static_cast<std::size_t>(me.route)];
    double leader = std::numeric_limits<double>::infinity();
    for (int k : frontal[i]) {
      if (auto s = own.locate(where[index(k)], mpc::frontal_tolerance(mp))) leader = std::min(leader, *s);
    }
    std::map<int, bool> locked;
    for (const auto& hit : registry.along(me.route)) {
      const double entry = hit.s - std::max(hit.before, mp.min_distance);
      bool& lock = locked[hit.cluster];
      if (hit.s <= me.state.p || entry < me.state.p)
        lock = true;
      else if (!lock)
        lock = !mpc::can_yield(me.state, entry + mp.min_distance - me.state.p, me.params.a_min, mp);
    }
    for (const auto& hit : registry.along(me.route)) {
      if (hit.s > me.state.p) {
        const bool lock = locked[hit.cluster];
        if (lock) committed.insert({hit.point, static_cast<int>(i)});
        if (!lock && leader < hit.s)
          queued[hit.point].push_back(static_cast<int>(i));
        else
          contending[hit.point].push_back(static_cast<int>(i));
      } else if (hit.s + std::max(hit.after, mp.min_distance) > me.state.p) {
        clearing[hit.point].push_back(static_cast<int>(i));
      }
    }
  }

  // (2) auctions, (3) priority sets
  std::vector<std::set<std::pair<int, int>>> ahead(n);  // (vehicle id, point)
  std::vector<int> iters(n, 0);
  for (const auto& [point, members] : contending) {
    const Vec2 h = registry.points()[static_cast<std::size_t>(point)].where;
    auto cl = clearing.find(point);
    if (cl != clearing.end()) {
      for (int i : members)
        for (int c : cl->second) ahead[static_cast<std::size_t>(i)].insert({vehicles_[static_cast<std::size_t>(c)].id, point});
    }
    if (members.size() < 2) continue;
    std::vector<double> bids;
    std::vector<Vec2> at;
    for (int i : members) {
      const auto& v = vehicles_[static_cast<std::size_t>(i)];
      bids.push_back(cbaa::compute_bid(v.state.v, distance(where[static_cast<std::size_t>(i)], h),
                                       config_.auction.p_v, config_.auction.p_d, config_.auction.epsilon));
      at.push_back(where[static_cast<std::size_t>(i)]);
    }
    int it = 0;
    bool split = false;
    const auto lists = order_contenders(members, bids, at, config_.auction.topology, it, split);
    if (split) spdlog::warn("tick {}: auction graph at point {} is disconnected, ordering per component", tick_, point);
    stats_.max_auction_iterations = std::max(stats_.max_auction_iterations, it);
    for (int i : members) iters[static_cast<std::size_t>(i)] = std::max(iters[static_cast<std::size_t>(i)], it);
    for (auto order : lists) {
      std::stable_partition(order.begin(), order.end(),
                            [&](int i) { return committed.count({point, i}) > 0; });
      for (std::size_t a = 0; a < order.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
          ahead[static_cast<std::size_t>(order[a])].insert({vehicles_[static_cast<std::size_t>(order[b])].id, point});
    }
  }

  for (const auto& [point, waiting] : queued) {
    for (int i : waiting) {
      auto& set = ahead[static_cast<std::size_t>(i)];
      for (const auto* group : {&contending[point], &clearing[point]})
        for (int j : *group) set.insert({vehicles_[static_cast<std::size_t>(j)].id, point});
    }
  }

  last_priority_.assign(n, {});
  last_frontal_ = frontal;
  auto& precedence = last_precedence_;
  precedence.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (auto [j, point] : ahead[i]) {
      // A vehicle following i along i's own path never takes precedence over it.
      const auto& fj = frontal[index(j)];
      if (std::binary_search(fj.begin(), fj.end(), vehicles_[i].id)) continue;
      precedence[i].push_back({j, point});
      if (last_priority_[i].empty() || last_priority_[i].back() != j) last_priority_[i].push_back(j);
    }
  }

  // Wait-for graph among stopped vehicles.
  std::vector<std::vector<int>> waits(n);
  constexpr double kStopped = 1e-3;
  for (std::size_t i = 0; i < n; ++i) {
    if (vehicles_[i].state.v > kStopped) continue;
    for (const auto* set : {&last_priority_[i], &frontal[i]})
      for (int j : *set) {
        const std::size_t jj = index(j);
        if (vehicles_[jj].state.v <= kStopped) waits[i].push_back(static_cast<int>(jj));
      }
  }
  const auto deadlocked = cycle_members(waits);

  // (4) control on the frozen snapshot
  std::vector<mpc::Agent> agents(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vehicle& v = vehicles_[i];
    agents[i] = {v.id, v.route, v.state, v.last_input, v.params};
  }
  mpc::World snapshot{agents, paths, &registry};
  std::vector<double> inputs(n, 0.0);
  const std::size_t first_row = trace_.rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    mpc::Neighbourhood nb{last_priority_[i], frontal[i], precedence[i]};
    const mpc::Outcome out = mpc::control_step(agents[i], nb, snapshot, mp);
    inputs[i] = out.u;
    if (qp_dump_) {
      nlohmann::json j{{"k", tick_},
                       {"vehicle", vehicles_[i].id},
                       {"variables", 2 * (mp.horizon + 1)},
                       {"rows", out.rows},
                       {"frontal_rows", out.frontal_rows},
                       {"crossing_rows", out.crossing_rows},
                       {"status", qp::to_string(out.status)},
                       {"objective", out.objective},
                       {"kkt", out.kkt},
                       {"u", out.u}};
      *qp_dump_ << j.dump() << '\n';
    }

    TraceRow row;
    row.k = tick_;
    row.id = vehicles_[i].id;
    row.route = vehicles_[i].route;
    row.p = vehicles_[i].state.p;
    row.v = vehicles_[i].state.v;
    row.u = out.u;
    row.x = where[i].x;
    row.y = where[i].y;
    row.v_ref = vehicles_[i].params.v_ref;
    row.path_length = paths[static_cast<std::size_t>(vehicles_[i].route)].length();
    row.n_priority = static_cast<int>(last_priority_[i].size());
    row.max_auction_iters = iters[i];
    row.events = std::move(pending_events_[i]);
    pending_events_[i].clear();
    for (const auto& e : out.events) {
      if (e == "infeasible_mpc") {
        ++stats_.infeasible;
        spdlog::debug("tick {}: vehicle {} controller infeasible, braking", tick_, row.id);
      } else if (e == "dropped_t0_row") {
        ++stats_.dropped_rows;
      }
      row.events.push_back(e);
    }
    if (deadlocked[i]) {
      ++stats_.deadlock_warnings;
      row.events.emplace_back("deadlock_warning");
    }
    trace_.rows.push_back(std::move(row));
  }

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (distance(where[a], where[b]) < mp.min_distance) {
        ++stats_.safety_violations;
        for (std::size_t c : {a, b}) {
          auto& ev = trace_.rows[first_row + c].events;
          if (std::find(ev.begin(), ev.end(), "safety_violation") == ev.end()) ev.emplace_back("safety_violation");
        }
      }

  // (5) dynamics, (6) removal
  std::vector<Vehicle> kept;
  std::vector<std::vector<std::string>> kept_events;
  for (std::size_t i = 0; i < n; ++i) {
    Vehicle v = vehicles_[i];
    v.state = gridcross::step(v.state, inputs[i], mp.ts);
    v.state.v = std::max(v.state.v, 0.0);
    v.last_input = inputs[i];
    if (v.state.p >= paths[static_cast<std::size_t>(v.route)].length()) {
      ++stats_.completed;
      trace_.rows[first_row + i].events.emplace_back("complete");
      continue;
    }
    kept.push_back(v);
    kept_events.push_back(std::move(pending_events_[i]));
  }
  vehicles_ = std::move(kept);
  pending_events_ = std::move(kept_events);

  // (7) injection
  inject();
  ++tick_;
  stats_.ticks = tick_;
}

long default_tick_cap(const SimConfig& config, const RouteCatalog& catalog) {
  const double per_vehicle = catalog.mean_length() / (config.traffic.speed_min * config.mpc.ts);
  return static_cast<long>(std::ceil(40.0 * config.run.target_completed * per_vehicle));
}

RunResult run(const SimConfig& config, std::ostream* qp_dump) {
  World world(config);
  world.set_qp_dump(qp_dump);
  const long cap = config.run.tick_cap > 0 ? config.run.tick_cap : default_tick_cap(config, world.catalog());
  bool incomplete = false;
  while (world.stats().completed < config.run.target_completed) {
    if (world.tick() >= cap) {
      incomplete = true;
      spdlog::warn("tick cap {} reached with {} of {} vehicles completed", cap, world.stats().completed,
                   config.run.target_completed);
      break;
    }
    world.step();
  }
  RunResult res{world.trace(), world.stats()};
  res.stats.incomplete = incomplete;
  res.trace.incomplete = incomplete;
  return res;
}

}  // namespace gridcross
