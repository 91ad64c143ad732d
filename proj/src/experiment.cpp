#include "gridcross/experiment.hpp"

#include <json.hpp>

#include "gridcross/error.hpp"
#include "gridcross/sim.hpp"

namespace gridcross {

PooledStats pool(const std::vector<Summary>& runs) {
  PooledStats p;
  double sum_v = 0.0, sum_u = 0.0;
  for (const Summary& s : runs) {
    sum_v += s.avg_speed_kmh * static_cast<double>(s.samples);
    sum_u += s.avg_accel * static_cast<double>(s.samples);
    p.samples += s.samples;
    p.violations += s.violations;
    if (s.min_distance && (!p.min_distance || *s.min_distance < *p.min_distance)) p.min_distance = s.min_distance;
  }
  if (p.samples > 0) {
    p.avg_speed_kmh = sum_v / static_cast<double>(p.samples);
    p.avg_accel = sum_u / static_cast<double>(p.samples);
  }
  return p;
}

TurnComparison compare_turns(const SimConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw InvalidConfiguration("seeds", "at least one seed is required");
  TurnComparison c;
  std::vector<Summary> on, off;
  for (std::uint64_t seed : seeds) {
    SimConfig cfg = base;
    cfg.run.seed = seed;
    TurnPair pair;
    pair.seed = seed;
    cfg.traffic.left_turns = true;
    pair.with_left = summarize(run(cfg).trace, cfg.mpc.min_distance);
    cfg.traffic.left_turns = false;
    pair.without_left = summarize(run(cfg).trace, cfg.mpc.min_distance);
    on.push_back(pair.with_left);
    off.push_back(pair.without_left);
    c.pairs.push_back(std::move(pair));
  }
  c.with_left = pool(on);
  c.without_left = pool(off);
  return c;
}

namespace {

nlohmann::ordered_json to_json(const PooledStats& p) {
  nlohmann::ordered_json j;
  j["avg_speed_kmh"] = p.avg_speed_kmh;
  j["avg_accel_mps2"] = p.avg_accel;
  j["samples"] = p.samples;
  j["violations"] = p.violations;
  j["min_distance_m"] = p.min_distance ? nlohmann::ordered_json(*p.min_distance) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace

std::string comparison_json(const TurnComparison& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const TurnPair& p : c.pairs) {
    nlohmann::ordered_json e;
    e["seed"] = p.seed;
    e["with_left"] = nlohmann::ordered_json::parse(summary_json(p.with_left));
    e["without_left"] = nlohmann::ordered_json::parse(summary_json(p.without_left));
    e["delta_speed_kmh"] = p.without_left.avg_speed_kmh - p.with_left.avg_speed_kmh;
    e["delta_accel_mps2"] = p.without_left.avg_accel - p.with_left.avg_accel;
    pairs.push_back(std::move(e));
  }
  j["pairs"] = std::move(pairs);
  j["pooled"] = {{"with_left", to_json(c.with_left)},
                 {"without_left", to_json(c.without_left)},
                 {"delta_speed_kmh", c.without_left.avg_speed_kmh - c.with_left.avg_speed_kmh},
                 {"delta_accel_mps2", c.without_left.avg_accel - c.with_left.avg_accel}};
  return j.dump(2) + "\n";
}

}  // namespace gridcross
