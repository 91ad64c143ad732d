#include "gridcross/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "gridcross/error.hpp"

namespace gridcross {

using nlohmann::json;

Topology Topology::parse(const std::string& text) {
  if (text == "complete") return {};
  const std::string prefix = "disk:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - prefix.size() || !(r > 0.0) || !std::isfinite(r))
      throw InvalidConfiguration("auction.topology", "disk radius must be a positive number");
    return {Kind::Disk, r};
  }
  throw InvalidConfiguration("auction.topology", "expected 'complete' or 'disk:<radius>'");
}

std::string Topology::str() const {
  if (kind == Kind::Complete) return "complete";
  std::ostringstream os;
  os.precision(17);
  os << "disk:" << radius;
  return os.str();
}

void SimConfig::validate() const {
  grid.validate();
  try {
    mpc.validate();
  } catch (const InvalidConfiguration& e) {
    const bool timing = e.key() == "sampling_time_s" || e.key() == "horizon_steps";
    const std::string what = e.what();
    throw InvalidConfiguration((timing ? "timing." : "mpc.") + e.key(), what.substr(e.key().size() + 2));
  }
  if (!(a_min < 0.0)) throw InvalidConfiguration("mpc.accel_min_mps2", "must be negative");
  if (!(a_max > 0.0)) throw InvalidConfiguration("mpc.accel_max_mps2", "must be positive");
  if (!(auction.p_v > 0.0)) throw InvalidConfiguration("auction.p_v", "must be positive");
  if (!(auction.p_d > 0.0)) throw InvalidConfiguration("auction.p_d", "must be positive");
  if (!(auction.epsilon > 0.0)) throw InvalidConfiguration("auction.epsilon_m", "must be positive");
  const double pr = traffic.injection_probability;
  if (!(pr >= 0.0 && pr <= 1.0))
    throw InvalidConfiguration("traffic.injection_probability", "must lie in [0, 1]");
  if (!(traffic.speed_min > mpc.v_min))
    throw InvalidConfiguration("traffic.inject_speed_min_kmh", "must exceed the minimum speed");
  if (!(traffic.speed_max >= traffic.speed_min))
    throw InvalidConfiguration("traffic.inject_speed_max_kmh", "must not be below the minimum");
  if (!(traffic.speed_max <= mpc.v_max))
    throw InvalidConfiguration("traffic.inject_speed_max_kmh", "must not exceed the maximum speed");
  if (run.target_completed < 0) throw InvalidConfiguration("run.target_completed", "must be nonnegative");
  if (run.tick_cap < 0) throw InvalidConfiguration("run.tick_cap", "must be nonnegative");
}

SimConfig SimConfig::defaults() {
  SimConfig c;
  c.grid.rows = 2;
  c.grid.cols = 2;
  c.grid.stub_multiple = 2;
  c.grid.x_multiples = {3};
  c.grid.y_multiples = {3};
  return c;
}

namespace {

constexpr double kKmh = 1.0 / 3.6;

class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {
    if (!root.is_object()) throw InvalidConfiguration("<root>", "expected an object");
    for (const auto& [section, body] : root.items()) {
      if (!body.is_object()) throw InvalidConfiguration(section, "expected an object");
    }
  }

  template <class T>
  void get(const char* section, const char* key, T& out, double scale = 1.0) {
    known_.insert(std::string(section) + "." + key);
    auto s = root_.find(section);
    if (s == root_.end()) return;
    auto v = s->find(key);
    if (v == s->end()) return;
    const std::string name = std::string(section) + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) throw InvalidConfiguration(name, "expected true or false");
      out = v->get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) throw InvalidConfiguration(name, "expected a string");
      out = v->get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<int>>) {
      if (!v->is_array()) throw InvalidConfiguration(name, "expected an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) throw InvalidConfiguration(name, "expected an array of integers");
        out.push_back(e.get<int>());
      }
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) throw InvalidConfiguration(name, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v->is_number_unsigned()) throw InvalidConfiguration(name, "must be nonnegative");
      }
      out = v->get<T>();
    } else {
      if (!v->is_number()) throw InvalidConfiguration(name, "expected a number");
      out = v->get<double>() * scale;
    }
  }

  void reject_unknown() const {
    for (const auto& [section, body] : root_.items()) {
      for (const auto& [key, value] : body.items()) {
        const std::string name = section + "." + key;
        if (!known_.count(name)) throw InvalidConfiguration(name, "unknown key");
      }
    }
  }

 private:
  const json& root_;
  std::set<std::string> known_;
};

}  // namespace

SimConfig SimConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidConfiguration("<document>", e.what());
  }
  SimConfig c = defaults();
  Reader r(root);
  r.get("network", "rows", c.grid.rows);
  r.get("network", "cols", c.grid.cols);
  r.get("network", "lane_width_m", c.grid.lane_width);
  r.get("network", "sector_unit_m", c.grid.sector_unit);
  r.get("network", "x_multiples", c.grid.x_multiples);
  r.get("network", "y_multiples", c.grid.y_multiples);
  r.get("network", "stub_multiple", c.grid.stub_multiple);
  r.get("timing", "sampling_time_s", c.mpc.ts);
  r.get("timing", "horizon_steps", c.mpc.horizon);
  r.get("auction", "p_v", c.auction.p_v);
  r.get("auction", "p_d", c.auction.p_d);
  r.get("auction", "epsilon_m", c.auction.epsilon);
  std::string topo = c.auction.topology.str();
  r.get("auction", "topology", topo);
  c.auction.topology = Topology::parse(topo);
  r.get("mpc", "headway_s", c.mpc.headway);
  r.get("mpc", "headway_relax_s", c.mpc.headway_relax);
  r.get("mpc", "slack_max_m", c.mpc.slack_max);
  r.get("mpc", "min_distance_m", c.mpc.min_distance);
  r.get("mpc", "speed_min_kmh", c.mpc.v_min, kKmh);
  r.get("mpc", "speed_max_kmh", c.mpc.v_max, kKmh);
  r.get("mpc", "accel_min_mps2", c.a_min);
  r.get("mpc", "accel_max_mps2", c.a_max);
  r.get("mpc", "weight_speed", c.mpc.q);
  r.get("mpc", "weight_input", c.mpc.r);
  r.get("mpc", "weight_slack", c.mpc.omega);
  r.get("mpc", "qp_tolerance", c.mpc.tolerance);
  r.get("traffic", "injection_probability", c.traffic.injection_probability);
  r.get("traffic", "inject_speed_min_kmh", c.traffic.speed_min, kKmh);
  r.get("traffic", "inject_speed_max_kmh", c.traffic.speed_max, kKmh);
  r.get("traffic", "left_turns", c.traffic.left_turns);
  r.get("run", "seed", c.run.seed);
  r.get("run", "target_completed", c.run.target_completed);
  r.get("run", "tick_cap", c.run.tick_cap);
  r.reject_unknown();
  c.validate();
  return c;
}

SimConfig SimConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidConfiguration("<file>", "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SimConfig::to_json() const {
  json j;
  j["network"] = {{"rows", grid.rows},
                  {"cols", grid.cols},
                  {"lane_width_m", grid.lane_width},
                  {"sector_unit_m", grid.sector_unit},
                  {"x_multiples", grid.x_multiples},
                  {"y_multiples", grid.y_multiples},
                  {"stub_multiple", grid.stub_multiple}};
  j["timing"] = {{"sampling_time_s", mpc.ts}, {"horizon_steps", mpc.horizon}};
  j["auction"] = {{"p_v", auction.p_v},
                  {"p_d", auction.p_d},
                  {"epsilon_m", auction.epsilon},
                  {"topology", auction.topology.str()}};
  j["mpc"] = {{"headway_s", mpc.headway},
              {"headway_relax_s", mpc.headway_relax},
              {"slack_max_m", mpc.slack_max},
              {"min_distance_m", mpc.min_distance},
              {"speed_min_kmh", mpc.v_min / kKmh},
              {"speed_max_kmh", mpc.v_max / kKmh},
              {"accel_min_mps2", a_min},
              {"accel_max_mps2", a_max},
              {"weight_speed", mpc.q},
              {"weight_input", mpc.r},
              {"weight_slack", mpc.omega},
              {"qp_tolerance", mpc.tolerance}};
  j["traffic"] = {{"injection_probability", traffic.injection_probability},
                  {"inject_speed_min_kmh", traffic.speed_min / kKmh},
                  {"inject_speed_max_kmh", traffic.speed_max / kKmh},
                  {"left_turns", traffic.left_turns}};
  j["run"] = {{"seed", run.seed}, {"target_completed", run.target_completed}, {"tick_cap", run.tick_cap}};
  return j.dump(2) + "\n";
}

}  // namespace gridcross
