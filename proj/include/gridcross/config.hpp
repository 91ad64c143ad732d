#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gridcross/mpc.hpp"
#include "gridcross/network.hpp"

namespace gridcross {

/// Communication graph used inside each collision-point auction.
struct Topology {
  enum class Kind { Complete, Disk };
  Kind kind = Kind::Complete;
  double radius = 0.0;  ///< [m], disk only

  /// Parses "complete" or "disk:<radius>".
  static Topology parse(const std::string& text);
  std::string str() const;
};

struct AuctionParams {
  double p_v = 1.0;
  double p_d = 0.1;
  double epsilon = 0.1;  ///< [m]
  Topology topology;
};

struct TrafficParams {
  double injection_probability = 0.5;
  double speed_min = 52.0 / 3.6;  ///< [m/s]
  double speed_max = 56.0 / 3.6;  ///< [m/s]
  bool left_turns = true;
};

struct RunParams {
  std::uint64_t seed = 1;
  int target_completed = 50;
  long tick_cap = 0;  ///< 0 selects the automatic cap
};

struct SimConfig {
  GridSpec grid;
  mpc::Params mpc;
  double a_min = -9.0;
  double a_max = 5.0;
  AuctionParams auction;
  TrafficParams traffic;
  RunParams run;

  /// Throws InvalidConfiguration naming the offending key.
  void validate() const;

  /// Desk-scale defaults: 2x2 grid and the canonical controller parameters.
  static SimConfig defaults();
  static SimConfig from_json(const std::string& text);
  static SimConfig load(const std::filesystem::path& file);
  std::string to_json() const;
};

}  // namespace gridcross
