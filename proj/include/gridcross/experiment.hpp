#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridcross/config.hpp"
#include "gridcross/metrics.hpp"

namespace gridcross {

struct TurnPair {
  std::uint64_t seed = 0;
  Summary with_left;
  Summary without_left;
};

struct PooledStats {
  double avg_speed_kmh = 0.0;
  double avg_accel = 0.0;
  long samples = 0;
  std::optional<double> min_distance;
  int violations = 0;
};

struct TurnComparison {
  std::vector<TurnPair> pairs;
  PooledStats with_left;
  PooledStats without_left;
};

/// Runs each seed twice with identical injection streams, left turns on and off.
TurnComparison compare_turns(const SimConfig& base, const std::vector<std::uint64_t>& seeds);

PooledStats pool(const std::vector<Summary>& runs);

std::string comparison_json(const TurnComparison& c);

}  // namespace gridcross
