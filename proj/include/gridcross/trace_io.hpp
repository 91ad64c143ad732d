#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridcross {

/// State of one vehicle at tick k, before the tick's update, with the input applied at k.
struct TraceRow {
  long k = 0;
  int id = 0;
  int route = 0;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  double x = 0.0;
  double y = 0.0;
  double v_ref = 0.0;
  double path_length = 0.0;
  int n_priority = 0;
  int max_auction_iters = 0;
  std::vector<std::string> events;

  bool has(const std::string& event) const;
  bool operator==(const TraceRow&) const = default;
};

/// Rows ordered by (k, id).
struct Trace {
  std::vector<TraceRow> rows;
  bool incomplete = false;

  bool operator==(const Trace&) const = default;
};

inline constexpr const char* kTraceHeader =
    "k,id,route,p,v,u,x,y,v_ref,path_length,n_priority,max_auction_iters,events";

/// Numbers are written with %.17g so they read back exactly; events are ';'-separated.
void write_trace_csv(std::ostream& os, const Trace& trace);
std::string trace_csv(const Trace& trace);

/// Throws Error with the line number on malformed input.
Trace read_trace_csv(std::istream& is);

struct Violation {
  long k = 0;
  int a = 0;
  int b = 0;
  double distance = 0.0;
};

/// Every (k, a, b) with a < b whose distance falls below `min_distance`.
std::vector<Violation> detect_collisions(const Trace& trace, double min_distance);

}  // namespace gridcross
