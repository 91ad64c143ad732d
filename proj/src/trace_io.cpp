#include "gridcross/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "gridcross/error.hpp"

namespace gridcross {

bool TraceRow::has(const std::string& event) const {
  return std::find(events.begin(), events.end(), event) != events.end();
}

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& field, std::size_t line) {
  std::istringstream is(field);
  T v{};
  is >> v;
  if (field.empty() || is.fail() || !is.eof())
    throw Error("trace line " + std::to_string(line) + ": bad number '" + field + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw Error("trace line " + std::to_string(line) + ": non-finite value");
  }
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    os << r.k << ',' << r.id << ',' << r.route << ',';
    for (double v : {r.p, r.v, r.u, r.x, r.y, r.v_ref, r.path_length}) {
      put(os, v);
      os << ',';
    }
    os << r.n_priority << ',' << r.max_auction_iters << ',';
    for (std::size_t i = 0; i < r.events.size(); ++i) os << (i ? ";" : "") << r.events[i];
    os << '\n';
  }
}

std::string trace_csv(const Trace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

Trace read_trace_csv(std::istream& is) {
  Trace trace;
  std::string line;
  if (!std::getline(is, line)) throw Error("trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw Error("trace header mismatch");
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 13) throw Error("trace line " + std::to_string(n) + ": expected 13 fields");
    TraceRow r;
    r.k = parse_number<long>(f[0], n);
    r.id = parse_number<int>(f[1], n);
    r.route = parse_number<int>(f[2], n);
    r.p = parse_number<double>(f[3], n);
    r.v = parse_number<double>(f[4], n);
    r.u = parse_number<double>(f[5], n);
    r.x = parse_number<double>(f[6], n);
    r.y = parse_number<double>(f[7], n);
    r.v_ref = parse_number<double>(f[8], n);
    r.path_length = parse_number<double>(f[9], n);
    r.n_priority = parse_number<int>(f[10], n);
    r.max_auction_iters = parse_number<int>(f[11], n);
    if (!f[12].empty()) r.events = split(f[12], ';');
    if (!trace.rows.empty()) {
      const TraceRow& prev = trace.rows.back();
      if (r.k < prev.k || (r.k == prev.k && r.id <= prev.id))
        throw Error("trace line " + std::to_string(n) + ": rows not ordered by (k, id)");
    }
    trace.rows.push_back(std::move(r));
  }
  return trace;
}

std::vector<Violation> detect_collisions(const Trace& trace, double min_distance) {
  std::vector<Violation> out;
  const auto& rows = trace.rows;
  std::size_t begin = 0;
  while (begin < rows.size()) {
    std::size_t end = begin;
    while (end < rows.size() && rows[end].k == rows[begin].k) ++end;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < end; ++j) {
        const double d = std::hypot(rows[i].x - rows[j].x, rows[i].y - rows[j].y);
        if (d < min_distance) out.push_back({rows[i].k, rows[i].id, rows[j].id, d});
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace gridcross
