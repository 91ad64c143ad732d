#include "gridcross/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "gridcross/error.hpp"

namespace gridcross {

namespace {

/// [begin, end) row ranges sharing one tick.
std::vector<std::pair<std::size_t, std::size_t>> tick_ranges(const Trace& trace) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& rows = trace.rows;
  for (std::size_t b = 0; b < rows.size();) {
    std::size_t e = b;
    while (e < rows.size() && rows[e].k == rows[b].k) ++e;
    out.emplace_back(b, e);
    b = e;
  }
  return out;
}

/// Nearest other vehicle at the same tick for every row.
std::vector<std::optional<double>> nearest(const Trace& trace) {
  std::vector<std::optional<double>> out(trace.rows.size());
  for (auto [b, e] : tick_ranges(trace)) {
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = i + 1; j < e; ++j) {
        const double d = std::hypot(trace.rows[i].x - trace.rows[j].x, trace.rows[i].y - trace.rows[j].y);
        for (std::size_t x : {i, j})
          if (!out[x] || d < *out[x]) out[x] = d;
      }
    }
  }
  return out;
}

VehicleSeries series_from(const Trace& trace, const std::vector<std::optional<double>>& near,
                          const std::vector<std::size_t>& rows, int id) {
  double p_max = 0.0;
  for (std::size_t r : rows) p_max = std::max(p_max, trace.rows[r].p);
  if (!(p_max > 0.0)) throw Error("vehicle " + std::to_string(id) + " has zero travelled length");
  VehicleSeries s;
  s.id = id;
  for (std::size_t r : rows) {
    const TraceRow& row = trace.rows[r];
    s.samples.push_back({row.k, row.p / p_max, row.v / row.v_ref * 100.0, near[r], row.u});
  }
  return s;
}

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  os << buf;
}

}  // namespace

VehicleSeries vehicle_series(const Trace& trace, int id) {
  std::vector<std::size_t> rows;
  bool done = false;
  for (std::size_t r = 0; r < trace.rows.size(); ++r) {
    if (trace.rows[r].id != id) continue;
    rows.push_back(r);
    done = done || trace.rows[r].has("complete");
  }
  if (rows.empty()) throw Error("vehicle " + std::to_string(id) + " is not in the trace");
  if (!done) throw Error("vehicle " + std::to_string(id) + " did not complete");
  return series_from(trace, nearest(trace), rows, id);
}

std::vector<VehicleSeries> all_series(const Trace& trace) {
  std::map<int, std::vector<std::size_t>> rows;
  std::set<int> done;
  for (std::size_t r = 0; r < trace.rows.size(); ++r) {
    rows[trace.rows[r].id].push_back(r);
    if (trace.rows[r].has("complete")) done.insert(trace.rows[r].id);
  }
  const auto near = nearest(trace);
  std::vector<VehicleSeries> out;
  for (int id : done) out.push_back(series_from(trace, near, rows[id], id));
  return out;
}

std::optional<double> Cell::mean_v_kmh() const {
  if (count == 0) return std::nullopt;
  return sum_v / static_cast<double>(count) * 3.6;
}

std::optional<double> Cell::mean_u() const {
  if (count == 0) return std::nullopt;
  return sum_u / static_cast<double>(count);
}

CellGrid cell_averages(const Trace& trace, double cell_size, double width, double height) {
  if (!(cell_size > 0.0)) throw Error("cell size must be positive");
  if (!(width > 0.0) || !(height > 0.0)) {
    double mx = 0.0, my = 0.0;
    for (const TraceRow& r : trace.rows) {
      mx = std::max(mx, r.x);
      my = std::max(my, r.y);
    }
    if (!(width > 0.0)) width = mx;
    if (!(height > 0.0)) height = my;
  }
  CellGrid g;
  g.cell_size = cell_size;
  g.nx = std::max(1, static_cast<int>(std::ceil(width / cell_size)));
  g.ny = std::max(1, static_cast<int>(std::ceil(height / cell_size)));
  g.cells.assign(static_cast<std::size_t>(g.nx * g.ny), {});
  for (const TraceRow& r : trace.rows) {
    const int cx = std::clamp(static_cast<int>(std::floor(r.x / cell_size)), 0, g.nx - 1);
    const int cy = std::clamp(static_cast<int>(std::floor(r.y / cell_size)), 0, g.ny - 1);
    Cell& c = g.cells[static_cast<std::size_t>(cy * g.nx + cx)];
    c.sum_v += r.v;
    c.sum_u += r.u;
    ++c.count;
  }
  return g;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Summary summarize(const Trace& trace, double min_distance) {
  Summary s;
  s.incomplete = trace.incomplete;
  std::set<int> ids;
  std::vector<double> ratios;
  double sum_v = 0.0, sum_u = 0.0;
  for (const TraceRow& r : trace.rows) {
    ids.insert(r.id);
    sum_v += r.v;
    sum_u += r.u;
    ratios.push_back(r.v / r.v_ref * 100.0);
    for (const auto& e : r.events) {
      if (e == "inject") ++s.injected;
      else if (e == "complete") ++s.completed;
      else if (e == "infeasible_mpc") ++s.infeasible;
      else if (e == "deadlock_warning") ++s.deadlock_warnings;
      else if (e == "reroute") ++s.reroutes;
    }
  }
  s.samples = static_cast<long>(trace.rows.size());
  s.vehicles = static_cast<int>(ids.size());
  if (s.samples > 0) {
    s.avg_speed_kmh = sum_v / static_cast<double>(s.samples) * 3.6;
    s.avg_accel = sum_u / static_cast<double>(s.samples);
    s.ticks = trace.rows.back().k + 1;
    for (double q : {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) s.ratio_quantiles.push_back(quantile(ratios, q));
  }
  s.violations = static_cast<int>(detect_collisions(trace, min_distance).size());
  for (const auto& d : nearest(trace))
    if (d && (!s.min_distance || *d < *s.min_distance)) s.min_distance = d;
  return s;
}

std::string summary_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["avg_speed_kmh"] = s.avg_speed_kmh;
  j["avg_accel_mps2"] = s.avg_accel;
  j["samples"] = s.samples;
  j["vehicles"] = s.vehicles;
  j["injected"] = s.injected;
  j["completed"] = s.completed;
  j["violations"] = s.violations;
  j["infeasible_mpc"] = s.infeasible;
  j["deadlock_warnings"] = s.deadlock_warnings;
  j["reroutes"] = s.reroutes;
  j["ticks"] = s.ticks;
  j["incomplete"] = s.incomplete;
  nlohmann::ordered_json q;
  const char* names[] = {"min", "p05", "p25", "p50", "p75", "p95", "max"};
  for (std::size_t i = 0; i < s.ratio_quantiles.size(); ++i) q[names[i]] = s.ratio_quantiles[i];
  j["speed_ratio_pct"] = s.ratio_quantiles.empty() ? nlohmann::ordered_json(nullptr) : q;
  j["min_distance_m"] = s.min_distance ? nlohmann::ordered_json(*s.min_distance) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

void write_series_csv(std::ostream& os, const std::vector<VehicleSeries>& series) {
  os << "vehicle,k,p_bar,v_bar_pct,d_min_m,u_mps2\n";
  for (const auto& s : series) {
    for (const auto& x : s.samples) {
      os << s.id << ',' << x.k << ',';
      put(os, x.p_bar);
      os << ',';
      put(os, x.v_ratio_pct);
      os << ',';
      if (x.d_min) put(os, *x.d_min);
      os << ',';
      put(os, x.u);
      os << '\n';
    }
  }
}

void write_cells_csv(std::ostream& os, const CellGrid& grid) {
  os << "cell_x,cell_y,mean_v_kmh,mean_u_mps2,count\n";
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      const Cell& c = grid.at(x, y);
      os << x << ',' << y << ',';
      if (auto v = c.mean_v_kmh()) put(os, *v);
      os << ',';
      if (auto u = c.mean_u()) put(os, *u);
      os << ',' << c.count << '\n';
    }
  }
}

}  // namespace gridcross
