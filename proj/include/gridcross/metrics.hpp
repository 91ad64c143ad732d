#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridcross/trace_io.hpp"

namespace gridcross {

struct SeriesSample {
  long k = 0;
  double p_bar = 0.0;          ///< normalized local coordinate
  double v_ratio_pct = 0.0;    ///< v / v_ref * 100
  std::optional<double> d_min; ///< [m]; absent when the vehicle is alone
  double u = 0.0;              ///< [m/s^2]
};

struct VehicleSeries {
  int id = 0;
  std::vector<SeriesSample> samples;
};

/// Series of one completed vehicle. Throws Error when the vehicle is absent,
/// did not complete, or never moved.
VehicleSeries vehicle_series(const Trace& trace, int id);

/// Series of every completed vehicle, ascending id.
std::vector<VehicleSeries> all_series(const Trace& trace);

struct Cell {
  double sum_v = 0.0;  ///< [m/s]
  double sum_u = 0.0;
  long count = 0;
  std::optional<double> mean_v_kmh() const;
  std::optional<double> mean_u() const;
};

struct CellGrid {
  double cell_size = 2.5;
  int nx = 0;
  int ny = 0;
  std::vector<Cell> cells;  ///< row-major, index y * nx + x

  const Cell& at(int x, int y) const { return cells.at(static_cast<std::size_t>(y * nx + x)); }
};

/// Bins samples by floor(x / size), floor(y / size) over [0, width] x [0, height].
/// A non-positive extent is taken from the samples.
CellGrid cell_averages(const Trace& trace, double cell_size, double width = 0.0,
                       double height = 0.0);

struct Summary {
  double avg_speed_kmh = 0.0;
  double avg_accel = 0.0;
  long samples = 0;
  int vehicles = 0;
  int injected = 0;
  int completed = 0;
  int violations = 0;
  int infeasible = 0;
  int deadlock_warnings = 0;
  int reroutes = 0;
  long ticks = 0;
  bool incomplete = false;
  /// Speed-ratio quantiles over all samples [%]: min, 5, 25, 50, 75, 95, max.
  std::vector<double> ratio_quantiles;
  std::optional<double> min_distance;  ///< smallest pairwise distance seen [m]
};

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

Summary summarize(const Trace& trace, double min_distance);

std::string summary_json(const Summary& s);

/// vehicle,k,p_bar,v_bar_pct,d_min_m,u_mps2
void write_series_csv(std::ostream& os, const std::vector<VehicleSeries>& series);
/// cell_x,cell_y,mean_v_kmh,mean_u_mps2,count; empty means for empty cells
void write_cells_csv(std::ostream& os, const CellGrid& grid);

}  // namespace gridcross
