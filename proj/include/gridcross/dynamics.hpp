#pragma once

namespace gridcross {

/// Longitudinal state along the vehicle's own path.
struct VehicleState {
  double p = 0.0;  ///< [m]
  double v = 0.0;  ///< [m/s]

  bool operator==(const VehicleState&) const = default;
};

struct VehicleParams {
  double v_ref = 15.0;   ///< desired cruising speed [m/s]
  double a_min = -9.0;   ///< [m/s^2], negative
  double a_max = 5.0;    ///< [m/s^2], positive
  int path = 0;

  void validate() const;
};

/// One step of the point-mass double integrator x' = A x + B u with
/// A = [1 Ts; 0 1], B = [0; Ts]. Position advances with the pre-update speed.
constexpr VehicleState step(VehicleState s, double u, double ts) {
  return {s.p + ts * s.v, s.v + ts * u};
}

}  // namespace gridcross
