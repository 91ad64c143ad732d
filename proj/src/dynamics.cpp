#include "gridcross/dynamics.hpp"

#include "gridcross/error.hpp"

namespace gridcross {

void VehicleParams::validate() const {
  if (!(a_min < 0.0)) throw InvalidConfiguration("mpc.accel_min_mps2", "must be < 0");
  if (!(a_max > 0.0)) throw InvalidConfiguration("mpc.accel_max_mps2", "must be > 0");
  if (!(v_ref > 0.0)) throw InvalidConfiguration("v_ref", "must be > 0");
}

}  // namespace gridcross
