#pragma once

#include <optional>
#include <span>
#include <utility>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridcross/dynamics.hpp"
#include "gridcross/network.hpp"
#include "gridcross/qp.hpp"

namespace gridcross::mpc {

/// Controller tuning shared by all vehicles.
struct Params {
  double ts = 0.25;                 ///< T_s [s]
  int horizon = 10;                 ///< T_h [steps]
  double headway = 1.0;             ///< lambda [s]
  double headway_relax = 0.5;       ///< lambda-bar [s]
  double slack_max = 10.0;          ///< delta-bar [m]
  double min_distance = 2.1;        ///< d-underbar [m]
  double v_min = 0.0;               ///< [m/s]
  double v_max = 130.0 / 3.6;       ///< [m/s]
  double q = 0.1;                   ///< speed tracking weight
  double r = 0.01;                  ///< input weight
  double omega = -0.1;              ///< slack weight (negative rewards slack)
  double tolerance = 1e-6;          ///< KKT acceptance

  void validate() const;
};

/// Snapshot of one vehicle as seen by every controller at tick k.
struct Agent {
  int id = 0;
  int path = 0;
  VehicleState state;
  double last_input = 0.0;  ///< u applied at the previous tick
  VehicleParams params;
};

/// Shared world data for building a controller problem.
struct World {
  std::span<const Agent> agents;  ///< ascending id
  std::span<const Path> paths;
  const CollisionPointRegistry* registry = nullptr;

  const Agent& agent(int id) const;
};

/// Constant-acceleration rollout with speed saturation, t = 0..T_h.
struct Rollout {
  int id = 0;
  int path = 0;
  std::vector<double> p;
  std::vector<double> v;
  /// False once the predicted position runs past the path end.
  bool present(int t) const;
  double path_length = 0.0;
};

Rollout predict(const Agent& other, double path_length, const Params& params);

/// Where a predicted other vehicle sits on the ego path at each t.
struct Sighting {
  int id = 0;
  int t = 0;
  double s = 0.0;  ///< ego local coordinate
};

/// Lateral distance below which another vehicle counts as on the ego path.
double frontal_tolerance(const Params& params);

/// Vehicles of the prediction located on the ego path at each t, depending
/// only on the fixed rollouts. Positions behind the ego's measured position
/// are ignored.
std::vector<Sighting> predicted_frontal(const Agent& ego, std::span<const Rollout> others,
                                        const World& world, const Params& params);

struct RowTag {
  enum class Kind { InputLow, InputHigh, SpeedLow, SpeedHigh, SlackLow, SlackHigh, Frontal, Crossing };
  Kind kind = Kind::InputLow;
  int t = 0;
  int other = -1;
  int point = -1;
};

const char* to_string(RowTag::Kind k);

/// Condensed problem over x = [u(0..T_h), delta(0..T_h)].
struct QpProblem {
  qp::Problem problem;
  std::vector<RowTag> tags;
  int horizon = 0;
  double ts = 0.0;
  VehicleState x0;
  double v_ref = 0.0;
  /// Own predicted position / speed as affine maps of the inputs.
  Eigen::MatrixXd pos_map, speed_map;
  Eigen::VectorXd pos_free, speed_free;
  std::vector<std::string> warnings;

  int count(RowTag::Kind k) const;
};

/// Priority and frontal sets of the ego vehicle at tick k.
struct Neighbourhood {
  std::vector<int> priority;
  std::vector<int> frontal;
  /// (vehicle id, collision point) pairs where that vehicle precedes the ego.
  /// When absent, every member of `priority` is yielded to at every shared point.
  std::optional<std::vector<std::pair<int, int>>> precedence;
};

QpProblem build_qp(const Agent& ego, const Neighbourhood& nb, const World& world,
                   const Params& params);

/// Stage cost summed over the horizon, evaluated directly on trajectories.
double evaluate_cost(const QpProblem& qp, std::span<const double> u, std::span<const double> delta,
                     const Params& params);

struct Outcome {
  double u = 0.0;
  bool feasible = false;
  qp::Status status = qp::Status::Infeasible;
  double objective = 0.0;
  double kkt = 0.0;
  std::vector<double> inputs;
  std::vector<double> slack;
  int rows = 0;
  int frontal_rows = 0;
  int crossing_rows = 0;
  std::vector<std::string> events;
};

/// Solve and return the first input. Infeasible problems fall back to full
/// braking without reversing, max(a_min, -v/T_s).
Outcome control_step(const Agent& ego, const Neighbourhood& nb, const World& world,
                     const Params& params);

/// True when full braking without reversing keeps the relaxed headway
/// margin to a point `gap` meters ahead at every step of the horizon.
bool can_yield(VehicleState x0, double gap, double a_min, const Params& params);

/// Largest violation of the generated rows by a candidate decision vector.
double max_violation(const QpProblem& qp, const Eigen::VectorXd& x);

}  // namespace gridcross::mpc
