#pragma once

#include <Eigen/Dense>

namespace gridcross::qp {

/// minimize 0.5 x'Px + c'x + constant  subject to  A x >= b.
/// P must be positive semidefinite; variables with zero curvature must be
/// bounded by the constraints.
struct Problem {
  Eigen::MatrixXd P;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double constant = 0.0;

  Eigen::Index variables() const { return c.size(); }
  Eigen::Index constraints() const { return b.size(); }
  double objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(P * x) + c.dot(x) + constant; }
};

enum class Status { Optimal, Infeasible, MaxIterations };

const char* to_string(Status s);

struct Settings {
  int max_iterations = 500;     ///< active-set changes per inner solve
  int max_outer = 60;           ///< proximal rounds for zero-curvature variables
  double prox_weight = 1e-3;
  double violation_tol = 1e-11; ///< scaled constraint violation accepted as satisfied
};

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  double max() const;
};

struct Solution {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;  ///< one per constraint row, zero when inactive
  double objective = 0.0;
  int iterations = 0;
};

/// Residuals of the first-order optimality conditions, infinity norms.
KktResiduals kkt_residuals(const Problem& qp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& multipliers);

/// Dense dual active-set solve (Goldfarb-Idnani). Variables whose Hessian
/// rows vanish are handled by proximal-point rounds that reach the exact
/// optimum of the original problem once the active set settles.
Solution solve(const Problem& qp, const Settings& settings = {});

}  // namespace gridcross::qp
