#include "gridcross/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gridcross::qp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StrictResult {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
  int iterations = 0;
};

// Goldfarb-Idnani for strictly convex G. The reduced quantities are rebuilt
// from a QR factorization each step; problem sizes here are tiny.
StrictResult solve_strict(const Eigen::MatrixXd& G, const Eigen::VectorXd& g,
                          const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Settings& settings) {
  const Eigen::Index n = g.size();
  const Eigen::Index m = b.size();
  StrictResult out;
  out.multipliers = Eigen::VectorXd::Zero(m);

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) return out;
  const Eigen::MatrixXd L = llt.matrixL();
  // J = L^{-T}, so that J J' = G^{-1}.
  const Eigen::MatrixXd J =
      L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(n, n));

  Eigen::VectorXd x = -llt.solve(g);
  std::vector<Eigen::Index> active;
  std::vector<double> u;

  Eigen::VectorXd row_norm(m);
  for (Eigen::Index i = 0; i < m; ++i) row_norm[i] = std::max(A.row(i).norm(), 1e-300);

  auto is_active = [&](Eigen::Index i) {
    return std::find(active.begin(), active.end(), i) != active.end();
  };

  int iterations = 0;
  while (true) {
    // Pick the most violated inactive constraint.
    Eigen::Index p = -1;
    double worst = -settings.violation_tol;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (is_active(i)) continue;
      const double s = (A.row(i).dot(x) - b[i]) / row_norm[i];
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) break;

    const Eigen::VectorXd np = A.row(p).transpose();
    double u_plus = 0.0;
    while (true) {
      if (++iterations > settings.max_iterations) {
        out.status = Status::MaxIterations;
        out.x = x;
        out.iterations = iterations;
        return out;
      }
      const auto q = static_cast<Eigen::Index>(active.size());
      Eigen::VectorXd z;
      Eigen::VectorXd r(q);
      if (q == 0) {
        z = J * (J.transpose() * np);
      } else {
        Eigen::MatrixXd N(n, q);
        for (Eigen::Index k = 0; k < q; ++k) N.col(k) = A.row(active[static_cast<std::size_t>(k)]).transpose();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(J.transpose() * N);
        const Eigen::MatrixXd Q = qr.householderQ();
        const Eigen::MatrixXd JQ = J * Q;
        const Eigen::VectorXd d = JQ.transpose() * np;
        z = JQ.rightCols(n - q) * d.tail(n - q);
        const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
        r = R.triangularView<Eigen::Upper>().solve(d.head(q));
      }

      // Partial step: largest dual step keeping active multipliers >= 0.
      double t1 = kInf;
      Eigen::Index drop = -1;
      for (Eigen::Index k = 0; k < q; ++k) {
        if (r[k] > 0.0) {
          const double ratio = u[static_cast<std::size_t>(k)] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      // Full step: primal step making constraint p active.
      double t2 = kInf;
      const double zn = z.dot(np);
      if (z.norm() > 1e-12 * (1.0 + np.norm()) && zn > 0.0) {
        t2 = -(np.dot(x) - b[p]) / zn;
      }
      const double t = std::min(t1, t2);
      if (t == kInf) {
        out.status = Status::Infeasible;
        out.x = x;
        out.iterations = iterations;
        return out;
      }

      for (Eigen::Index k = 0; k < q; ++k) u[static_cast<std::size_t>(k)] -= t * r[k];
      u_plus += t;
      if (t2 < kInf) x += t * z;

      if (t2 <= t1) {
        active.push_back(p);
        u.push_back(u_plus);
        break;
      }
      active.erase(active.begin() + drop);
      u.erase(u.begin() + drop);
    }
  }

  out.status = Status::Optimal;
  out.x = x;
  for (std::size_t k = 0; k < active.size(); ++k) out.multipliers[active[k]] = std::max(u[k], 0.0);
  out.iterations = iterations;
  return out;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::MaxIterations: return "max_iterations";
  }
  return "?";
}

double KktResiduals::max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

KktResiduals kkt_residuals(const Problem& qp, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& multipliers) {
  KktResiduals res;
  const Eigen::VectorXd grad = qp.P * x + qp.c - qp.A.transpose() * multipliers;
  res.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < qp.constraints(); ++i) {
    const double slack = qp.A.row(i).dot(x) - qp.b[i];
    res.primal = std::max(res.primal, -slack);
    res.dual = std::max(res.dual, -multipliers[i]);
    res.complementarity = std::max(res.complementarity, std::abs(multipliers[i] * slack));
  }
  return res;
}

Solution solve(const Problem& qp, const Settings& settings) {
  const Eigen::Index n = qp.variables();
  Solution sol;

  // Variables with an identically zero Hessian row get a proximal term.
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(n);
  const double scale = std::max(1.0, qp.P.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (qp.P.row(i).cwiseAbs().maxCoeff() <= 1e-14 * scale) mask[i] = 1.0;
  }
  const bool needs_prox = mask.sum() > 0.0 ||
                          Eigen::LLT<Eigen::MatrixXd>(qp.P).info() != Eigen::Success;
  if (needs_prox && mask.sum() == 0.0) mask.setOnes();

  if (!needs_prox) {
    StrictResult r = solve_strict(qp.P, qp.c, qp.A, qp.b, settings);
    sol.status = r.status;
    sol.x = std::move(r.x);
    sol.multipliers = std::move(r.multipliers);
    sol.iterations = r.iterations;
    sol.objective = sol.x.size() ? qp.objective(sol.x) : 0.0;
    return sol;
  }

  const Eigen::MatrixXd G = qp.P + Eigen::MatrixXd(settings.prox_weight * mask.asDiagonal());
  Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
  int total = 0;
  for (int round = 0; round < settings.max_outer; ++round) {
    const Eigen::VectorXd g = qp.c - settings.prox_weight * mask.cwiseProduct(center);
    StrictResult r = solve_strict(G, g, qp.A, qp.b, settings);
    total += r.iterations;
    sol.status = r.status;
    sol.iterations = total;
    if (r.status != Status::Optimal) {
      sol.x = std::move(r.x);
      sol.multipliers = Eigen::VectorXd::Zero(qp.constraints());
      sol.objective = 0.0;
      return sol;
    }
    const double moved = (mask.cwiseProduct(r.x - center)).cwiseAbs().maxCoeff();
    sol.x = std::move(r.x);
    sol.multipliers = std::move(r.multipliers);
    if (moved <= 1e-12 * (1.0 + sol.x.cwiseAbs().maxCoeff())) break;
    center = sol.x;
    if (round + 1 == settings.max_outer) sol.status = Status::MaxIterations;
  }
  sol.objective = qp.objective(sol.x);
  return sol;
}

}  // namespace gridcross::qp
