#include <doctest.h>

#include <random>

#include "gridcross/qp.hpp"
#include "oracles.hpp"

using namespace gridcross::qp;

namespace {

// Random convex problem with box rows, a few general rows, and optionally
// some variables without curvature.
Problem random_problem(std::mt19937_64& rng, int n, int general, int flat) {
  std::normal_distribution<double> g(0.0, 1.0);
  Problem qp;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = g(rng);
  qp.P = M * M.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < flat; ++i) {
    qp.P.row(n - 1 - i).setZero();
    qp.P.col(n - 1 - i).setZero();
  }
  qp.c = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) qp.c[i] = 3.0 * g(rng);
  const int m = 2 * n + general;
  qp.A = Eigen::MatrixXd::Zero(m, n);
  qp.b = Eigen::VectorXd(m);
  for (int i = 0; i < n; ++i) {
    qp.A(2 * i, i) = 1.0;
    qp.b[2 * i] = -2.0;
    qp.A(2 * i + 1, i) = -1.0;
    qp.b[2 * i + 1] = -2.0;
  }
  for (int k = 0; k < general; ++k) {
    for (int i = 0; i < n; ++i) qp.A(2 * n + k, i) = g(rng);
    qp.b[2 * n + k] = -0.5 + 0.3 * g(rng);
  }
  return qp;
}

}  // namespace

TEST_CASE("unconstrained minimum of a strictly convex problem") {
  Problem qp;
  qp.P = Eigen::Matrix2d{{2.0, 0.0}, {0.0, 4.0}};
  qp.c = Eigen::Vector2d{-2.0, -4.0};
  qp.A = Eigen::MatrixXd(0, 2);
  qp.b = Eigen::VectorXd(0);
  const Solution s = solve(qp);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(1.0));
  CHECK(s.objective == doctest::Approx(-3.0));
}

TEST_CASE("a binding row has a positive multiplier") {
  Problem qp;
  qp.P = Eigen::Matrix2d::Identity() * 2.0;
  qp.c = Eigen::Vector2d::Zero();
  qp.A = Eigen::RowVector2d{1.0, 1.0};
  qp.b = Eigen::VectorXd::Constant(1, 2.0);
  const Solution s = solve(qp);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.multipliers[0] == doctest::Approx(2.0));
  CHECK(kkt_residuals(qp, s.x, s.multipliers).max() < 1e-10);
}

TEST_CASE("contradictory rows are infeasible") {
  Problem qp;
  qp.P = Eigen::MatrixXd::Identity(1, 1);
  qp.c = Eigen::VectorXd::Zero(1);
  qp.A = Eigen::MatrixXd(2, 1);
  qp.A << 1.0, -1.0;
  qp.b = Eigen::Vector2d{1.0, 0.0};
  CHECK(solve(qp).status == Status::Infeasible);
}

TEST_CASE("linear variables are solved exactly") {
  Problem qp;
  qp.P = Eigen::Matrix2d{{1.0, 0.0}, {0.0, 0.0}};
  qp.c = Eigen::Vector2d{0.0, -1.0};
  qp.A = Eigen::MatrixXd(2, 2);
  qp.A << 0.0, -1.0, -1.0, -1.0;
  qp.b = Eigen::Vector2d{-3.0, -4.0};
  const Solution s = solve(qp);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x[1] == doctest::Approx(3.0));
  CHECK(s.x[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(kkt_residuals(qp, s.x, s.multipliers).max() < 1e-8);
}

TEST_CASE("random problems match the barrier oracle") {
  std::mt19937_64 rng(99);
  int compared = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int flat = trial % 3 == 0 ? static_cast<int>(rng() % 2) + 1 : 0;
    const Problem qp = random_problem(rng, n, static_cast<int>(rng() % 5), std::min(flat, n - 1));
    const Solution s = solve(qp);
    const auto ref = oracle::solve_qp(qp);
    CAPTURE(trial);
    if (!ref) {
      CHECK(s.status != Status::Optimal);
      continue;
    }
    REQUIRE(s.status == Status::Optimal);
    ++compared;
    CHECK(kkt_residuals(qp, s.x, s.multipliers).max() < 1e-6);
    CHECK(s.objective <= ref->objective + 1e-6 * std::max(1.0, std::abs(ref->objective)));
    CHECK(std::abs(s.objective - ref->objective) < 1e-3);
  }
  CHECK(compared > 100);
}
