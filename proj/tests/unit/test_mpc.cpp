#include <doctest.h>

#include <random>

#include "gridcross/error.hpp"
#include "gridcross/mpc.hpp"
#include "mpc_cases.hpp"

using namespace gridcross;
using namespace gridcross::mpc;

namespace {

const oracle::MpcCases& cases() {
  static const oracle::MpcCases c(10);
  return c;
}

Agent ego_at(double p, double v) {
  Agent a;
  a.id = 1;
  a.path = 0;
  a.state = {p, v};
  a.params.v_ref = 15.0;
  return a;
}

}  // namespace

TEST_CASE("condensed maps reproduce stepped rollouts") {
  const Params params;
  const std::vector<Agent> agents{ego_at(3.0, 7.0)};
  const mpc::World w{agents, cases().catalog().paths, nullptr};
  const QpProblem qp = build_qp(agents[0], {}, w, params);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-9.0, 5.0);
  Eigen::VectorXd in(params.horizon + 1);
  for (auto& x : in) x = u(rng);
  const Eigen::VectorXd p = qp.pos_map * in + qp.pos_free;
  const Eigen::VectorXd v = qp.speed_map * in + qp.speed_free;
  VehicleState s = agents[0].state;
  for (int t = 0; t <= params.horizon; ++t) {
    CHECK(p[t] == doctest::Approx(s.p).epsilon(1e-12));
    CHECK(v[t] == doctest::Approx(s.v).epsilon(1e-12));
    s = step(s, in[t], params.ts);
  }
}

TEST_CASE("the quadratic form equals the stage cost") {
  const Params params;
  const std::vector<Agent> agents{ego_at(3.0, 7.0)};
  const mpc::World w{agents, cases().catalog().paths, nullptr};
  const QpProblem qp = build_qp(agents[0], {}, w, params);
  const int N = params.horizon + 1;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(2 * N);
    for (auto& e : x) e = g(rng);
    const std::vector<double> u(x.data(), x.data() + N), d(x.data() + N, x.data() + 2 * N);
    CHECK(qp.problem.objective(x) == doctest::Approx(evaluate_cost(qp, u, d, params)).epsilon(1e-10));
  }
}

TEST_CASE("a free road has only box rows and accelerates toward the reference") {
  const Params params;
  const std::vector<Agent> agents{ego_at(3.0, 7.0)};
  const mpc::World w{agents, cases().catalog().paths, nullptr};
  const QpProblem qp = build_qp(agents[0], {}, w, params);
  CHECK(qp.problem.constraints() == 6 * (params.horizon + 1));
  CHECK(qp.count(RowTag::Kind::Frontal) == 0);
  const Outcome out = control_step(agents[0], {}, w, params);
  REQUIRE(out.feasible);
  CHECK(out.u > 0.0);
  CHECK(out.kkt < 1e-6);
}

TEST_CASE("a stopped leader produces frontal rows that hold") {
  const Params params;
  std::vector<Agent> agents{ego_at(3.0, 14.0), ego_at(40.0, 0.0)};
  agents[1].id = 2;
  const mpc::World w{agents, cases().catalog().paths, &cases().catalog().registry};
  Neighbourhood nb;
  nb.frontal = {2};
  const QpProblem qp = build_qp(agents[0], nb, w, params);
  CHECK(qp.count(RowTag::Kind::Frontal) == params.horizon + 1);
  const auto sol = qp::solve(qp.problem);
  REQUIRE(sol.status == qp::Status::Optimal);
  CHECK(oracle::replay_violation(qp, sol.x, params, -9.0, 5.0) < 1e-8);
  CHECK(sol.x[0] < 0.0);
}

TEST_CASE("an unavoidable conflict brakes fully without reversing") {
  const Params params;
  std::vector<Agent> agents{ego_at(3.0, 20.0), ego_at(6.0, 0.0)};
  agents[1].id = 2;
  const mpc::World w{agents, cases().catalog().paths, &cases().catalog().registry};
  Neighbourhood nb;
  nb.frontal = {2};
  const Outcome out = control_step(agents[0], nb, w, params);
  CHECK_FALSE(out.feasible);
  CHECK(out.u == -9.0);
  CHECK(std::find(out.events.begin(), out.events.end(), "infeasible_mpc") != out.events.end());
  std::vector<Agent> slow{ego_at(3.0, 0.4), ego_at(30.0, 0.0)};
  const Outcome gentle = control_step(slow[0], {}, mpc::World{slow, cases().catalog().paths, nullptr}, params);
  CHECK(gentle.u >= -0.4 / params.ts - 1e-12);
}

TEST_CASE("can_yield matches full braking distance") {
  const Params params;
  CHECK(can_yield({0.0, 0.0}, params.min_distance + 0.01, -9.0, params));
  CHECK_FALSE(can_yield({0.0, 14.0}, 5.0, -9.0, params));
  CHECK(can_yield({0.0, 14.0}, 40.0, -9.0, params));
}

TEST_CASE("random controller instances satisfy optimality and replay") {
  std::mt19937_64 rng(17);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto c = cases().draw(rng, 2);
    const QpProblem qp = build_qp(c.agents[0], c.nb, cases().world(c), c.params);
    const auto sol = qp::solve(qp.problem);
    if (sol.status != qp::Status::Optimal) continue;
    ++solved;
    CAPTURE(trial);
    CHECK(qp::kkt_residuals(qp.problem, sol.x, sol.multipliers).max() < 1e-6);
    CHECK(oracle::replay_violation(qp, sol.x, c.params, -9.0, 5.0) < 1e-8);
    CHECK(max_violation(qp, sol.x) < 1e-8);
  }
  CHECK(solved > 40);
}

TEST_CASE("parameters are validated by key") {
  Params p;
  p.ts = 0.0;
  try {
    p.validate();
    FAIL("expected an error");
  } catch (const InvalidConfiguration& e) {
    CHECK(e.key() == "sampling_time_s");
  }
  p = {};
  p.v_max = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidConfiguration);
}
