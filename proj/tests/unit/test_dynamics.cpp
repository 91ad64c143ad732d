#include <doctest.h>

#include <cmath>
#include <random>

#include "gridcross/dynamics.hpp"
#include "oracles.hpp"

using namespace gridcross;

TEST_CASE("one step uses the pre-update speed for position") {
  const VehicleState s = step({10.0, 4.0}, 2.0, 0.25);
  CHECK(s.p == 11.0);
  CHECK(s.v == 4.5);
}

TEST_CASE("constant-input rollouts match the closed form") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p0(0.0, 100.0), v0(0.0, 20.0), u(-9.0, 5.0);
  for (long n : {1L, 2L, 10L, 1000L, 10000L}) {
    for (int trial = 0; trial < 20; ++trial) {
      VehicleState s{p0(rng), v0(rng)};
      const VehicleState start = s;
      const double a = u(rng);
      for (long k = 0; k < n; ++k) s = step(s, a, 0.25);
      const auto want = oracle::closed_form(start.p, start.v, a, 0.25, n);
      CHECK(std::abs(s.p - want.p) <= 1e-12 * std::max(1.0, std::abs(want.p)));
      CHECK(std::abs(s.v - want.v) <= 1e-12 * std::max(1.0, std::abs(want.v)));
    }
  }
}

TEST_CASE("vehicle parameters reject inverted limits") {
  VehicleParams p;
  CHECK_NOTHROW(p.validate());
  p.a_min = 1.0;
  CHECK_THROWS(p.validate());
  p = {};
  p.v_ref = -1.0;
  CHECK_THROWS(p.validate());
}
