#include <doctest.h>

#include <cmath>
#include <random>

#include "gridcross/geometry.hpp"
#include "oracles.hpp"

using namespace gridcross;

namespace {

const double kPi = std::acos(-1.0);

Segment random_segment(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-10.0, 10.0), radius(1.0, 8.0), angle(-kPi, kPi),
      sweep(0.3, 2.0 * kPi - 0.3);
  if (rng() % 2 == 0) return Segment::line({coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {});
  const double sw = sweep(rng) * (rng() % 2 == 0 ? 1.0 : -1.0);
  return Segment::arc({coord(rng), coord(rng)}, radius(rng), angle(rng), sw, {});
}

bool covers(const std::vector<Vec2>& pts, Vec2 p, double tol) {
  for (Vec2 q : pts) {
    if (distance(p, q) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("segment parameterization is by arc length") {
  const Segment l = Segment::line({0, 0}, {3, 4}, {});
  CHECK(l.length() == doctest::Approx(5.0));
  CHECK(l.point_at(2.5).x == doctest::Approx(1.5));
  const Segment a = Segment::arc({0, 0}, 2.0, 0.0, kPi / 2, {});
  CHECK(a.length() == doctest::Approx(kPi));
  const Vec2 mid = a.point_at(a.length() / 2);
  CHECK(mid.x == doctest::Approx(std::sqrt(2.0)));
  CHECK(mid.y == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.tangent_at(0.0).y == doctest::Approx(1.0));
  const Segment cw = Segment::arc({0, 0}, 2.0, 0.0, -kPi / 2, {});
  CHECK(cw.end().y == doctest::Approx(-2.0));
}

TEST_CASE("projection inverts point_at") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const Segment s = random_segment(rng);
    const double t = std::uniform_real_distribution<double>(0.0, s.length())(rng);
    const auto back = s.project(s.point_at(t), 1e-9);
    REQUIRE(back.has_value());
    CHECK(*back == doctest::Approx(t).epsilon(1e-9));
    CHECK(s.distance_to(s.point_at(t)) < 1e-9);
  }
}

TEST_CASE("crossings agree with the sampling oracle") {
  std::mt19937_64 rng(11);
  int nonempty = 0;
  for (int k = 0; k < 300; ++k) {
    const Segment a = random_segment(rng);
    const Segment b = random_segment(rng);
    const auto got = intersect(a, b);
    const auto want = oracle::crossings(a, b);
    nonempty += !want.empty();
    CAPTURE(k);
    for (Vec2 p : want) CHECK(covers(got, p, 1e-6));
    for (Vec2 p : got) {
      CHECK(a.distance_to(p) < 1e-7);
      CHECK(b.distance_to(p) < 1e-7);
    }
    CHECK(got.size() == want.size());
  }
  CHECK(nonempty > 30);
}

TEST_CASE("collinear overlap reports the overlap ends") {
  const Segment a = Segment::line({0, 0}, {10, 0}, {});
  const Segment b = Segment::line({4, 0}, {14, 0}, {});
  const auto got = intersect(a, b);
  REQUIRE(got.size() == 2);
  CHECK(covers(got, {4, 0}, 1e-9));
  CHECK(covers(got, {10, 0}, 1e-9));
  CHECK(intersect(a, Segment::line({0, 1}, {10, 1}, {})).empty());
}
