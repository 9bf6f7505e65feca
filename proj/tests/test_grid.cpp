#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fbl/error.hpp"
#include "fbl/grid.hpp"

using namespace fbl;
using std::numbers::pi;

TEST_CASE("cell-centered nodes and weights") {
  const Grid g = build_grid(1, 1.0, 4);
  CHECK(g.spacing == 0.5);
  CHECK(g.node(0)[0] == -0.75);
  CHECK(g.node(1)[0] == -0.25);
  CHECK(g.node(2)[0] == 0.25);
  CHECK(g.node(3)[0] == 0.75);

  const Grid g1 = build_grid(1, 2.3, 37);
  CHECK(g1.weight * static_cast<double>(g1.size()) == doctest::Approx(4.6));

  const Grid g2 = build_grid(2, 3.0, 64);
  CHECK(g2.size() == 4096);
  CHECK(g2.weight == doctest::Approx((6.0 / 64) * (6.0 / 64)));
  // flat index i + M j
  CHECK(g2.node(1)[0] > g2.node(0)[0]);
  CHECK(g2.node(64)[1] > g2.node(0)[1]);
  CHECK(g2.node(64)[0] == g2.node(0)[0]);

  CHECK_THROWS_AS(build_grid(3, 1.0, 4), Error);
  CHECK_THROWS_AS(build_grid(1, -1.0, 4), Error);
  CHECK(build_grid(1, 1.0, 4).fingerprint() != build_grid(1, 1.0, 6).fingerprint());
}

TEST_CASE("region masks") {
  const Grid g = build_grid(1, 1.0, 4);
  const Mask m = region_mask(g, Region::interval(-0.5, 0.5));
  REQUIRE(m.size() == 2);
  CHECK(g.node(m.indices[0])[0] == -0.25);
  CHECK(g.node(m.indices[1])[0] == 0.25);
  CHECK(region_mask(g, Region::interval(-5, 5)).size() == 4);
  CHECK(full_mask(g).size() == 4);
  CHECK(mask_complement(g, m).size() == 2);
  CHECK(mask_intersection(m, full_mask(g)).indices == m.indices);

  const Grid d = build_grid(2, 3.0, 64);
  const Mask disk = region_mask(d, Region::disk({0.0, 0.0}, 1.0));
  CHECK(std::abs(static_cast<double>(disk.size()) * d.weight - pi) <= 3.0 * d.spacing);
}

TEST_CASE("region geometry") {
  CHECK(Region::interval(-0.5, 0.5).boundary_measure() == 2.0);
  CHECK(Region::disk({0, 0}, 0.5).boundary_measure() == doctest::Approx(pi));
  CHECK(Region::rectangle({0, 0}, {1, 2}).boundary_measure() == doctest::Approx(6.0));
  CHECK(Region::annulus({0, 0}, 0.2, 0.4).boundary_measure() == doctest::Approx(2 * pi * 0.6));
  const Region u = Region::union_of(Region::interval(-1, -0.5), Region::interval(0.5, 1));
  CHECK(u.contains({0.7, 0}));
  CHECK_FALSE(u.contains({0.0, 0}));
  CHECK(u.boundary_points_1d().size() == 4);

  const Region disk = Region::disk({0.1, -0.2}, 0.5);
  CHECK(disk.defining_function({0.1, -0.2}) < 0.0);
  CHECK(disk.defining_function({0.6, -0.2}) == doctest::Approx(0.0).epsilon(1e-12));
  // boundary parametrization integrates to the perimeter
  double len = 0.0;
  const int n = 1000;
  for (std::size_t p = 0; p < disk.boundary_piece_count(); ++p)
    for (int k = 0; k < n; ++k) len += disk.boundary_point(p, (k + 0.5) / n).speed / n;
  CHECK(len == doctest::Approx(pi));
  CHECK_THROWS_AS(Region::interval(1, 0), Error);
  CHECK_THROWS_AS(Region::annulus({0, 0}, 0.5, 0.2), Error);
}

TEST_CASE("collision volume: 1D exact sum is r^2 up to O(h r)") {
  const Grid g = build_grid(1, 1.0, 4000);
  const Region omega = Region::interval(-0.3, 0.4);
  for (double r : {0.01, 0.05, 0.2}) {
    const auto v = boundary_collision_volume(g, omega, r, 0);
    CHECK(v.std_error == 0.0);
    CHECK(std::abs(v.value - r * r) <= 2.0 * g.spacing * r);
    const auto s = boundary_collision_volume_swapped(g, omega, r);
    CHECK(s.value == doctest::Approx(v.value).epsilon(1e-12));
  }
  CHECK(boundary_collision_volume(g, omega, 1e-6, 0).value <= 1e-9);
}

TEST_CASE("collision volume: 2D disk approaches (2/3) |dOmega| r^3") {
  // half-plane limit: int_0^r (segment area at depth s) ds = 2 r^3 / 3
  const Grid g = build_grid(2, 1.0, 64);
  const Region disk = Region::disk({0.0, 0.0}, 0.5);
  const double r = 0.02;
  const auto v = boundary_collision_volume(g, disk, r, 2000000, 11);
  const double c = v.value / (disk.boundary_measure() * r * r * r);
  CHECK(std::abs(c - 2.0 / 3.0) <= 4.0 * v.std_error / (disk.boundary_measure() * r * r * r) + 0.02);
  CHECK_THROWS_AS(boundary_collision_volume(g, disk, r, 100), Error);
}
