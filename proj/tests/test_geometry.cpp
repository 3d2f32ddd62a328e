#include <doctest.h>

#include <cmath>
#include <numbers>

#include "verigin/error.hpp"
#include "verigin/geometry.hpp"

using namespace verigin;

TEST_CASE("ball volumes and sphere areas") {
  const double pi = std::numbers::pi;
  CHECK(unit_ball_volume(2) == doctest::Approx(pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3));
  CHECK(sphere_area(3, 2.0) == doctest::Approx(16 * pi));
  CHECK(sphere_area(2, 1.5) == doctest::Approx(3 * pi));
  CHECK(shell_volume(3, 1.0, 2.0) == doctest::Approx(28 * pi / 3));
  CHECK(mean_curvature_jump(3, 2.0, 0.5) == doctest::Approx(-0.5));
  // long double instantiation of the templated helpers
  CHECK(static_cast<double>(ball_volume<long double>(3, 1.0L)) == doctest::Approx(4 * pi / 3));
}

TEST_CASE("harmonic multiplicities") {
  CHECK(harmonic_multiplicity(2, 0) == 1);
  for (int l = 1; l < 6; ++l) CHECK(harmonic_multiplicity(2, l) == 2);
  for (int l = 0; l < 6; ++l) CHECK(harmonic_multiplicity(3, l) == 2 * l + 1);
  CHECK(harmonic_multiplicity(4, 2) == 9);
}

TEST_CASE("curvature operator eigenvalues") {
  CHECK(curvature_op_eigenvalue(3, 2.0, 0).value == doctest::Approx(-0.5));
  CHECK(curvature_op_eigenvalue(3, 2.0, 1).value == 0.0);
  CHECK(curvature_op_eigenvalue(2, 0.7, 1).value == 0.0);
  CHECK(curvature_op_eigenvalue(3, 1.0, 2).value == doctest::Approx(4.0));
  CHECK(curvature_op_eigenvalue(3, 1.0, 2).multiplicity == 5);
}

TEST_CASE("concentric topology") {
  RadialGeometry g;
  g.n = 3;
  g.R_out = 3.0;
  g.radii = {1.0, 2.0};
  g.inner_phase = Phase::Two;
  const Topology t = topology(g);
  REQUIRE(t.components.size() == 3);
  CHECK(t.components[0].phase == Phase::Two);
  CHECK(t.components[1].phase == Phase::One);
  CHECK(t.components[2].phase == Phase::Two);
  CHECK(t.interfaces[0].inner == 0);
  CHECK(t.interfaces[0].outer == 1);
  CHECK(t.interfaces[0].orientation == -1);
  CHECK(t.interfaces[1].orientation == 1);
  double volume = 0.0;
  for (const auto& c : t.components) volume += c.volume;
  CHECK(volume == doctest::Approx(ball_volume(3, 3.0)));
}

TEST_CASE("droplet topology and cells") {
  RadialGeometry g;
  g.n = 2;
  g.R_out = 3.0;
  g.radii = {1.0, 0.5};
  g.layout = Layout::Droplets;
  const Topology t = topology(g);
  REQUIRE(t.components.size() == 3);
  CHECK(t.components[2].phase == Phase::Two);
  CHECK(t.components[2].interfaces.size() == 2);
  CHECK(t.interfaces[1].outer == 2);
  // the cells partition the container
  double cells = 0.0;
  for (int k = 0; k < 2; ++k) cells += ball_volume(2, droplet_cell_radius(g, k));
  CHECK(cells == doctest::Approx(ball_volume(2, 3.0)));
}

TEST_CASE("invalid geometries") {
  RadialGeometry g;
  g.n = 3;
  g.R_out = 2.0;
  g.radii = {1.5, 1.0};
  CHECK_THROWS_AS(validate_geometry(g), Error);
  g.radii = {1.0, 2.5};
  CHECK_THROWS_AS(validate_geometry(g), Error);
  g.layout = Layout::Droplets;
  g.radii = {1.8, 1.8};
  CHECK_THROWS_AS(validate_geometry(g), Error);
  g.radii = {1.0};
  CHECK_NOTHROW(validate_geometry(g));
  g.n = 1;
  CHECK_THROWS_AS(validate_geometry(g), Error);
}
