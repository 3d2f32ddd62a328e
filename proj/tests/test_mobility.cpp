#include <doctest.h>

#include <cmath>
#include <random>

#include "verigin/error.hpp"
#include "verigin/mobility.hpp"

using namespace verigin;

TEST_CASE("Darcy presets") {
  CHECK(effective_permeability(darcy_const(2.5), 1.0, 7.0) == 2.5);
  CHECK(effective_permeability(darcy_affine(1.0, 0.5), 1.0, 4.0) == doctest::Approx(3.0));
  Eigen::Vector3d g(1.0, -2.0, 0.5);
  CHECK((velocity(darcy_const(2.0), 1.0, g) + 2.0 * g).norm() == doctest::Approx(0.0));
}

TEST_CASE("Forchheimer inversion solves g(w) w = l |grad pi|") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double l = 0.1 + 3.0 * U(rng);
    const double grad = std::pow(10.0, -4.0 + 7.0 * U(rng));
    const auto law = forchheimer_linear(l, 1.0, 1.0);
    const double w = effective_permeability(law, 0.0, grad * grad) * grad;
    CHECK(std::abs((1.0 + w) * w - l * grad) <= 1e-10 * l * grad);
  }
}

TEST_CASE("constant drag reduces to Darcy") {
  for (double grad : {0.0, 1e-3, 1.0, 250.0}) {
    CHECK(effective_permeability(forchheimer_linear(1.5, 3.0, 0.0), 1.0, grad * grad) ==
          effective_permeability(darcy_const(1.5 / 3.0), 1.0, grad * grad));
  }
}

TEST_CASE("ellipticity window") {
  EllipticityWindow w{0.5, 2.0, 0.0, 100.0};
  CHECK(validate_ellipticity(forchheimer_linear(1.0, 1.0, 2.0), w, 10).passed);
  CHECK(validate_ellipticity(darcy_affine(1.0, 0.1), w, 10).passed);
  // k = 1 - 0.2 s loses ellipticity where k + 2 s k' = 1 - 0.6 s < 0
  const auto bad = darcy_affine(1.0, -0.2);
  const auto rep = validate_ellipticity(bad, {1.0, 1.0, 0.0, 4.0}, 10);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("negative s is rejected") {
  CHECK_THROWS_AS(effective_permeability(darcy_const(1.0), 1.0, -1.0), Error);
}
