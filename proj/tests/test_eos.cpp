#include <doctest.h>

#include <cmath>

#include "verigin/eos.hpp"
#include "verigin/error.hpp"

using namespace verigin;

namespace {

// pi = rho^3 - 6 rho^2 + 9 rho decreases on (1, 3)
EquationOfState van_der_waals_like() {
  EquationOfState eos;
  eos.family = CustomFreeEnergy{[](double r) { return r * r / 2 - 6 * r + 9 * std::log(r); },
                                [](double r) { return r - 6 + 9 / r; }, [](double r) { return 1 - 9 / (r * r); }};
  eos.range = {0.5, 5.0};
  return eos;
}

}  // namespace

TEST_CASE("ideal gas pressure and free energy") {
  const auto eos = ideal_gas(2.0, 0.5);
  CHECK(pressure_from_density(eos, 3.0) == doctest::Approx(6.0));
  CHECK(free_energy(eos, 1.0) == doctest::Approx(0.5));
  CHECK(density_from_pressure(eos, 6.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(density_slope(eos, 6.0) == doctest::Approx(0.5));
}

TEST_CASE("Maxwell relation against a finite difference of psi") {
  for (const auto& eos : {ideal_gas(1.3, 0.2), power_law(0.8, 1.7, -0.4), power_law(2.0, 0.5)}) {
    for (double rho : {0.05, 0.7, 3.0, 40.0}) {
      const double h = 1e-6 * rho;
      const double dpsi = (free_energy(eos, rho + h) - free_energy(eos, rho - h)) / (2 * h);
      CHECK(pressure_from_density(eos, rho) == doctest::Approx(rho * rho * dpsi).epsilon(1e-7));
    }
  }
}

TEST_CASE("Gibbs potential derivative is pi'/rho") {
  for (const auto& eos : {ideal_gas(1.0), power_law(1.0, 2.0), power_law(3.0, 0.3)}) {
    for (double rho : {0.1, 1.0, 10.0}) {
      const double h = 1e-5 * rho;
      const double dphi = (gibbs_phi(eos, rho + h) - gibbs_phi(eos, rho - h)) / (2 * h);
      CHECK(dphi == doctest::Approx(pressure_slope(eos, rho) / rho).epsilon(1e-8));
    }
  }
}

TEST_CASE("density round trip over the window") {
  const auto eos = power_law(1.5, 1.4, 0.0, {1e-3, 1e3});
  for (int i = 0; i < 50; ++i) {
    const double rho = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
    CHECK(density_from_pressure(eos, pressure_from_density(eos, rho)) == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("custom free energy with the d offset") {
  auto eos = van_der_waals_like();
  eos.d = 2.0;
  CHECK(free_energy(eos, 1.0) == doctest::Approx(0.5 - 6 + 2.0));
  CHECK(pressure_from_density(eos, 2.0) == doctest::Approx(8 - 24 + 18));
}

TEST_CASE("validation flags a non-monotone pressure") {
  const auto rep = validate_eos(van_der_waals_like(), 200);
  CHECK_FALSE(rep.passed);
  CHECK(rep.min_value < 0.0);
  CHECK(rep.min_location > 1.0);
  CHECK(rep.min_location < 3.0);
  CHECK(validate_eos(ideal_gas(1.0), 200).passed);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(power_law(1.0, 1.0), Error);
  const auto eos = ideal_gas(1.0, 0.0, {0.1, 10.0});
  try {
    free_energy(eos, 20.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DensityOutOfRange);
  }
  try {
    density_from_pressure(eos, 100.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PressureOutOfRange);
  }
}
