// eos.hpp
#ifndef VERIGIN_EOS_HPP
#define VERIGIN_EOS_HPP

#include <functional>
#include <string>
#include <variant>

namespace verigin {

/// pi(rho) = c rho, psi(rho) = c log(rho) + d.
struct IdealGas {
  double c = 1.0;
};

/// pi(rho) = c rho^r, psi(rho) = c/(r-1) rho^(r-1) + d, r != 1.
struct PowerLaw {
  double c = 1.0;
  double r = 2.0;
};

/// Free energy supplied together with its first two derivatives so that the
/// pressure slope is exact.
struct CustomFreeEnergy {
  std::function<double(double)> psi;
  std::function<double(double)> dpsi;
  std::function<double(double)> d2psi;
};

struct DensityRange {
  double min = 1e-6;
  double max = 1e6;
};

/// Free energy psi(rho) of one phase, the pressure it induces through Maxwell's
/// relation pi = rho^2 psi'(rho), and the operating window of densities.
struct EquationOfState {
  std::variant<IdealGas, PowerLaw, CustomFreeEnergy> family;
  double d = 0.0;  ///< additive free-energy offset (energy per mass)
  DensityRange range;

  std::string family_name() const;
};

EquationOfState ideal_gas(double c, double d = 0.0, DensityRange range = {});
EquationOfState power_law(double c, double r, double d = 0.0, DensityRange range = {});

double free_energy(const EquationOfState& eos, double rho);
double free_energy_derivative(const EquationOfState& eos, double rho);
double free_energy_second_derivative(const EquationOfState& eos, double rho);

/// Maxwell's relation rho^2 psi'(rho).
double pressure_from_density(const EquationOfState& eos, double rho);

/// d pi / d rho = 2 rho psi' + rho^2 psi''.
double pressure_slope(const EquationOfState& eos, double rho);

/// Inverse of pressure_from_density on the density window, relative tolerance
/// 1e-12, Newton safeguarded by bisection (at most 100 iterations).
double density_from_pressure(const EquationOfState& eos, double pressure);

/// d rho / d pi evaluated at a pressure.
double density_slope(const EquationOfState& eos, double pressure);

/// Gibbs potential psi + rho psi'; its derivative is pi'(rho)/rho.
double gibbs_phi(const EquationOfState& eos, double rho);

struct ValidationReport {
  bool passed = false;
  double min_value = 0.0;        ///< smallest sampled value of the monitored quantity
  double min_location = 0.0;     ///< sample location where it occurred
  double min_secondary = 0.0;    ///< secondary monitored quantity (density for EOS checks)
  std::string message;
};

/// Samples the density window uniformly and checks pi'(rho) > 0 and rho > 0.
ValidationReport validate_eos(const EquationOfState& eos, int samples);

}  // namespace verigin

#endif  // VERIGIN_EOS_HPP
