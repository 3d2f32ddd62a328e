// eos.cpp
#include "verigin/eos.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "verigin/detail/roots.hpp"
#include "verigin/error.hpp"

namespace verigin {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_in_range(const EquationOfState& eos, double rho) {
  if (!(rho >= eos.range.min && rho <= eos.range.max)) {
    std::ostringstream os;
    os << "density " << rho << " outside [" << eos.range.min << ", " << eos.range.max << "]";
    throw Error(ErrorKind::DensityOutOfRange, os.str());
  }
}

}  // namespace

std::string EquationOfState::family_name() const {
  return std::visit(Overloaded{[](const IdealGas&) { return std::string("ideal-gas"); },
                               [](const PowerLaw&) { return std::string("power-law"); },
                               [](const CustomFreeEnergy&) { return std::string("custom"); }},
                    family);
}

EquationOfState ideal_gas(double c, double d, DensityRange range) {
  return EquationOfState{IdealGas{c}, d, range};
}

EquationOfState power_law(double c, double r, double d, DensityRange range) {
  if (r == 1.0) throw Error(ErrorKind::InvalidArgument, "power-law exponent must differ from 1");
  return EquationOfState{PowerLaw{c, r}, d, range};
}

double free_energy(const EquationOfState& eos, double rho) {
  require_in_range(eos, rho);
  const double base = std::visit(
      Overloaded{[&](const IdealGas& g) { return g.c * std::log(rho); },
                 [&](const PowerLaw& p) { return p.c / (p.r - 1.0) * std::pow(rho, p.r - 1.0); },
                 [&](const CustomFreeEnergy& f) { return f.psi(rho); }},
      eos.family);
  return base + eos.d;
}

double free_energy_derivative(const EquationOfState& eos, double rho) {
  require_in_range(eos, rho);
  return std::visit(Overloaded{[&](const IdealGas& g) { return g.c / rho; },
                               [&](const PowerLaw& p) { return p.c * std::pow(rho, p.r - 2.0); },
                               [&](const CustomFreeEnergy& f) { return f.dpsi(rho); }},
                    eos.family);
}

double free_energy_second_derivative(const EquationOfState& eos, double rho) {
  require_in_range(eos, rho);
  return std::visit(
      Overloaded{[&](const IdealGas& g) { return -g.c / (rho * rho); },
                 [&](const PowerLaw& p) { return p.c * (p.r - 2.0) * std::pow(rho, p.r - 3.0); },
                 [&](const CustomFreeEnergy& f) { return f.d2psi(rho); }},
      eos.family);
}

double pressure_from_density(const EquationOfState& eos, double rho) {
  require_in_range(eos, rho);
  return std::visit(Overloaded{[&](const IdealGas& g) { return g.c * rho; },
                               [&](const PowerLaw& p) { return p.c * std::pow(rho, p.r); },
                               [&](const CustomFreeEnergy& f) { return rho * rho * f.dpsi(rho); }},
                    eos.family);
}

double pressure_slope(const EquationOfState& eos, double rho) {
  require_in_range(eos, rho);
  return std::visit(
      Overloaded{[&](const IdealGas& g) { return g.c; },
                 [&](const PowerLaw& p) { return p.c * p.r * std::pow(rho, p.r - 1.0); },
                 [&](const CustomFreeEnergy& f) {
                   return 2.0 * rho * f.dpsi(rho) + rho * rho * f.d2psi(rho);
                 }},
      eos.family);
}

double density_from_pressure(const EquationOfState& eos, double pressure) {
  // closed forms first; they are exact inverses on the window
  if (const auto* g = std::get_if<IdealGas>(&eos.family)) {
    const double rho = pressure / g->c;
    if (!(rho >= eos.range.min && rho <= eos.range.max)) {
      throw Error(ErrorKind::PressureOutOfRange, "pressure " + std::to_string(pressure));
    }
    return rho;
  }
  if (const auto* p = std::get_if<PowerLaw>(&eos.family)) {
    const double rho = pressure > 0.0 ? std::pow(pressure / p->c, 1.0 / p->r) : -1.0;
    if (!(rho >= eos.range.min && rho <= eos.range.max)) {
      throw Error(ErrorKind::PressureOutOfRange, "pressure " + std::to_string(pressure));
    }
    return rho;
  }

  const double lo = eos.range.min;
  const double hi = eos.range.max;
  const double p_lo = pressure_from_density(eos, lo);
  const double p_hi = pressure_from_density(eos, hi);
  if (!(pressure >= p_lo && pressure <= p_hi)) {
    throw Error(ErrorKind::PressureOutOfRange, "pressure " + std::to_string(pressure) +
                                                   " outside EOS image [" + std::to_string(p_lo) +
                                                   ", " + std::to_string(p_hi) + "]");
  }
  if (pressure == p_lo) return lo;
  if (pressure == p_hi) return hi;
  auto root = detail::newton_bisect(
      [&](double rho) { return pressure_from_density(eos, rho) - pressure; },
      [&](double rho) { return pressure_slope(eos, rho); }, lo, hi, 1e-14, 100);
  if (!root) throw Error(ErrorKind::NoConvergence, "density_from_pressure exceeded 100 iterations");
  return root->x;
}

double density_slope(const EquationOfState& eos, double pressure) {
  return 1.0 / pressure_slope(eos, density_from_pressure(eos, pressure));
}

double gibbs_phi(const EquationOfState& eos, double rho) {
  return free_energy(eos, rho) + rho * free_energy_derivative(eos, rho);
}

ValidationReport validate_eos(const EquationOfState& eos, int samples) {
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "validate_eos needs at least 2 samples");
  ValidationReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  report.min_secondary = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double rho =
        eos.range.min + (eos.range.max - eos.range.min) * static_cast<double>(i) / (samples - 1);
    const double slope = pressure_slope(eos, rho);
    if (slope < report.min_value) {
      report.min_value = slope;
      report.min_location = rho;
    }
    report.min_secondary = std::min(report.min_secondary, rho);
  }
  report.passed = report.min_value > 0.0 && report.min_secondary > 0.0;
  std::ostringstream os;
  if (report.passed) {
    os << "pressure slope positive on the density window";
  } else {
    os << "pressure slope " << report.min_value << " at density " << report.min_location;
  }
  report.message = os.str();
  return report;
}

}  // namespace verigin
