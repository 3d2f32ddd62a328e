// selfcheck.cpp
#include "verigin/selfcheck.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "verigin/simulator.hpp"
#include "verigin/spectrum.hpp"
#include "verigin/symbol.hpp"

namespace verigin {

namespace {

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

// Single droplet, phase transition, n = 3: pi_1 = 1.1, pi_2 = 1 at R = 1.
PhasePair droplet_pair(double sigma) {
  PhasePair pair;
  pair.eos = {ideal_gas(1.0, 0.0), ideal_gas(2.0, std::log(1.1) - 1.0 + 2.0 * std::log(2.0))};
  pair.law = {darcy_const(1.0), darcy_const(1.0)};
  pair.sigma = sigma;
  return pair;
}

EquilibriumState droplet_equilibrium(const PhasePair& pair) {
  RadialGeometry g;
  g.n = 3;
  g.R_out = 2.0;
  g.radii = {1.0};
  const double ball = 4.0 * std::numbers::pi / 3.0;
  return solve_equilibrium_case_ii(pair, g, 1.1 * ball + 0.5 * 7.0 * ball);
}

CheckLine eos_round_trip() {
  double worst = 0.0;
  for (const auto& eos : {ideal_gas(2.0), power_law(1.5, 1.4), power_law(0.7, 0.5)}) {
    for (int i = 0; i < 200; ++i) {
      const double rho = std::pow(10.0, -2.0 + 4.0 * i / 199.0);
      const double back = density_from_pressure(eos, pressure_from_density(eos, rho));
      worst = std::max(worst, std::abs(back - rho) / rho);
    }
  }
  return {"eos round trip", worst < 1e-10, "max relative error " + sci(worst)};
}

CheckLine forchheimer_inversion() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double l = 0.1 + 2.0 * U(rng);
    const double grad = std::pow(10.0, -3.0 + 5.0 * U(rng));
    const VelocityLaw law = forchheimer_linear(l, 1.0, 1.0);
    const double w = effective_permeability(law, 1.0, grad * grad) * grad;
    worst = std::max(worst, std::abs((1.0 + w) * w - l * grad) / (l * grad));
  }
  return {"forchheimer inversion", worst < 1e-10, "max relative residual " + sci(worst)};
}

CheckLine zeta_identity() {
  const PhasePair pair = droplet_pair(0.05);
  const EquilibriumState eq = droplet_equilibrium(pair);
  const double zeta = zeta_value(eq, pair);
  const B0Spectrum b0 = b0_closed_form(Case::PhaseTransition, eq, pair);
  // mu_1 = ([[rho]]^2 |Sigma| / I)(1 - zeta)
  double integral = 0.0;
  for (const auto& c : component_data(eq, pair)) integral += c.drho * c.rho * c.volume;
  const double jump = 0.5 - 1.1;
  const double expected = jump * jump * sphere_area(3, 1.0) / integral * (1.0 - zeta);
  const double err = std::abs(b0.mu1 - expected) / std::abs(expected);
  return {"mu1 proportional to 1 - zeta", err < 1e-12, "relative error " + sci(err)};
}

CheckLine fixed_point() {
  const PhasePair pair = droplet_pair(0.05);
  const EquilibriumState eq = droplet_equilibrium(pair);
  SimConfig cfg;
  cfg.kase = Case::PhaseTransition;
  cfg.pair = pair;
  cfg.dt = 1e-2;
  const double res = fixed_point_residual(equilibrium_to_state(eq, 20), cfg);
  return {"simulator fixed point", res < 1e-9, "residual " + sci(res)};
}

CheckLine kernel_count() {
  const PhasePair pair = droplet_pair(0.05);
  const EquilibriumState eq = droplet_equilibrium(pair);
  const SpectrumReport rep = kernel_report(Case::PhaseTransition, eq, pair, 40, 2);
  return {"kernel dimension n m + 1", rep.kernel_dim == 4, "kernel " + std::to_string(rep.kernel_dim)};
}

CheckLine symbol_scan() {
  const PhasePair pair = droplet_pair(0.05);
  const EquilibriumState eq = droplet_equilibrium(pair);
  const auto [p1, p2] = symbol_phases(eq, pair);
  ScanGrid grid;
  grid.lambda_count = 6;
  grid.arg_count = 5;
  grid.xi_count = 6;
  const ScanResult r = parabolicity_scan(Case::PhaseTransition, p1, p2, pair.sigma, grid);
  return {"symbol parabolicity", !r.zero_found && r.min_ratio > 0.01, "min ratio " + sci(r.min_ratio)};
}

}  // namespace

std::vector<CheckLine> seed_check() {
  std::vector<CheckLine> lines;
  for (auto check : {eos_round_trip, forchheimer_inversion, zeta_identity, fixed_point, kernel_count, symbol_scan}) {
    try {
      lines.push_back(check());
    } catch (const std::exception& e) {
      lines.push_back({"check", false, e.what()});
    }
  }
  return lines;
}

int run_seed_check(std::ostream& out) {
  bool all = true;
  for (const auto& line : seed_check()) {
    out << (line.passed ? "PASS " : "FAIL ") << line.name << ": " << line.detail << '\n';
    all = all && line.passed;
  }
  return all ? 0 : 2;
}

}  // namespace verigin
