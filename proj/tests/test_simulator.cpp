#include <doctest.h>

#include <cmath>
#include <numbers>

#include "verigin/error.hpp"
#include "verigin/simulator.hpp"

using namespace verigin;

namespace {

const double pi = std::numbers::pi;
const double ball = 4.0 * pi / 3.0;

PhasePair ideal_pair(double sigma) {
  PhasePair pair;
  pair.eos = {ideal_gas(1.0), ideal_gas(1.0)};
  pair.law = {darcy_const(1.0), darcy_const(1.0)};
  pair.sigma = sigma;
  return pair;
}

// pi_1 = 1.1, pi_2 = 1 at R = 1 when sigma = 0.05
PhasePair transition_pair() {
  PhasePair pair;
  pair.eos = {ideal_gas(1.0), ideal_gas(2.0, std::log(1.1) - 1.0 + 2.0 * std::log(2.0))};
  pair.law = {darcy_const(1.0), darcy_const(1.0)};
  pair.sigma = 0.05;
  return pair;
}

RadialGeometry sphere(double R, double R_out = 2.0) {
  RadialGeometry g;
  g.n = 3;
  g.R_out = R_out;
  g.radii = {R};
  return g;
}

// R0 = 1 finds the stable droplet, R0 = 0.3 the small critical one
EquilibriumState transition_equilibrium(double R0 = 1.0) {
  return solve_equilibrium_case_ii(transition_pair(), sphere(R0), 1.1 * ball + 0.5 * 7 * ball);
}

EquilibriumState plain_equilibrium() {
  return solve_equilibrium_case_i(ideal_pair(0.05), sphere(1.0), {1.1 * ball, 7 * ball});
}

SimConfig config(Case kase, const PhasePair& pair, RadialState init, double dt, double t_end) {
  SimConfig cfg;
  cfg.kase = kase;
  cfg.pair = pair;
  cfg.initial = std::move(init);
  cfg.dt = dt;
  cfg.t_end = t_end;
  return cfg;
}

// pi = 1 + r^2 - 2 r^3 / 3 (no flux at 0 and R_out) sampled at cell centers and traces, interface at 0.5, R_out = 1
RadialState parabola_state(int N) {
  RadialState s = uniform_state(sphere(0.5, 1.0), {1.0, 1.0}, N);
  const double h = 0.5 / N;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < N; ++i) {
      const double r = 0.5 * c + (i + 0.5) * h;
      s.pressures[c][i] = 1.0 + r * r - 2.0 * r * r * r / 3.0;
    }
  s.trace_inner[0] = s.trace_outer[0] = 1.25 - 0.25 / 3.0;
  return s;
}

}  // namespace

TEST_CASE("energy of a uniform unit-density state is the surface term") {
  const RadialState s = uniform_state(sphere(1.0), {1.0, 1.0}, 10);
  CHECK(available_energy(s, ideal_pair(2.0)) == doctest::Approx(8.0 * pi).epsilon(1e-14));
  CHECK(dissipation(s, ideal_pair(2.0)) < 1e-20);
}

TEST_CASE("unit density: mass equals volume") {
  const RadialState s = uniform_state(sphere(1.0), {1.0, 1.0}, 10);
  const MassReport m = masses(s, ideal_pair(0.0));
  CHECK(m.components[0] == doctest::Approx(ball));
  CHECK(m.components[1] == doctest::Approx(7 * ball));
  CHECK(m.total == doctest::Approx(8 * ball));
}

TEST_CASE("dissipation quadrature converges at second order") {
  // integral of (2r(1-r))^2 over the unit ball
  const double exact = 16.0 * pi / 105.0;
  const double e20 = std::abs(dissipation(parabola_state(20), ideal_pair(0.0)) - exact);
  const double e40 = std::abs(dissipation(parabola_state(40), ideal_pair(0.0)) - exact);
  CHECK(e40 < 2e-3 * exact);
  CHECK(std::log2(e20 / e40) > 1.8);
}

TEST_CASE("equilibria are fixed points of the step") {
  const auto eq_ii = transition_equilibrium();
  auto cfg = config(Case::PhaseTransition, transition_pair(), equilibrium_to_state(eq_ii, 30), 1e-2, 1.0);
  CHECK(fixed_point_residual(cfg.initial, cfg) < 1e-10);
  const auto eq_i = plain_equilibrium();
  auto cfg_i = config(Case::NoPhaseTransition, ideal_pair(0.05), equilibrium_to_state(eq_i, 30), 1e-2, 1.0);
  CHECK(fixed_point_residual(cfg_i.initial, cfg_i) < 1e-10);
}

TEST_CASE("without surface tension a uniform state stays put") {
  const RadialState s0 = uniform_state(sphere(1.0), {1.3, 1.3}, 12);
  const RadialState s1 = step(s0, config(Case::NoPhaseTransition, ideal_pair(0.0), s0, 0.1, 1.0));
  CHECK(s1.geometry.radii[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int c = 0; c < 2; ++c) CHECK((s1.pressures[c].array() - 1.3).abs().maxCoeff() < 1e-12);
  CHECK(s1.t == doctest::Approx(0.1));
}

TEST_CASE("phase transition run: energy, mass, flux, relaxation") {
  const auto eq = transition_equilibrium();
  const auto pair = transition_pair();
  auto cfg = config(Case::PhaseTransition, pair, perturbed_state(eq, pair, 0.02, 40), 1e-2, 3.0);
  cfg.stop_at_equilibrium = false;
  const SimSeries s = run(cfg);
  CHECK(s.termination == Termination::ReachedTEnd);
  CHECK(s.max_energy_increase <= 1e-12 * std::abs(s.initial_energy));
  CHECK(s.final_energy < s.initial_energy);
  CHECK(s.max_mass_drift < 1e-12);
  // mass crosses the interface and both sides agree on the flux
  const RadialState one = step(cfg.initial, cfg);
  const PhaseFlux j1 = phase_flux(one, pair, 0);
  CHECK(std::abs(j1.side1) > 1e-6);
  CHECK(j1.mismatch < 1e-10 * std::abs(j1.side1));
  // the radius relaxes toward R* monotonically once the fast mode is gone
  const double Rs = eq.radii()[0];
  double prev = INFINITY;
  for (const auto& r : s.records) {
    if (r.t < 0.5) continue;
    const double dev = std::abs(r.radii[0] - Rs);
    CHECK(dev <= prev * (1 + 1e-12));
    prev = dev;
  }
  CHECK(prev < 0.02 * Rs * 0.1);
}

TEST_CASE("no phase transition: no mass crosses the interface") {
  const auto eq = plain_equilibrium();
  const auto pair = ideal_pair(0.05);
  auto cfg = config(Case::NoPhaseTransition, pair, perturbed_state(eq, pair, 0.02, 30), 1e-2, 1.0);
  cfg.stop_at_equilibrium = false;
  const SimSeries s = run(cfg);
  CHECK(s.max_energy_increase <= 1e-12 * std::abs(s.initial_energy));
  CHECK(s.max_mass_drift < 1e-12);
  const RadialState one = step(cfg.initial, cfg);
  const PhaseFlux j = phase_flux(one, pair, 0);
  CHECK(std::abs(j.side1) < 1e-12);
  CHECK(std::abs(j.side2) < 1e-12);
  CHECK(std::abs(one.last_velocity[0]) > 1e-6);
}

TEST_CASE("unstable droplet collapses") {
  const auto pair = transition_pair();
  const auto eq = transition_equilibrium(0.3);
  REQUIRE(eq.radii()[0] < 0.5);
  REQUIRE(zeta_value(eq, pair) > 1.0);
  auto cfg = config(Case::PhaseTransition, pair, perturbed_state(eq, pair, -0.05, 30), 1e-2, 200.0);
  cfg.events.min_gap = 0.05;
  const SimSeries s = run(cfg);
  CHECK(s.termination == Termination::Event);
  REQUIRE(s.event.has_value());
  CHECK(*s.event == EventKind::InterfaceCollapsed);
}

TEST_CASE("csv layout") {
  CHECK(csv_header(2, 3) ==
        "t,R_1,R_2,E_a,D,M_total,M_comp_1,M_comp_2,M_comp_3,pi_minus_1,pi_plus_1,jGamma_1,V_1,pi_minus_2,pi_plus_2,"
        "jGamma_2,V_2");
  SimRecord r;
  r.t = 0.5;
  r.radii = {1.0};
  r.energy = 2.0;
  r.dissipation = 3.0;
  r.total_mass = 4.0;
  r.component_masses = {1.0, 3.0};
  r.pi_minus = {1.1};
  r.pi_plus = {1.0};
  r.j_gamma = {0.0};
  r.velocity = {-0.25};
  CHECK(csv_row(r) == "0.5,1,2,3,4,1,3,1.1000000000000001,1,0,-0.25");
}

TEST_CASE("droplet layouts are rejected") {
  RadialGeometry g = sphere(0.5);
  g.radii = {0.5, 0.5};
  g.layout = Layout::Droplets;
  CHECK_THROWS_AS(uniform_state(g, {1.0, 1.0, 1.0}, 10), Error);
}
