// simulator.hpp
#ifndef VERIGIN_SIMULATOR_HPP
#define VERIGIN_SIMULATOR_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "verigin/equilibria.hpp"

namespace verigin {

/// Radially symmetric state on concentric components. Each component carries
/// N equal cells between its bounding radii; every interface carries the two
/// one-sided trace pressures.
struct RadialState {
  double t = 0.0;
  RadialGeometry geometry;
  std::vector<Eigen::VectorXd> pressures;  ///< cell pressures per component
  std::vector<double> trace_inner;         ///< pi at R_k from the inner component
  std::vector<double> trace_outer;         ///< pi at R_k from the outer component
  // last accepted step, for the interface diagnostics
  double last_dt = 0.0;
  std::vector<double> last_flux_inner;     ///< mass through R_k in the interface frame, inner side
  std::vector<double> last_flux_outer;
  std::vector<double> last_velocity;       ///< (R_k^{new} - R_k^{old}) / dt
};

/// Uniform pressure per component, traces copied from the adjacent cells.
RadialState uniform_state(const RadialGeometry& g, const std::vector<double>& component_pressures, int N);

/// Equilibrium with every radius scaled by (1 + perturbation); pressures of
/// the outermost component are kept and the others re-fitted so the masses
/// (case i per component, case ii in total) are unchanged.
RadialState perturbed_state(const EquilibriumState& eq, const PhasePair& pair, double perturbation, int N);

/// min_gap is relative to R_out, min_density_jump relative to the larger density.
struct EventThresholds {
  double min_gap = 1e-3;
  double min_density_jump = 1e-6;
  double max_norm = 1e6;
};

struct SimConfig {
  Case kase = Case::NoPhaseTransition;
  PhasePair pair;
  RadialState initial;
  double dt = 1e-3;
  double t_end = 1.0;
  EventThresholds events;
  int cadence = 1;                 ///< record every cadence-th step
  double newton_tol = 1e-11;
  int max_halvings = 10;
  bool stop_at_equilibrium = true;
};

enum class EventKind { InterfaceCollision, InterfaceAtBoundary, InterfaceCollapsed, DensityJumpVanished, NormBlowup };

std::string to_string(EventKind e);

struct SimRecord {
  double t = 0.0;
  std::vector<double> radii;
  double energy = 0.0;
  double dissipation = 0.0;         ///< quadrature D_q
  double dissipation_scheme = 0.0;  ///< D_h, the rate the scheme dissipates exactly
  std::vector<double> component_masses;
  double total_mass = 0.0;
  std::vector<double> pi_minus;
  std::vector<double> pi_plus;
  std::vector<double> j_gamma;
  std::vector<double> velocity;
};

enum class Termination { ReachedTEnd, ConvergedToEquilibrium, Event, NewtonDiverged };

std::string to_string(Termination t);

struct SimSeries {
  std::vector<SimRecord> records;
  Termination termination = Termination::ReachedTEnd;
  std::optional<EventKind> event;
  std::string message;
  RadialState final_state;
  long steps = 0;
  // per-step diagnostics accumulated over the whole run
  double max_energy_increase = 0.0;  ///< max_j (E_{j+1} - E_j), < 0 when strictly decreasing
  double dissipation_integral = 0.0; ///< trapezoid in time of D_q over all steps
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_mass_drift = 0.0;       ///< relative; per component in case i, total in case ii
};

/// One implicit Euler step; throws NewtonDiverged when Newton fails even after
/// max_halvings time-step halvings.
RadialState step(const RadialState& state, const SimConfig& cfg);

/// Advances to t_end or until an event / convergence.
SimSeries run(const SimConfig& cfg);

/// Bulk free energy sum rho psi V over cells plus sigma times the sphere areas.
double available_energy(const RadialState& state, const PhasePair& pair);

/// Trapezoid quadrature of k (d_r pi)^2 over the radial nodes (cell centers plus
/// traces), with second-order centered gradients.
double dissipation(const RadialState& state, const PhasePair& pair);

/// Exact dissipation rate of the finite-volume scheme at the state.
double scheme_dissipation(const RadialState& state, const PhasePair& pair);

struct MassReport {
  std::vector<double> components;
  double total = 0.0;
};

MassReport masses(const RadialState& state, const PhasePair& pair);

struct PhaseFlux {
  double side1 = 0.0;
  double side2 = 0.0;
  double mismatch = 0.0;
};

/// j = rho (u . nu - V) with nu the outer normal of phase one, from each side
/// of interface k over the last accepted step.
PhaseFlux phase_flux(const RadialState& state, const PhasePair& pair, int k);

/// Equilibrium state on the simulator mesh.
RadialState equilibrium_to_state(const EquilibriumState& eq, int N);

/// Max scaled residual of the step map at (state -> state): zero at a fixed point.
double fixed_point_residual(const RadialState& state, const SimConfig& cfg);

/// Least-squares slope of log|R_0(t) - R_star| over records with relative
/// deviation in [lo, hi]; returns the positive decay rate.
double fit_decay_rate(const SimSeries& series, double R_star, double lo = 1e-8, double hi = 1e-4);

std::string csv_header(int m, int components);
std::string csv_row(const SimRecord& r);

}  // namespace verigin

#endif  // VERIGIN_SIMULATOR_HPP
