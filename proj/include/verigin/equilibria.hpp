// equilibria.hpp
#ifndef VERIGIN_EQUILIBRIA_HPP
#define VERIGIN_EQUILIBRIA_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "verigin/eos.hpp"
#include "verigin/geometry.hpp"
#include "verigin/mobility.hpp"

namespace verigin {

enum class Case { NoPhaseTransition, PhaseTransition };

std::string to_string(Case c);

/// Material data of the two phases plus the surface tension.
struct PhasePair {
  std::array<EquationOfState, 2> eos;
  std::array<VelocityLaw, 2> law;
  double sigma = 0.0;

  const EquationOfState& eos_of(Phase p) const { return eos[index(p)]; }
  const VelocityLaw& law_of(Phase p) const { return law[index(p)]; }
};

struct EquilibriumResiduals {
  double laplace = 0.0;          ///< max_k |pi_out - pi_in + (n-1) sigma / R_k|
  std::optional<double> gibbs;   ///< |[[phi]]|, phase transition only
  double mass = 0.0;             ///< max relative mass mismatch
};

struct EquilibriumState {
  Case kase = Case::NoPhaseTransition;
  std::vector<double> pressures;  ///< one per component, see topology()
  RadialGeometry geometry;
  EquilibriumResiduals residuals;
  int iterations = 0;

  const std::vector<double>& radii() const { return geometry.radii; }
};

/// Per-component density, density slope d rho / d pi and volume at an equilibrium.
struct ComponentData {
  Phase phase;
  double pressure;
  double rho;
  double drho;
  double volume;
};

std::vector<ComponentData> component_data(const EquilibriumState& eq, const PhasePair& pair);

/// Pressures and radii from per-component masses (no phase transition).
EquilibriumState solve_equilibrium_case_i(const PhasePair& pair, const RadialGeometry& geometry_template,
                                          const std::vector<double>& masses);

/// Common radius and the two phase pressures from the total mass (phase transition).
/// Allowed layouts: one concentric interface, or m >= 1 droplets.
EquilibriumState solve_equilibrium_case_ii(const PhasePair& pair, const RadialGeometry& geometry_template,
                                           double total_mass);

/// Residuals of an arbitrary candidate, used for the cross-checks with the simulator.
EquilibriumResiduals equilibrium_residuals(const EquilibriumState& eq, const PhasePair& pair,
                                           const std::vector<double>& masses);

enum class Verdict { NormallyStable, NormallyHyperbolic, Degenerate };

std::string to_string(Verdict v);

struct StabilityReport {
  Case kase = Case::NoPhaseTransition;
  Eigen::MatrixXd C;                ///< case i only
  std::optional<double> zeta;       ///< case ii only
  Eigen::VectorXd eigenvalues;      ///< of C (case i), or {mu_1} (case ii)
  int negative_count = 0;
  Verdict verdict = Verdict::Degenerate;
  bool connected = true;
  int component_count = 0;          ///< number of mass constraints actually imposed
  int nominal_constraint_count = 0;   ///< m + 1 as counted for concentric layouts
};

StabilityReport stability_matrix_case_i(const EquilibriumState& eq, const PhasePair& pair);
StabilityReport zeta_case_ii(const EquilibriumState& eq, const PhasePair& pair);

/// Closed-form C_* entry evaluator reused by the spectrum module.
Eigen::MatrixXd c_star(const EquilibriumState& eq, const PhasePair& pair);

/// zeta_* as a number; throws DensityJumpVanishes when |[[rho]]| < 1e-8.
double zeta_value(const EquilibriumState& eq, const PhasePair& pair);

struct HarmonicCoefficient {
  int l;
  double coefficient;  ///< against an L2(Sigma_k)-normalized degree-l harmonic
};

/// (v, h) split into constants and remainders. h is the normal displacement
/// along the outer normal of phase one.
struct Perturbation {
  std::vector<double> v_const;           ///< per component
  std::vector<double> v_remainder_norm;  ///< L2 norm of the zero-mean part, per component
  std::vector<double> h_const;           ///< per interface
  std::vector<std::vector<HarmonicCoefficient>> h_harmonics;  ///< per interface, l >= 1
};

double second_variation_form(const EquilibriumState& eq, const PhasePair& pair, const Perturbation& p);

struct ConstraintCheck {
  std::vector<bool> satisfied;
  std::vector<double> residuals;
};

/// Linearized mass constraints: per component (case i) or one global (case ii).
ConstraintCheck constraint_kernel_check(const EquilibriumState& eq, const PhasePair& pair,
                                        const Perturbation& p);

}  // namespace verigin

#endif  // VERIGIN_EQUILIBRIA_HPP
