// spectrum.hpp
#ifndef VERIGIN_SPECTRUM_HPP
#define VERIGIN_SPECTRUM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "verigin/equilibria.hpp"

namespace verigin {

/// Radial segment of a mode problem. Ends carrying the same label share a node.
struct RadialSegment {
  double a = 0.0;
  double b = 1.0;
  double mass_weight = 1.0;
  double stiffness_weight = 1.0;
  int left_label = -1;
  int right_label = -1;
  bool cluster_left = false;
  bool cluster_right = false;
};

/// Interface coupling. Case i uses two labels (v may jump), case ii one label.
struct NetworkInterface {
  double radius = 1.0;
  int inner_label = -1;
  int outer_label = -1;
  double sigma_mu = 0.0;  ///< sigma times the curvature eigenvalue of the mode
  double jump = 1.0;      ///< [[rho]] in case ii, unused in case i
};

/// Graph of radial segments for one harmonic degree. Concentric layouts form a
/// chain; droplet layouts are one ball plus one phase-two cell per droplet,
/// with the cells joined at a common far-field node in the l = 0 mode.
struct RadialNetwork {
  Case kase = Case::NoPhaseTransition;
  int n = 3;
  int l = 0;
  std::vector<RadialSegment> segments;
  std::vector<NetworkInterface> interfaces;
  std::vector<int> pinned_labels;  ///< homogeneous Dirichlet ends
  int decoupled_kernel = 0;        ///< interface modes with sigma mu = 0 (free displacement)
  bool interface_conditions = true;
};

/// Builds the network of a mode. With interface_conditions = false the
/// interfaces stay uncoupled and unpinned, which is the setting of T_lambda.
RadialNetwork mode_network(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l,
                           bool interface_conditions = true);

/// Discrete generalized eigenproblem lambda B z = -A z (growth-rate convention:
/// lambda > 0 is unstable). A is the P1 stiffness with weight r^{n-1}, B the
/// lumped mass plus the interface point terms.
struct ModeProblem {
  Case kase = Case::NoPhaseTransition;
  int n = 3;
  int l = 0;
  std::int64_t multiplicity = 1;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd mass;     ///< lumped bulk mass (diagonal of B without interface terms)
  Eigen::MatrixXd E;        ///< interface loads sqrt(W_k) d_k, one column per interface
  Eigen::VectorXd r;        ///< node radii of the free unknowns
  int decoupled_kernel = 0;
  int elements_per_segment = 0;
  double rate_scale = 1.0;  ///< max rho k / rho' / R_out^2
  std::vector<double> sigma_mu;
  std::vector<double> jumps;
};

ModeProblem assemble_network(const RadialNetwork& net, int N, double rate_scale = 1.0);

/// Mode problem of an equilibrium. Throws DegenerateEquilibrium when [[rho]]
/// vanishes in case ii.
ModeProblem assemble_mode(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l, int N);

struct SpectrumSlice {
  int l = 0;
  std::int64_t multiplicity = 1;
  Eigen::VectorXd eigenvalues;  ///< selected growth rates, descending
  Eigen::VectorXd all;          ///< every computed growth rate, descending
  int positive_count = 0;       ///< per harmonic, not multiplied
  int near_zero_count = 0;      ///< includes decoupled interface modes
  double max_imag_ratio = 0.0;
};

/// Growth rates of the mode: all positive ones plus the `count` of smallest
/// magnitude. Throws EigensolverFailure when an eigenvalue is not real to 1e-8.
SpectrumSlice generalized_spectrum(const ModeProblem& mp, int count);

/// Kernel threshold 10 N^-2 rate_scale.
double near_zero_threshold(const ModeProblem& mp);

/// T_lambda in the L2(Sigma)-orthonormal basis of the mode: E^T (lambda M + A)^{-1} E.
Eigen::MatrixXd dtn_matrix(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l, double lambda,
                           int N);

/// Same from an already assembled uncoupled problem.
Eigen::MatrixXd dtn_matrix(const ModeProblem& uncoupled, double lambda);

/// lambda T + sigma mu (case i) or [[rho]]^2 lambda T + sigma mu (case ii).
Eigen::MatrixXd b_lambda(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l, double lambda,
                         int N);
Eigen::MatrixXd b_lambda(const ModeProblem& uncoupled, double lambda);

struct B0Spectrum {
  Eigen::VectorXd indicator_basis;    ///< eigenvalues of the form in h_k = const variables
  Eigen::VectorXd orthonormal_basis;  ///< eigenvalues in L2(Sigma)-normalized constants
  double mu0 = 0.0;                   ///< sigma (n-1)|Sigma| / (m R^2), case ii
  double mu1 = 0.0;                   ///< case ii
};

B0Spectrum b0_closed_form(Case kase, const EquilibriumState& eq, const PhasePair& pair);

/// Unstable-mode count from the pencil B_lambda: negative eigenvalues at
/// lambda_small minus those at lambda_large.
int b_lambda_unstable_count(const ModeProblem& uncoupled, double lambda_small, double lambda_large);

/// Root of det B_lambda = 0 bracketed in [lo, hi] (smallest eigenvalue changes sign).
double b_lambda_root(const ModeProblem& uncoupled, double lo, double hi);

struct ModeKernel {
  int l = 0;
  std::int64_t multiplicity = 1;
  int geometric = 0;      ///< dim ker A plus decoupled interface modes
  int algebraic = 0;      ///< near-zero eigenvalue count
  int jordan_extra = 0;   ///< dim ker L^2 - dim ker L
};

struct SpectrumReport {
  std::vector<ModeKernel> modes;
  std::int64_t kernel_dim = 0;
  std::int64_t algebraic_dim = 0;
  std::int64_t kernel_dim_l2 = 0;  ///< from the rank of L^2
  bool semisimple = true;
  std::int64_t positive_count = 0;
};

SpectrumReport kernel_report(Case kase, const EquilibriumState& eq, const PhasePair& pair, int N, int L_max);

}  // namespace verigin

#endif  // VERIGIN_SPECTRUM_HPP
