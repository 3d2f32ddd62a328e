// symbol.hpp
#ifndef VERIGIN_SYMBOL_HPP
#define VERIGIN_SYMBOL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "verigin/equilibria.hpp"

namespace verigin {

using Complex = std::complex<double>;

/// Frozen coefficients of one phase at an interface point.
struct SymbolPhase {
  double rho = 1.0;
  double drho = 1.0;  ///< d rho / d pi
  Eigen::MatrixXd a;  ///< symmetric diffusion tensor
};

/// n_i = ((rho' lambda / rho + a(xi,xi)) a(nu,nu) - a(xi,nu)^2)^{1/2}, principal
/// branch. Throws BranchCut when the radicand lies on the negative real axis.
Complex symbol_n(double rho, double drho, const Eigen::MatrixXd& a, Complex lambda, const Eigen::VectorXd& xi,
                 const Eigen::VectorXd& nu);

/// Boundary symbol of the interface problem.
Complex symbol_s(Case kase, const SymbolPhase& p1, const SymbolPhase& p2, double sigma, Complex lambda,
                 const Eigen::VectorXd& xi, const Eigen::VectorXd& nu);

/// Stefan-type reference symbol lambda + |xi|^2 (lambda + |xi|^2)^{1/2}.
Complex symbol_s0(Complex lambda, double xi_norm);

struct ScanGrid {
  int lambda_count = 25;
  int arg_count = 16;
  int xi_count = 25;
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  double xi_min = 1e-3;
  double xi_max = 1e3;
};

struct ScanRow {
  Complex lambda;
  double xi = 0.0;
  double abs_s = 0.0;
  double abs_s0 = 0.0;
  double ratio = 0.0;
};

struct ScanResult {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool zero_found = false;
  bool lambda_term_vanishes = false;  ///< case ii with [[rho]] = 0
  double c_t = 1.0;
  double c_x = 1.0;
  std::vector<ScanRow> rows;
};

/// |s(lambda, xi)| / |s0(c_t lambda, c_x xi)| over a sector grid in Re lambda >= 0.
/// c_t is the lambda coefficient of s; c_x = (sigma K)^{1/3} matches the |xi|^3
/// growth of s. Rows with xi = 0 are included for every lambda.
ScanResult parabolicity_scan(Case kase, const SymbolPhase& p1, const SymbolPhase& p2, double sigma,
                             const ScanGrid& grid = {});

/// Isotropic frozen data a = k I of an equilibrium, taken at interface 0.
std::pair<SymbolPhase, SymbolPhase> symbol_phases(const EquilibriumState& eq, const PhasePair& pair);

}  // namespace verigin

#endif  // VERIGIN_SYMBOL_HPP
