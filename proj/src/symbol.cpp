// symbol.cpp
#include "verigin/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "verigin/error.hpp"

namespace verigin {

namespace {

double form(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return x.dot(a * y);
}

Complex principal_sqrt(Complex z) {
  if (z.real() < 0.0 && std::abs(z.imag()) <= 1e-14 * std::abs(z)) {
    std::ostringstream os;
    os << "square root argument " << z.real() << " + " << z.imag() << "i on the negative real axis";
    throw Error(ErrorKind::BranchCut, os.str());
  }
  return std::sqrt(z);
}

// sqrt(a(xi,xi) a(nu,nu) - a(xi,nu)^2) for unit xi: the large-|xi| slope of n_i
double tangential_stiffness(const Eigen::MatrixXd& a, const Eigen::VectorXd& xi_hat, const Eigen::VectorXd& nu) {
  const double v = form(a, xi_hat, xi_hat) * form(a, nu, nu) - std::pow(form(a, xi_hat, nu), 2);
  return std::sqrt(std::max(v, 0.0));
}

}  // namespace

Complex symbol_n(double rho, double drho, const Eigen::MatrixXd& a, Complex lambda, const Eigen::VectorXd& xi,
                 const Eigen::VectorXd& nu) {
  const Complex z = (drho * lambda / rho + form(a, xi, xi)) * form(a, nu, nu) - std::pow(form(a, xi, nu), 2);
  return principal_sqrt(z);
}

Complex symbol_s(Case kase, const SymbolPhase& p1, const SymbolPhase& p2, double sigma, Complex lambda,
                 const Eigen::VectorXd& xi, const Eigen::VectorXd& nu) {
  const double xi2 = xi.squaredNorm();
  if (xi2 == 0.0) {
    if (kase == Case::NoPhaseTransition) return lambda;
    return (p2.rho - p1.rho) * (p2.rho - p1.rho) * lambda;
  }
  const Complex n1 = symbol_n(p1.rho, p1.drho, p1.a, lambda, xi, nu);
  const Complex n2 = symbol_n(p2.rho, p2.drho, p2.a, lambda, xi, nu);
  if (kase == Case::NoPhaseTransition) return lambda + n1 * n2 / (n1 + n2) * sigma * xi2;
  const double jump = p2.rho - p1.rho;
  return jump * jump * lambda + (p1.rho * p1.rho * n1 + p2.rho * p2.rho * n2) * sigma * xi2;
}

Complex symbol_s0(Complex lambda, double xi_norm) {
  const double xi2 = xi_norm * xi_norm;
  return lambda + xi2 * std::sqrt(lambda + xi2);
}

ScanResult parabolicity_scan(Case kase, const SymbolPhase& p1, const SymbolPhase& p2, double sigma,
                             const ScanGrid& grid) {
  const int dim = static_cast<int>(p1.a.rows());
  if (dim < 2 || p2.a.rows() != dim) throw Error(ErrorKind::InvalidArgument, "tensors must be n x n with n >= 2");
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(dim);
  nu[dim - 1] = 1.0;
  Eigen::VectorXd xi_hat = Eigen::VectorXd::Zero(dim);
  xi_hat[0] = 1.0;

  ScanResult res;
  const double k1 = tangential_stiffness(p1.a, xi_hat, nu);
  const double k2 = tangential_stiffness(p2.a, xi_hat, nu);
  double K;
  if (kase == Case::NoPhaseTransition) {
    res.c_t = 1.0;
    K = k1 * k2 / (k1 + k2);
  } else {
    res.c_t = (p2.rho - p1.rho) * (p2.rho - p1.rho);
    K = p1.rho * p1.rho * k1 + p2.rho * p2.rho * k2;
  }
  if (!(res.c_t > 0.0)) {
    res.lambda_term_vanishes = true;
    res.c_t = 1.0;
  }
  res.c_x = sigma > 0.0 ? std::cbrt(sigma * K) : 1.0;

  res.min_ratio = std::numeric_limits<double>::infinity();
  res.max_ratio = 0.0;
  auto probe = [&](Complex lambda, double xi_norm) {
    const Complex s = symbol_s(kase, p1, p2, sigma, lambda, xi_norm * xi_hat, nu);
    const Complex s0 = symbol_s0(res.c_t * lambda, res.c_x * xi_norm);
    ScanRow row{lambda, xi_norm, std::abs(s), std::abs(s0), std::abs(s) / std::abs(s0)};
    if (row.abs_s < 1e-12 * row.abs_s0) res.zero_found = true;
    res.min_ratio = std::min(res.min_ratio, row.ratio);
    res.max_ratio = std::max(res.max_ratio, row.ratio);
    res.rows.push_back(row);
  };

  auto logspace = [](double lo, double hi, int i, int count) {
    return count == 1 ? lo : lo * std::pow(hi / lo, double(i) / (count - 1));
  };
  for (int i = 0; i < grid.lambda_count; ++i) {
    const double mag = logspace(grid.lambda_min, grid.lambda_max, i, grid.lambda_count);
    for (int j = 0; j < grid.arg_count; ++j) {
      const double arg = grid.arg_count == 1
                             ? 0.0
                             : -0.5 * std::numbers::pi + std::numbers::pi * j / (grid.arg_count - 1);
      const Complex lambda = std::polar(mag, arg);
      probe(lambda, 0.0);
      for (int q = 0; q < grid.xi_count; ++q) probe(lambda, logspace(grid.xi_min, grid.xi_max, q, grid.xi_count));
    }
  }
  return res;
}

std::pair<SymbolPhase, SymbolPhase> symbol_phases(const EquilibriumState& eq, const PhasePair& pair) {
  const auto comps = component_data(eq, pair);
  const Topology topo = topology(eq.geometry);
  const int n = eq.geometry.n;
  SymbolPhase out[2];
  for (int c : {topo.interfaces.at(0).inner, topo.interfaces.at(0).outer}) {
    const auto& d = comps[c];
    const double k = effective_permeability(pair.law_of(d.phase), d.pressure, 0.0);
    out[index(d.phase)] = SymbolPhase{d.rho, d.drho, k * Eigen::MatrixXd::Identity(n, n)};
  }
  return {out[0], out[1]};
}

}  // namespace verigin
