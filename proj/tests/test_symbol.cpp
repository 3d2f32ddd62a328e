#include <doctest.h>

#include <cmath>

#include "verigin/error.hpp"
#include "verigin/symbol.hpp"

using namespace verigin;

namespace {

SymbolPhase iso(double rho, double drho, double k, int n = 3) {
  return {rho, drho, k * Eigen::MatrixXd::Identity(n, n)};
}

Eigen::VectorXd e(int i, int n = 3) { return Eigen::VectorXd::Unit(n, i); }

}  // namespace

TEST_CASE("symbol at xi = 0 is the lambda term") {
  const auto p1 = iso(1.1, 1.0, 1.0), p2 = iso(0.5, 0.5, 2.0);
  const Complex lambda(0.3, -0.7);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  CHECK(std::abs(symbol_s(Case::NoPhaseTransition, p1, p2, 0.1, lambda, zero, e(2)) - lambda) < 1e-15);
  CHECK(std::abs(symbol_s(Case::PhaseTransition, p1, p2, 0.1, lambda, zero, e(2)) - 0.36 * lambda) < 1e-15);
}

TEST_CASE("isotropic n_i in closed form") {
  const double rho = 1.3, drho = 0.4, k = 2.5;
  const Complex lambda(0.2, 1.5);
  const Eigen::VectorXd xi = 0.7 * e(0);
  const Complex expected = std::sqrt(k * (drho * lambda / rho + k * 0.49));
  CHECK(std::abs(symbol_n(rho, drho, k * Eigen::MatrixXd::Identity(3, 3), lambda, xi, e(2)) - expected) < 1e-14);
}

TEST_CASE("anisotropic n_i by hand") {
  Eigen::Matrix2d a;
  a << 2.0, 0.5, 0.5, 1.0;
  const Eigen::Vector2d xi(1.0, 2.0), nu(0.0, 1.0);
  // a(xi,xi) = 2 + 2 + 4 = 8, a(nu,nu) = 1, a(xi,nu) = 0.5 + 2 = 2.5
  const Complex lambda(1.0, 0.0);
  const Complex expected = std::sqrt(Complex((0.5 * 1.0 / 1.0 + 8.0) * 1.0 - 6.25));
  CHECK(std::abs(symbol_n(1.0, 0.5, a, lambda, xi, nu) - expected) < 1e-14);
}

TEST_CASE("combination formulas") {
  const auto p1 = iso(1.1, 1.0, 1.0), p2 = iso(0.5, 0.5, 2.0);
  const Complex lambda(0.5, 0.5);
  const Eigen::VectorXd xi = 1.3 * e(1);
  const Complex n1 = symbol_n(1.1, 1.0, p1.a, lambda, xi, e(2));
  const Complex n2 = symbol_n(0.5, 0.5, p2.a, lambda, xi, e(2));
  const double s = 0.2, x2 = 1.69;
  CHECK(std::abs(symbol_s(Case::NoPhaseTransition, p1, p2, s, lambda, xi, e(2)) -
                 (lambda + n1 * n2 / (n1 + n2) * s * x2)) < 1e-14);
  CHECK(std::abs(symbol_s(Case::PhaseTransition, p1, p2, s, lambda, xi, e(2)) -
                 (0.36 * lambda + (1.21 * n1 + 0.25 * n2) * s * x2)) < 1e-14);
}

TEST_CASE("radicand on the negative real axis is a branch cut") {
  try {
    symbol_n(1.0, 1.0, Eigen::MatrixXd::Identity(3, 3), Complex(-5.0, 0.0), e(0), e(2));
    FAIL("expected BranchCut");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::BranchCut);
  }
  CHECK_NOTHROW(symbol_n(1.0, 1.0, Eigen::MatrixXd::Identity(3, 3), Complex(-0.5, 0.0), e(0), e(2)));
}

TEST_CASE("parabolicity scan") {
  const auto p1 = iso(1.1, 1.0, 1.0), p2 = iso(0.5, 0.5, 2.0);
  ScanGrid grid;
  grid.lambda_count = 7;
  grid.arg_count = 5;
  grid.xi_count = 9;
  for (Case kase : {Case::NoPhaseTransition, Case::PhaseTransition}) {
    const ScanResult r = parabolicity_scan(kase, p1, p2, 0.05, grid);
    CHECK(r.rows.size() == 7u * 5u * 10u);
    CHECK_FALSE(r.zero_found);
    CHECK_FALSE(r.lambda_term_vanishes);
    CHECK(r.min_ratio > 0.05);
    CHECK(r.max_ratio < 20.0);
    // ratio is exactly 1 at xi = 0 and tends to 1 as |xi| grows
    for (const auto& row : r.rows)
      if (row.xi == 0.0) CHECK(row.ratio == doctest::Approx(1.0));
  }
  ScanGrid far;
  far.lambda_count = 1;
  far.arg_count = 1;
  far.xi_count = 1;
  far.lambda_min = far.lambda_max = 1.0;
  far.xi_min = far.xi_max = 1e6;
  const ScanResult r = parabolicity_scan(Case::NoPhaseTransition, p1, p2, 0.05, far);
  CHECK(r.rows.back().ratio == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("vanishing density jump is flagged") {
  const auto p = iso(0.8, 1.0, 1.0);
  ScanGrid grid;
  grid.lambda_count = 3;
  grid.arg_count = 3;
  grid.xi_count = 3;
  const ScanResult r = parabolicity_scan(Case::PhaseTransition, p, p, 0.05, grid);
  CHECK(r.lambda_term_vanishes);
  CHECK(r.zero_found);  // s = 0 at xi = 0
}

TEST_CASE("one-dimensional tensors are rejected") {
  const auto p = iso(1.0, 1.0, 1.0, 1);
  CHECK_THROWS_AS(parabolicity_scan(Case::NoPhaseTransition, p, p, 0.05), Error);
}
