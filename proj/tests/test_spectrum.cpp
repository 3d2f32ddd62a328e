#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "verigin/error.hpp"
#include "verigin/spectrum.hpp"

using namespace verigin;

namespace {

const double pi = std::numbers::pi;

PhasePair droplet_pair(double c2, double d2, double sigma) {
  PhasePair pair;
  pair.eos = {ideal_gas(1.0, 0.0), ideal_gas(c2, d2)};
  pair.law = {darcy_const(1.0), darcy_const(1.0)};
  pair.sigma = sigma;
  return pair;
}

// pi_1 = 1.1, pi_2 = 1 at R = 1, n = 3, R_out = 2
PhasePair transition_pair() { return droplet_pair(2.0, std::log(1.1) - 1.0 + 2.0 * std::log(2.0), 0.05); }

EquilibriumState transition_droplet(int m = 1) {
  RadialGeometry g;
  g.n = 3;
  g.R_out = 2.0;
  g.radii.assign(m, 1.0);
  g.layout = m == 1 ? Layout::Concentric : Layout::Droplets;
  const double ball = 4 * pi / 3;
  return solve_equilibrium_case_ii(transition_pair(), g, 1.1 * m * ball + 0.5 * (8 - m) * ball);
}

EquilibriumState plain_droplet(const PhasePair& pair) {
  RadialGeometry g;
  g.n = 3;
  g.R_out = 2.0;
  g.radii = {0.9};
  const double ball = 4 * pi / 3;
  return solve_equilibrium_case_i(pair, g, {1.1 * ball, 1.0 * 7 * ball});
}

double bisect(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    if ((fc < 0) == (fa < 0)) {
      a = c;
      fa = fc;
    } else {
      b = c;
    }
  }
  return 0.5 * (a + b);
}

double first_root(const std::function<double(double)>& f, double lo, double hi) {
  const int steps = 4000;
  double prev = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    const double v = f(x);
    if ((v < 0) != (prev < 0)) return bisect(f, lo + (hi - lo) * (i - 1) / steps, x);
    prev = v;
  }
  return NAN;
}

// Radial l = 0 modes for n = 3 in the decay variable gamma = -lambda. Inner
// solution sin(k1 r)/r, outer (C1 sin + C2 cos)(k2 r)/r with a Neumann end.
struct Sphere3 {
  double R, R_out;
  double f(double k, double r) const { return std::sin(k * r) / r; }
  double fp(double k, double r) const { return k * std::cos(k * r) / r - std::sin(k * r) / (r * r); }
  double g(double k, double r) const { return std::cos(k * r) / r; }
  double gp(double k, double r) const { return -k * std::sin(k * r) / r - std::cos(k * r) / (r * r); }
};

}  // namespace

TEST_CASE("Neumann ball: tan x = x") {
  RadialNetwork net;
  net.n = 3;
  net.l = 0;
  net.segments.push_back({0.0, 1.0, 2.0, 3.0, 0, 1, false, false});
  const ModeProblem mp = assemble_network(net, 400);
  const SpectrumSlice s = generalized_spectrum(mp, 3);
  // growth rates -(stiffness/mass) x^2 with the first two roots of tan x = x
  CHECK(s.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(s.eigenvalues[1] == doctest::Approx(-1.5 * 4.493409457909064 * 4.493409457909064).epsilon(1e-4));
  CHECK(s.eigenvalues[2] == doctest::Approx(-1.5 * 7.725251836937707 * 7.725251836937707).epsilon(1e-4));
}

TEST_CASE("Neumann ball, l = 1: first zero of j1'") {
  RadialNetwork net;
  net.n = 3;
  net.l = 1;
  net.pinned_labels = {0};
  net.segments.push_back({0.0, 1.0, 1.0, 1.0, 0, 1, false, false});
  const SpectrumSlice s = generalized_spectrum(assemble_network(net, 400), 1);
  CHECK(s.eigenvalues[0] == doctest::Approx(-2.081575977818101 * 2.081575977818101).epsilon(1e-4));
}

TEST_CASE("phase transition l = 0 against the characteristic equation") {
  const auto pair = transition_pair();
  const auto eq = transition_droplet();
  const double r1 = 1.1, r2 = 0.5, d1 = 1.0, d2 = 0.5, sigma = 0.05, R = 1.0;
  const Sphere3 s{R, 2.0};
  auto det = [&](double gamma) {
    const double k1 = std::sqrt(d1 * gamma / r1), k2 = std::sqrt(d2 * gamma / r2);
    Eigen::Matrix4d M;
    M << -s.f(k1, R), s.f(k2, R), s.g(k2, R), -2 * sigma / (R * R),
        -s.f(k1, R) / r1, s.f(k2, R) / r2, s.g(k2, R) / r2, 0,
        -r1 * s.fp(k1, R), r2 * s.fp(k2, R), r2 * s.gp(k2, R), -(r2 - r1) * gamma,
        0, s.fp(k2, 2.0), s.gp(k2, 2.0), 0;
    return M.determinant();
  };
  const double gamma = first_root(det, 0.01, 5.0);
  CHECK(gamma == doctest::Approx(1.1285478528).epsilon(1e-8));
  const SpectrumSlice sl = generalized_spectrum(assemble_mode(Case::PhaseTransition, eq, pair, 0, 200), 2);
  CHECK(sl.positive_count == 0);
  CHECK(sl.near_zero_count == 1);
  CHECK(-sl.eigenvalues[1] == doctest::Approx(gamma).epsilon(1e-4));
  CHECK(sl.max_imag_ratio < 1e-8);
}

TEST_CASE("no phase transition l = 0 against the characteristic equation") {
  const PhasePair pair = droplet_pair(1.0, 0.0, 0.05);
  const auto eq = plain_droplet(pair);
  const double R = eq.radii()[0];
  const double r1 = eq.pressures[0], r2 = eq.pressures[1], sigma = 0.05;
  const Sphere3 s{R, 2.0};
  auto det = [&](double gamma) {
    // rho' = 1 for c = 1, so k^2 = gamma / rho
    const double k1 = std::sqrt(gamma / r1), k2 = std::sqrt(gamma / r2);
    Eigen::Matrix4d M;
    M << -s.f(k1, R), s.f(k2, R), s.g(k2, R), -2 * sigma / (R * R),
        -s.fp(k1, R), s.fp(k2, R), s.gp(k2, R), 0,
        s.fp(k1, R), 0, 0, -gamma,
        0, s.fp(k2, 2.0), s.gp(k2, 2.0), 0;
    return M.determinant();
  };
  const double gamma = first_root(det, 0.01, 20.0);
  REQUIRE(std::isfinite(gamma));
  const SpectrumSlice sl = generalized_spectrum(assemble_mode(Case::NoPhaseTransition, eq, pair, 0, 200), 3);
  CHECK(sl.near_zero_count == 2);
  CHECK(-sl.eigenvalues[2] == doctest::Approx(gamma).epsilon(1e-4));
}

TEST_CASE("kernel dimensions") {
  const auto ii = kernel_report(Case::PhaseTransition, transition_droplet(), transition_pair(), 60, 3);
  CHECK(ii.kernel_dim == 3 * 1 + 1);
  CHECK(ii.semisimple);
  const PhasePair pair = droplet_pair(1.0, 0.0, 0.05);
  const auto i = kernel_report(Case::NoPhaseTransition, plain_droplet(pair), pair, 60, 3);
  CHECK(i.kernel_dim == 1 * 3 + 1 + 1);
}

TEST_CASE("two droplets: Ostwald ripening") {
  const auto eq = transition_droplet(2);
  const auto pair = transition_pair();
  REQUIRE(zeta_value(eq, pair) < 1.0);
  std::int64_t unstable = 0;
  for (int l = 0; l <= 3; ++l) {
    const auto s = generalized_spectrum(assemble_mode(Case::PhaseTransition, eq, pair, l, 100), 0);
    unstable += s.positive_count * s.multiplicity;
  }
  CHECK(unstable == 1);

  const ModeProblem un = assemble_network(mode_network(Case::PhaseTransition, eq, pair, 0, false), 100);
  CHECK(b_lambda_unstable_count(un, 1e-6, 1e3) == 1);
  const double root = b_lambda_root(un, 1e-3, 10.0);
  const auto s0 = generalized_spectrum(assemble_mode(Case::PhaseTransition, eq, pair, 0, 100), 0);
  CHECK(root == doctest::Approx(s0.eigenvalues[0]).epsilon(1e-6));
}

TEST_CASE("B_0 closed form against the pencil at small lambda") {
  const auto eq = transition_droplet(2);
  const auto pair = transition_pair();
  const B0Spectrum b0 = b0_closed_form(Case::PhaseTransition, eq, pair);
  // -mu_0 = -sigma (n-1) |Sigma| / (m R^2), |Sigma| the total area
  CHECK(b0.indicator_basis[0] == doctest::Approx(-0.05 * 2 * 8 * pi / 2));
  const ModeProblem un = assemble_network(mode_network(Case::PhaseTransition, eq, pair, 0, false), 200);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b_lambda(un, 1e-6)).eigenvalues();
  Eigen::VectorXd closed = b0.orthonormal_basis;
  std::sort(closed.begin(), closed.end());
  CHECK((ev - closed).cwiseAbs().maxCoeff() < 1e-3 * closed.cwiseAbs().maxCoeff());
}

TEST_CASE("vanishing density jump is degenerate") {
  PhasePair pair = droplet_pair(1.0, 0.0, 0.05);
  EquilibriumState eq;
  eq.kase = Case::PhaseTransition;
  eq.geometry.n = 3;
  eq.geometry.R_out = 2.0;
  eq.geometry.radii = {1.0};
  eq.pressures = {1.0, 1.0};
  try {
    assemble_mode(Case::PhaseTransition, eq, pair, 0, 20);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateEquilibrium);
  }
}
