// equilibria.cpp
#include "verigin/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "verigin/detail/roots.hpp"
#include "verigin/error.hpp"

namespace verigin {

std::string to_string(Case c) {
  return c == Case::NoPhaseTransition ? "no-phase-transition" : "phase-transition";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NormallyStable: return "NormallyStable";
    case Verdict::NormallyHyperbolic: return "NormallyHyperbolic";
    case Verdict::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

std::vector<ComponentData> component_data(const EquilibriumState& eq, const PhasePair& pair) {
  const Topology topo = topology(eq.geometry);
  std::vector<ComponentData> out;
  for (std::size_t c = 0; c < topo.components.size(); ++c) {
    const auto& eos = pair.eos_of(topo.components[c].phase);
    const double p = eq.pressures.at(c);
    out.push_back({topo.components[c].phase, p, density_from_pressure(eos, p), density_slope(eos, p),
                   topo.components[c].volume});
  }
  return out;
}

namespace {

constexpr int kMaxNewton = 60;

enum class TrialFailure { None, Geometry, Density };

struct NewtonSystem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;  // throws on invalid iterate
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

// Damped Newton: halve the step until the residual norm decreases.
Eigen::VectorXd damped_newton(const NewtonSystem& sys, Eigen::VectorXd x, double tol, int& iterations) {
  Eigen::VectorXd F = sys.residual(x);
  double norm = F.lpNorm<Eigen::Infinity>();
  for (iterations = 0; iterations < kMaxNewton; ++iterations) {
    if (norm <= tol) return x;
    const Eigen::MatrixXd J = sys.jacobian(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) throw Error(ErrorKind::SingularSystem, "equilibrium Jacobian is singular");
    const Eigen::VectorXd dx = lu.solve(-F);

    double step = 1.0;
    TrialFailure failure = TrialFailure::None;
    bool accepted = false;
    for (int halving = 0; halving < 50; ++halving, step *= 0.5) {
      const Eigen::VectorXd trial = x + step * dx;
      Eigen::VectorXd Ft;
      try {
        Ft = sys.residual(trial);
      } catch (const Error& e) {
        failure = e.kind() == ErrorKind::GeometryDegenerate ? TrialFailure::Geometry : TrialFailure::Density;
        continue;
      }
      const double tn = Ft.lpNorm<Eigen::Infinity>();
      if (tn < norm) {
        x = trial;
        F = Ft;
        norm = tn;
        accepted = true;
        break;
      }
      failure = TrialFailure::None;
    }
    if (!accepted) {
      // a full Newton step that cannot reduce the residual means we sit at round-off
      if (norm <= 1e3 * tol) return x;
      if (failure == TrialFailure::Geometry) {
        throw Error(ErrorKind::GeometryDegenerate, "Newton iterate violates the radius ordering");
      }
      std::ostringstream os;
      os << "damped Newton stalled at residual " << norm;
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    if ((step * dx).lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>()) &&
        norm <= 1e3 * tol) {
      return x;
    }
  }
  if (norm <= 1e3 * tol) return x;
  std::ostringstream os;
  os << "no convergence in " << kMaxNewton << " iterations, residual " << norm;
  throw Error(ErrorKind::NoConvergence, os.str());
}

double pressure_window_min(const EquationOfState& eos) { return pressure_from_density(eos, eos.range.min); }
double pressure_window_max(const EquationOfState& eos) { return pressure_from_density(eos, eos.range.max); }

// Two phases whose free energies agree on sampled densities cannot form a
// phase-transition equilibrium.
bool phases_indistinguishable(const EquationOfState& a, const EquationOfState& b) {
  const double lo = std::max(a.range.min, b.range.min);
  const double hi = std::min(a.range.max, b.range.max);
  if (!(lo < hi)) return false;
  for (int i = 0; i < 9; ++i) {
    const double rho = lo * std::pow(hi / lo, i / 8.0);
    const double pa = free_energy(a, rho);
    const double pb = free_energy(b, rho);
    if (std::abs(pa - pb) > 1e-14 * (1.0 + std::abs(pa))) return false;
    const double qa = pressure_from_density(a, rho);
    const double qb = pressure_from_density(b, rho);
    if (std::abs(qa - qb) > 1e-14 * (1.0 + std::abs(qa))) return false;
  }
  return true;
}

}  // namespace

EquilibriumResiduals equilibrium_residuals(const EquilibriumState& eq, const PhasePair& pair,
                                           const std::vector<double>& masses) {
  const Topology topo = topology(eq.geometry);
  const int n = eq.geometry.n;
  EquilibriumResiduals res;
  const auto comps = component_data(eq, pair);
  for (const auto& itf : topo.interfaces) {
    const double jump = eq.pressures[itf.outer] - eq.pressures[itf.inner];
    res.laplace = std::max(res.laplace, std::abs(jump + (n - 1) * pair.sigma / itf.radius));
  }
  if (eq.kase == Case::PhaseTransition) {
    double g = 0.0;
    for (const auto& itf : topo.interfaces) {
      const auto& in = comps[itf.inner];
      const auto& out = comps[itf.outer];
      g = std::max(g, std::abs(gibbs_phi(pair.eos_of(out.phase), out.rho) -
                               gibbs_phi(pair.eos_of(in.phase), in.rho)));
    }
    res.gibbs = g;
    double total = 0.0;
    for (const auto& c : comps) total += c.rho * c.volume;
    res.mass = std::abs(total - masses.at(0)) / masses.at(0);
  } else {
    for (std::size_t c = 0; c < comps.size(); ++c) {
      res.mass = std::max(res.mass, std::abs(comps[c].rho * comps[c].volume - masses.at(c)) / masses.at(c));
    }
  }
  return res;
}

EquilibriumState solve_equilibrium_case_i(const PhasePair& pair, const RadialGeometry& geometry_template,
                                          const std::vector<double>& masses) {
  validate_geometry(geometry_template);
  const int m = geometry_template.interface_count();
  const int nc = geometry_template.component_count();
  const int n = geometry_template.n;
  if (static_cast<int>(masses.size()) != nc) {
    throw Error(ErrorKind::InvalidArgument, "case i needs one mass per component");
  }
  for (double M : masses) {
    if (!(M > 0.0)) throw Error(ErrorKind::InvalidArgument, "component masses must be positive");
  }

  // capacity: even at the densest admissible state the phases must fit
  double min_volume = 0.0;
  for (int c = 0; c < nc; ++c) {
    min_volume += masses[c] / pair.eos_of(component_phase(geometry_template, c)).range.max;
  }
  if (min_volume >= ball_volume(n, geometry_template.R_out)) {
    throw Error(ErrorKind::GeometryDegenerate, "masses exceed the container capacity at maximal density");
  }

  auto unpack = [&](const Eigen::VectorXd& x) {
    EquilibriumState s;
    s.kase = Case::NoPhaseTransition;
    s.geometry = geometry_template;
    s.pressures.assign(x.data(), x.data() + nc);
    for (int k = 0; k < m; ++k) s.geometry.radii[k] = x[nc + k];
    return s;
  };

  Eigen::VectorXd x0(nc + m);
  {
    const Topology topo = topology(geometry_template);
    for (int c = 0; c < nc; ++c) {
      const auto& eos = pair.eos_of(topo.components[c].phase);
      const double rho = std::clamp(masses[c] / topo.components[c].volume, eos.range.min, eos.range.max);
      x0[c] = pressure_from_density(eos, rho);
    }
    for (int k = 0; k < m; ++k) x0[nc + k] = geometry_template.radii[k];
  }
  double p_scale = 0.0;
  for (int c = 0; c < nc; ++c) p_scale = std::max(p_scale, std::abs(x0[c]));
  p_scale = std::max(p_scale, 1e-300);

  NewtonSystem sys;
  sys.residual = [&](const Eigen::VectorXd& x) {
    const EquilibriumState s = unpack(x);
    const Topology topo = topology(s.geometry);
    Eigen::VectorXd F(nc + m);
    for (int c = 0; c < nc; ++c) {
      const double rho = density_from_pressure(pair.eos_of(topo.components[c].phase), x[c]);
      F[c] = (rho * topo.components[c].volume - masses[c]) / masses[c];
    }
    for (int k = 0; k < m; ++k) {
      const auto& itf = topo.interfaces[k];
      F[nc + k] = (x[itf.outer] - x[itf.inner] + (n - 1) * pair.sigma / itf.radius) / p_scale;
    }
    return F;
  };
  sys.jacobian = [&](const Eigen::VectorXd& x) {
    const EquilibriumState s = unpack(x);
    const Topology topo = topology(s.geometry);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nc + m, nc + m);
    for (int c = 0; c < nc; ++c) {
      const auto& eos = pair.eos_of(topo.components[c].phase);
      const double rho = density_from_pressure(eos, x[c]);
      J(c, c) = density_slope(eos, x[c]) * topo.components[c].volume / masses[c];
      for (int k = 0; k < m; ++k) {
        const auto& itf = topo.interfaces[k];
        if (itf.inner == c) J(c, nc + k) += rho * itf.area / masses[c];
        if (itf.outer == c) J(c, nc + k) -= rho * itf.area / masses[c];
      }
    }
    for (int k = 0; k < m; ++k) {
      const auto& itf = topo.interfaces[k];
      J(nc + k, itf.outer) += 1.0 / p_scale;
      J(nc + k, itf.inner) -= 1.0 / p_scale;
      J(nc + k, nc + k) = -(n - 1) * pair.sigma / (itf.radius * itf.radius) / p_scale;
    }
    return J;
  };

  int iterations = 0;
  const Eigen::VectorXd x = damped_newton(sys, x0, 1e-13, iterations);
  EquilibriumState eq = unpack(x);
  eq.iterations = iterations;
  eq.residuals = equilibrium_residuals(eq, pair, masses);
  return eq;
}

EquilibriumState solve_equilibrium_case_ii(const PhasePair& pair, const RadialGeometry& geometry_template,
                                           double total_mass) {
  validate_geometry(geometry_template);
  const int m = geometry_template.interface_count();
  const int n = geometry_template.n;
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "at least one interface is required");
  if (geometry_template.layout == Layout::Concentric && m > 1) {
    throw Error(ErrorKind::InvalidArgument,
                "concentric spheres cannot share one radius; use the droplet layout for m > 1");
  }
  if (!(total_mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "total mass must be positive");
  if (phases_indistinguishable(pair.eos[0], pair.eos[1])) {
    throw Error(ErrorKind::DensityJumpVanishes, "identical phases have [[rho]] = 0 everywhere");
  }

  RadialGeometry g = geometry_template;
  double R0 = 0.0;
  for (double R : g.radii) R0 += R / m;
  std::fill(g.radii.begin(), g.radii.end(), R0);
  validate_geometry(g);

  const Phase inner = g.layout == Layout::Droplets ? Phase::One : g.inner_phase;
  const Phase outer = other(inner);
  const auto& eos_in = pair.eos_of(inner);
  const auto& eos_out = pair.eos_of(outer);

  auto volumes = [&](double R) {
    // volume of the inner phase, volume of the outer phase
    const double vin = m * ball_volume(n, R);
    return std::pair<double, double>{vin, ball_volume(n, g.R_out) - vin};
  };

  // initial pressures: phi-match at the template radius, by sign change scan
  double q0;
  {
    auto [vin, vout] = volumes(R0);
    const double rho_bar = total_mass / (vin + vout);
    const double clamp_lo = eos_out.range.min;
    const double clamp_hi = eos_out.range.max;
    q0 = pressure_from_density(eos_out, std::clamp(rho_bar, clamp_lo, clamp_hi));
    const double delta = (n - 1) * pair.sigma / R0;
    // pulled inside by 1e-9 so the log-spaced samples never round past an end
    const double lo = std::max(pressure_window_min(eos_out), pressure_window_min(eos_in) - delta) * (1.0 + 1e-9);
    const double hi = std::min(pressure_window_max(eos_out), pressure_window_max(eos_in) - delta) * (1.0 - 1e-9);
    auto f = [&](double q) {
      return gibbs_phi(eos_out, density_from_pressure(eos_out, q)) -
             gibbs_phi(eos_in, density_from_pressure(eos_in, q + delta));
    };
    if (lo > 0.0 && hi > lo) {
      const int samples = 400;
      double best = std::numeric_limits<double>::infinity();
      double prev_q = lo;
      double prev_f = f(lo);
      for (int i = 1; i <= samples; ++i) {
        const double q = lo * std::pow(hi / lo, double(i) / samples);
        const double fq = f(q);
        if ((prev_f <= 0.0) != (fq <= 0.0)) {
          const double sgn = fq > prev_f ? 1.0 : -1.0;
          auto root = detail::newton_bisect([&](double s) { return sgn * f(s); },
                                            [](double) { return 0.0; }, prev_q, q, 1e-14, 200);
          if (root && std::abs(std::log(root->x / q0)) < best) {
            best = std::abs(std::log(root->x / q0));
            q0 = root->x;
          }
        }
        prev_q = q;
        prev_f = fq;
      }
    }
  }

  // unknowns: pi_1, pi_2, R
  auto pressure_of = [&](const Eigen::VectorXd& x, Phase p) { return x[index(p)]; };
  NewtonSystem sys;
  sys.residual = [&](const Eigen::VectorXd& x) {
    const double R = x[2];
    if (!(R > 0.0)) throw Error(ErrorKind::GeometryDegenerate, "radius left (0, R_out)");
    RadialGeometry trial = g;
    std::fill(trial.radii.begin(), trial.radii.end(), R);
    validate_geometry(trial);
    const double pin = pressure_of(x, inner);
    const double pout = pressure_of(x, outer);
    const double rin = density_from_pressure(eos_in, pin);
    const double rout = density_from_pressure(eos_out, pout);
    auto [vin, vout] = volumes(R);
    Eigen::VectorXd F(3);
    F[0] = gibbs_phi(eos_out, rout) - gibbs_phi(eos_in, rin);
    F[1] = pout - pin + (n - 1) * pair.sigma / R;
    F[2] = (rin * vin + rout * vout - total_mass) / total_mass;
    return F;
  };
  sys.jacobian = [&](const Eigen::VectorXd& x) {
    const double R = x[2];
    const double pin = pressure_of(x, inner);
    const double pout = pressure_of(x, outer);
    const double rin = density_from_pressure(eos_in, pin);
    const double rout = density_from_pressure(eos_out, pout);
    auto [vin, vout] = volumes(R);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    const int iin = index(inner);
    const int iout = index(outer);
    J(0, iout) = 1.0 / rout;
    J(0, iin) = -1.0 / rin;
    J(1, iout) = 1.0;
    J(1, iin) = -1.0;
    J(1, 2) = -(n - 1) * pair.sigma / (R * R);
    J(2, iin) = density_slope(eos_in, pin) * vin / total_mass;
    J(2, iout) = density_slope(eos_out, pout) * vout / total_mass;
    J(2, 2) = m * sphere_area(n, R) * (rin - rout) / total_mass;
    return J;
  };

  Eigen::VectorXd x0(3);
  x0[index(outer)] = q0;
  x0[index(inner)] = q0 + (n - 1) * pair.sigma / R0;
  x0[2] = R0;
  {
    const double rin = density_from_pressure(eos_in, x0[index(inner)]);
    const double rout = density_from_pressure(eos_out, x0[index(outer)]);
    if (std::abs(rin - rout) < 1e-8) {
      throw Error(ErrorKind::DensityJumpVanishes, "[[rho]] vanishes at the initial candidate");
    }
  }

  int iterations = 0;
  const Eigen::VectorXd x = damped_newton(sys, x0, 1e-13, iterations);
  const double rho1 = density_from_pressure(pair.eos[0], x[0]);
  const double rho2 = density_from_pressure(pair.eos[1], x[1]);
  if (std::abs(rho2 - rho1) < 1e-8) {
    throw Error(ErrorKind::DensityJumpVanishes, "[[rho]] vanishes at the converged state");
  }

  EquilibriumState eq;
  eq.kase = Case::PhaseTransition;
  eq.geometry = g;
  std::fill(eq.geometry.radii.begin(), eq.geometry.radii.end(), x[2]);
  for (int c = 0; c < eq.geometry.component_count(); ++c) {
    eq.pressures.push_back(x[index(component_phase(eq.geometry, c))]);
  }
  eq.iterations = iterations;
  eq.residuals = equilibrium_residuals(eq, pair, {total_mass});
  return eq;
}

Eigen::MatrixXd c_star(const EquilibriumState& eq, const PhasePair& pair) {
  const Topology topo = topology(eq.geometry);
  const auto comps = component_data(eq, pair);
  const int m = eq.geometry.interface_count();
  const int n = eq.geometry.n;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const double w = comps[c].rho / (comps[c].drho * comps[c].volume);
    for (int k : topo.components[c].interfaces) {
      for (int l : topo.components[c].interfaces) C(k, l) += w;
    }
  }
  for (int k = 0; k < m; ++k) {
    const auto& itf = topo.interfaces[k];
    C(k, k) -= pair.sigma * (n - 1) / (itf.radius * itf.radius * itf.area);
  }
  return C;
}

namespace {

Verdict verdict_from_eigenvalues(const Eigen::VectorXd& eig, double scale, int& negative) {
  negative = 0;
  bool degenerate = false;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig[i]) <= 1e-12 * scale) degenerate = true;
    else if (eig[i] < 0.0) ++negative;
  }
  if (degenerate) return Verdict::Degenerate;
  return negative == 0 ? Verdict::NormallyStable : Verdict::NormallyHyperbolic;
}

}  // namespace

StabilityReport stability_matrix_case_i(const EquilibriumState& eq, const PhasePair& pair) {
  if (eq.kase != Case::NoPhaseTransition) {
    throw Error(ErrorKind::InvalidArgument, "C_* is defined for the case without phase transition");
  }
  StabilityReport rep;
  rep.kase = eq.kase;
  rep.C = c_star(eq, pair);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.C, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues();
  const double scale = std::max(rep.C.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  rep.verdict = verdict_from_eigenvalues(rep.eigenvalues, scale, rep.negative_count);
  rep.connected = eq.geometry.interface_count() == 1;
  rep.component_count = eq.geometry.component_count();
  rep.nominal_constraint_count = eq.geometry.interface_count() + 1;
  return rep;
}

double zeta_value(const EquilibriumState& eq, const PhasePair& pair) {
  const auto comps = component_data(eq, pair);
  const Topology topo = topology(eq.geometry);
  const int n = eq.geometry.n;
  double rho1 = 0.0;
  double rho2 = 0.0;
  for (const auto& c : comps) (c.phase == Phase::One ? rho1 : rho2) = c.rho;
  const double drho = rho2 - rho1;
  if (std::abs(drho) < 1e-8) throw Error(ErrorKind::DensityJumpVanishes, "[[rho]] below 1e-8");
  double integral = 0.0;
  for (const auto& c : comps) integral += c.drho * c.rho * c.volume;
  double area = 0.0;
  for (const auto& itf : topo.interfaces) area += itf.area;
  const double R = topo.interfaces[0].radius;
  return (n - 1) * pair.sigma / (drho * drho * R * R * area) * integral;
}

StabilityReport zeta_case_ii(const EquilibriumState& eq, const PhasePair& pair) {
  if (eq.kase != Case::PhaseTransition) {
    throw Error(ErrorKind::InvalidArgument, "zeta_* is defined for the phase-transition case");
  }
  StabilityReport rep;
  rep.kase = eq.kase;
  const double zeta = zeta_value(eq, pair);
  rep.zeta = zeta;
  rep.connected = eq.geometry.interface_count() == 1;
  rep.component_count = eq.geometry.component_count();
  rep.nominal_constraint_count = 1;

  // mu_1 = ([[rho]]^2 |Sigma| / I)(1 - zeta), reported as the single constant-mode value
  const auto comps = component_data(eq, pair);
  double rho1 = 0.0;
  double rho2 = 0.0;
  double integral = 0.0;
  for (const auto& c : comps) {
    (c.phase == Phase::One ? rho1 : rho2) = c.rho;
    integral += c.drho * c.rho * c.volume;
  }
  const Topology topo = topology(eq.geometry);
  double area = 0.0;
  for (const auto& itf : topo.interfaces) area += itf.area;
  rep.eigenvalues = Eigen::VectorXd::Constant(1, (rho2 - rho1) * (rho2 - rho1) * area / integral * (1.0 - zeta));
  rep.negative_count = zeta > 1.0 ? 1 : 0;

  if (std::abs(zeta - 1.0) <= 1e-12) rep.verdict = Verdict::Degenerate;
  else if (!rep.connected || zeta > 1.0) rep.verdict = Verdict::NormallyHyperbolic;
  else rep.verdict = Verdict::NormallyStable;
  return rep;
}

double second_variation_form(const EquilibriumState& eq, const PhasePair& pair, const Perturbation& p) {
  const auto comps = component_data(eq, pair);
  const Topology topo = topology(eq.geometry);
  const int n = eq.geometry.n;
  double value = 0.0;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const double w = comps[c].drho / comps[c].rho;
    const double vc = c < p.v_const.size() ? p.v_const[c] : 0.0;
    const double rem = c < p.v_remainder_norm.size() ? p.v_remainder_norm[c] : 0.0;
    value += w * (vc * vc * comps[c].volume + rem * rem);
  }
  for (std::size_t k = 0; k < topo.interfaces.size(); ++k) {
    const auto& itf = topo.interfaces[k];
    const double hk = k < p.h_const.size() ? p.h_const[k] : 0.0;
    value += pair.sigma * curvature_op_eigenvalue(n, itf.radius, 0).value * itf.area * hk * hk;
    if (k < p.h_harmonics.size()) {
      for (const auto& hc : p.h_harmonics[k]) {
        if (hc.l < 1) throw Error(ErrorKind::InvalidArgument, "harmonic remainders must have l >= 1");
        value += pair.sigma * curvature_op_eigenvalue(n, itf.radius, hc.l).value * hc.coefficient * hc.coefficient;
      }
    }
  }
  return value;
}

ConstraintCheck constraint_kernel_check(const EquilibriumState& eq, const PhasePair& pair,
                                        const Perturbation& p) {
  const auto comps = component_data(eq, pair);
  const Topology topo = topology(eq.geometry);
  ConstraintCheck out;
  auto vconst = [&](std::size_t c) { return c < p.v_const.size() ? p.v_const[c] : 0.0; };
  auto hconst = [&](std::size_t k) { return k < p.h_const.size() ? p.h_const[k] : 0.0; };

  if (eq.kase == Case::NoPhaseTransition) {
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const double bulk = comps[c].drho * vconst(c) * comps[c].volume;
      const double sign = comps[c].phase == Phase::One ? 1.0 : -1.0;
      double surface = 0.0;
      for (int k : topo.components[c].interfaces) surface += comps[c].rho * hconst(k) * topo.interfaces[k].area;
      // h > 0 moves every interface into phase two
      const double r = bulk + sign * surface;
      out.residuals.push_back(r);
      out.satisfied.push_back(std::abs(r) <= 1e-10 * (std::abs(bulk) + std::abs(surface)));
    }
    return out;
  }

  double bulk = 0.0;
  for (std::size_t c = 0; c < comps.size(); ++c) bulk += comps[c].drho * vconst(c) * comps[c].volume;
  double rho1 = 0.0;
  double rho2 = 0.0;
  for (const auto& c : comps) (c.phase == Phase::One ? rho1 : rho2) = c.rho;
  double surface = 0.0;
  for (std::size_t k = 0; k < topo.interfaces.size(); ++k) surface += hconst(k) * topo.interfaces[k].area;
  surface *= rho2 - rho1;
  const double r = bulk - surface;
  out.residuals.push_back(r);
  out.satisfied.push_back(std::abs(r) <= 1e-10 * (std::abs(bulk) + std::abs(surface)));
  return out;
}

}  // namespace verigin
