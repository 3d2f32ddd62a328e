// simulator.cpp
#include "verigin/simulator.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "verigin/error.hpp"

namespace verigin {

std::string to_string(EventKind e) {
  switch (e) {
    case EventKind::InterfaceCollision: return "InterfaceCollision";
    case EventKind::InterfaceAtBoundary: return "InterfaceAtBoundary";
    case EventKind::InterfaceCollapsed: return "InterfaceCollapsed";
    case EventKind::DensityJumpVanished: return "DensityJumpVanished";
    case EventKind::NormBlowup: return "NormBlowup";
  }
  return "Unknown";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ReachedTEnd: return "ReachedTEnd";
    case Termination::ConvergedToEquilibrium: return "ConvergedToEquilibrium";
    case Termination::Event: return "Event";
    case Termination::NewtonDiverged: return "NewtonDiverged";
  }
  return "Unknown";
}

namespace {

double kappa(int n) { return unit_ball_volume<double>(n); }

double inner_radius(const RadialGeometry& g, int c) { return c == 0 ? 0.0 : g.radii[c - 1]; }
double outer_radius(const RadialGeometry& g, int c) {
  return c == g.interface_count() ? g.R_out : g.radii[c];
}

const EquationOfState& eos_of(const RadialGeometry& g, const PhasePair& pair, int c) {
  return pair.eos_of(component_phase(g, c));
}
const VelocityLaw& law_of(const RadialGeometry& g, const PhasePair& pair, int c) {
  return pair.law_of(component_phase(g, c));
}

// Face density Delta pi / Delta phi. It turns the ALE mesh term and the
// diffusive term into exact energy exchanges.
double chain_rule_density(const EquationOfState& eos, double pa, double pb) {
  const double ra = density_from_pressure(eos, pa);
  const double rb = density_from_pressure(eos, pb);
  if (std::abs(pb - pa) <= 1e-5 * std::max(std::abs(pa), std::abs(pb))) {
    const double rm = density_from_pressure(eos, 0.5 * (pa + pb));
    return 6.0 / (1.0 / ra + 4.0 / rm + 1.0 / rb);
  }
  return (pb - pa) / (gibbs_phi(eos, rb) - gibbs_phi(eos, ra));
}

struct FaceFlux {
  double flux;         // mass per time toward larger r
  double dissipation;  // k (d pi)^2 / dist * area
};

FaceFlux diffusive_flux(const EquationOfState& eos, const VelocityLaw& law, double pl, double pr, double dist,
                        double area) {
  const double grad = (pr - pl) / dist;
  const double k = effective_permeability(law, 0.5 * (pl + pr), grad * grad);
  const double rho = chain_rule_density(eos, pl, pr);
  return {-rho * k * grad * area, k * grad * grad * dist * area};
}

struct CellLayout {
  int m;
  int N;
  int nc;
  int size() const { return nc * N + 3 * m; }
  int cell(int c, int i) const { return c * N + i; }
  int pm(int k) const { return nc * N + 3 * k; }
  int pp(int k) const { return nc * N + 3 * k + 1; }
  int R(int k) const { return nc * N + 3 * k + 2; }
};

CellLayout layout_of(const RadialState& s) {
  const int m = s.geometry.interface_count();
  return {m, static_cast<int>(s.pressures.at(0).size()), m + 1};
}

Eigen::VectorXd pack(const RadialState& s) {
  const CellLayout L = layout_of(s);
  Eigen::VectorXd x(L.size());
  for (int c = 0; c < L.nc; ++c) x.segment(c * L.N, L.N) = s.pressures[c];
  for (int k = 0; k < L.m; ++k) {
    x[L.pm(k)] = s.trace_inner[k];
    x[L.pp(k)] = s.trace_outer[k];
    x[L.R(k)] = s.geometry.radii[k];
  }
  return x;
}

void unpack(const Eigen::VectorXd& x, RadialState& s) {
  const CellLayout L = layout_of(s);
  for (int c = 0; c < L.nc; ++c) s.pressures[c] = x.segment(c * L.N, L.N);
  for (int k = 0; k < L.m; ++k) {
    s.trace_inner[k] = x[L.pm(k)];
    s.trace_outer[k] = x[L.pp(k)];
    s.geometry.radii[k] = x[L.R(k)];
  }
}

struct StepContext {
  Case kase;
  const PhasePair* pair;
  const RadialState* old;
  double dt;
  CellLayout L;
  std::vector<double> old_mass;  // per cell
  std::vector<double> mass_ref;  // per cell
  double p_scale;
  double phi_scale;
};

StepContext make_context(const RadialState& old, const SimConfig& cfg, double dt) {
  StepContext ctx{cfg.kase, &cfg.pair, &old, dt, layout_of(old), {}, {}, 0.0, 0.0};
  const auto& g = old.geometry;
  const int n = g.n;
  const double kap = kappa(n);
  for (int c = 0; c < ctx.L.nc; ++c) {
    const auto& eos = eos_of(g, cfg.pair, c);
    const double a = inner_radius(g, c);
    const double b = outer_radius(g, c);
    for (int i = 0; i < ctx.L.N; ++i) {
      const double r0 = a + (b - a) * i / ctx.L.N;
      const double r1 = a + (b - a) * (i + 1) / ctx.L.N;
      const double rho = density_from_pressure(eos, old.pressures[c][i]);
      const double V = kap * (std::pow(r1, n) - std::pow(r0, n));
      ctx.old_mass.push_back(rho * V);
      ctx.mass_ref.push_back(rho * V);
      ctx.p_scale = std::max(ctx.p_scale, std::abs(old.pressures[c][i]));
      ctx.phi_scale = std::max(ctx.phi_scale, std::abs(old.pressures[c][i]) / rho);
    }
  }
  ctx.p_scale = std::max(ctx.p_scale, 1e-300);
  ctx.phi_scale = std::max(ctx.phi_scale, 1e-300);
  return ctx;
}

struct Evaluation {
  Eigen::VectorXd F;
  std::vector<double> q_inner;  // Q^- per interface
  std::vector<double> q_outer;  // Q^+ per interface
  double scheme_dissipation = 0.0;
};

// Residual of the implicit Euler step at the candidate new state x.
Evaluation evaluate(const StepContext& ctx, const Eigen::VectorXd& x) {
  const CellLayout& L = ctx.L;
  const auto& pair = *ctx.pair;
  RadialState s = *ctx.old;
  unpack(x, s);
  const auto& g = s.geometry;
  const auto& g_old = ctx.old->geometry;
  validate_geometry(g);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw Error(ErrorKind::NewtonDiverged, "non-finite iterate");
  }
  const int n = g.n;
  const double kap = kappa(n);
  const double dt = ctx.dt;

  Evaluation ev;
  ev.F = Eigen::VectorXd::Zero(L.size());
  ev.q_inner.assign(L.m, 0.0);
  ev.q_outer.assign(L.m, 0.0);

  for (int c = 0; c < L.nc; ++c) {
    const auto& eos = eos_of(g, pair, c);
    const auto& law = law_of(g, pair, c);
    const double a = inner_radius(g, c), b = outer_radius(g, c);
    const double a0 = inner_radius(g_old, c), b0 = outer_radius(g_old, c);
    const double h = (b - a) / L.N;
    const Eigen::VectorXd& p = s.pressures[c];

    auto face_new = [&](int j) { return a + (b - a) * j / L.N; };
    auto face_old = [&](int j) { return a0 + (b0 - a0) * j / L.N; };
    auto swept = [&](int j) { return kap * (std::pow(face_new(j), n) - std::pow(face_old(j), n)); };
    auto area = [&](double r) { return n * kap * std::pow(r, n - 1); };

    // Q[j]: mass moved across face j toward larger r during the step, mesh frame
    std::vector<double> Q(L.N + 1, 0.0);
    for (int j = 1; j < L.N; ++j) {
      const FaceFlux f = diffusive_flux(eos, law, p[j - 1], p[j], h, area(face_new(j)));
      Q[j] = dt * f.flux - chain_rule_density(eos, p[j - 1], p[j]) * swept(j);
      ev.scheme_dissipation += f.dissipation;
    }
    if (c > 0) {
      const int k = c - 1;
      const double pt = s.trace_outer[k];
      const FaceFlux f = diffusive_flux(eos, law, pt, p[0], 0.5 * h, area(a));
      Q[0] = dt * f.flux - chain_rule_density(eos, pt, p[0]) * swept(0);
      ev.q_outer[k] = Q[0];
      ev.scheme_dissipation += f.dissipation;
    }
    if (c < L.m) {
      const int k = c;
      const double pt = s.trace_inner[k];
      const FaceFlux f = diffusive_flux(eos, law, p[L.N - 1], pt, 0.5 * h, area(b));
      Q[L.N] = dt * f.flux - chain_rule_density(eos, p[L.N - 1], pt) * swept(L.N);
      ev.q_inner[k] = Q[L.N];
      ev.scheme_dissipation += f.dissipation;
    }
    for (int i = 0; i < L.N; ++i) {
      const double V = kap * (std::pow(face_new(i + 1), n) - std::pow(face_new(i), n));
      const int row = L.cell(c, i);
      const double mass = density_from_pressure(eos, p[i]) * V;
      ev.F[row] = (mass - ctx.old_mass[row] + Q[i + 1] - Q[i]) / ctx.mass_ref[row];
    }
  }

  for (int k = 0; k < L.m; ++k) {
    const double R = g.radii[k];
    const double pin = s.trace_inner[k];
    const double pout = s.trace_outer[k];
    const double mref = std::min(ctx.mass_ref[L.cell(k, L.N - 1)], ctx.mass_ref[L.cell(k + 1, 0)]);
    ev.F[L.pm(k)] = (pout - pin + (n - 1) * pair.sigma / R) / ctx.p_scale;
    if (ctx.kase == Case::NoPhaseTransition) {
      ev.F[L.pp(k)] = ev.q_inner[k] / mref;
      ev.F[L.R(k)] = ev.q_outer[k] / mref;
    } else {
      const auto& ein = eos_of(g, pair, k);
      const auto& eout = eos_of(g, pair, k + 1);
      ev.F[L.pp(k)] = (gibbs_phi(eout, density_from_pressure(eout, pout)) -
                       gibbs_phi(ein, density_from_pressure(ein, pin))) /
                      ctx.phi_scale;
      ev.F[L.R(k)] = (ev.q_inner[k] - ev.q_outer[k]) / mref;
    }
  }
  return ev;
}

// Column sparsity of the step Jacobian and a greedy coloring of it.
struct Coloring {
  std::vector<std::vector<int>> rows_of_col;
  std::vector<std::vector<int>> groups;
};

Coloring color_columns(const CellLayout& L) {
  Coloring col;
  col.rows_of_col.resize(L.size());
  auto interface_rows = [&](int k, std::vector<int>& rows) {
    if (k < 0 || k >= L.m) return;
    rows.push_back(L.pm(k));
    rows.push_back(L.pp(k));
    rows.push_back(L.R(k));
  };
  for (int c = 0; c < L.nc; ++c) {
    for (int i = 0; i < L.N; ++i) {
      auto& rows = col.rows_of_col[L.cell(c, i)];
      for (int d = -1; d <= 1; ++d) {
        if (i + d >= 0 && i + d < L.N) rows.push_back(L.cell(c, i + d));
      }
      if (i == L.N - 1) interface_rows(c, rows);
      if (i == 0) interface_rows(c - 1, rows);
    }
  }
  for (int k = 0; k < L.m; ++k) {
    auto& a = col.rows_of_col[L.pm(k)];
    a.push_back(L.cell(k, L.N - 1));
    interface_rows(k, a);
    auto& b = col.rows_of_col[L.pp(k)];
    b.push_back(L.cell(k + 1, 0));
    interface_rows(k, b);
    auto& r = col.rows_of_col[L.R(k)];
    for (int c : {k, k + 1}) {
      for (int i = 0; i < L.N; ++i) r.push_back(L.cell(c, i));
    }
    interface_rows(k - 1, r);
    interface_rows(k, r);
    interface_rows(k + 1, r);
  }
  std::vector<std::vector<char>> used;
  for (int j = 0; j < L.size(); ++j) {
    std::size_t color = 0;
    for (; color < used.size(); ++color) {
      bool clash = false;
      for (int r : col.rows_of_col[j]) {
        if (used[color][r]) {
          clash = true;
          break;
        }
      }
      if (!clash) break;
    }
    if (color == used.size()) {
      used.emplace_back(L.size(), 0);
      col.groups.emplace_back();
    }
    for (int r : col.rows_of_col[j]) used[color][r] = 1;
    col.groups[color].push_back(j);
  }
  return col;
}

Eigen::SparseMatrix<double> fd_jacobian(const StepContext& ctx, const Coloring& col, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& F) {
  const CellLayout& L = ctx.L;
  const double R_out = ctx.old->geometry.R_out;
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& group : col.groups) {
    Eigen::VectorXd step = Eigen::VectorXd::Zero(L.size());
    for (int j : group) {
      const bool radius = j >= L.nc * L.N && (j - L.nc * L.N) % 3 == 2;
      const double scale = radius ? R_out : ctx.p_scale;
      step[j] = 1e-7 * std::max(std::abs(x[j]), 1e-3 * scale);
    }
    Eigen::VectorXd Fp;
    try {
      Fp = evaluate(ctx, x + step).F;
    } catch (const Error&) {
      step = -step;
      Fp = evaluate(ctx, x + step).F;
    }
    for (int j : group) {
      for (int r : col.rows_of_col[j]) trip.emplace_back(r, j, (Fp[r] - F[r]) / step[j]);
    }
  }
  Eigen::SparseMatrix<double> J(L.size(), L.size());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

RadialState newton_step(const RadialState& old, const SimConfig& cfg, double dt) {
  const StepContext ctx = make_context(old, cfg, dt);
  const Coloring col = color_columns(ctx.L);
  Eigen::VectorXd x = pack(old);
  Evaluation ev = evaluate(ctx, x);
  double norm = ev.F.lpNorm<Eigen::Infinity>();
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    if (norm < 1e-14 || (norm < cfg.newton_tol && norm > 0.1 * prev)) break;
    const auto J = fd_jacobian(ctx, col, x, ev.F);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::NewtonDiverged, "singular step Jacobian");
    const Eigen::VectorXd dx = lu.solve(-ev.F);
    double lam = 1.0;
    bool accepted = false;
    for (int back = 0; back < 12; ++back, lam *= 0.5) {
      try {
        Evaluation trial = evaluate(ctx, x + lam * dx);
        const double tn = trial.F.lpNorm<Eigen::Infinity>();
        if (tn < norm || tn < cfg.newton_tol) {
          x += lam * dx;
          ev = std::move(trial);
          prev = norm;
          norm = tn;
          accepted = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) break;
  }
  if (!(norm < cfg.newton_tol)) {
    std::ostringstream os;
    os << "Newton residual " << norm << " above " << cfg.newton_tol;
    throw Error(ErrorKind::NewtonDiverged, os.str());
  }
  RadialState next = old;
  unpack(x, next);
  next.t = old.t + dt;
  next.last_dt = dt;
  next.last_flux_inner = ev.q_inner;
  next.last_flux_outer = ev.q_outer;
  next.last_velocity.resize(ctx.L.m);
  for (int k = 0; k < ctx.L.m; ++k) {
    next.last_velocity[k] = (next.geometry.radii[k] - old.geometry.radii[k]) / dt;
  }
  return next;
}

RadialState step_with_halving(const RadialState& state, const SimConfig& cfg, double dt, int depth) {
  try {
    return newton_step(state, cfg, dt);
  } catch (const Error& e) {
    if (depth >= cfg.max_halvings) throw Error(ErrorKind::NewtonDiverged, e.what());
  }
  const RadialState half = step_with_halving(state, cfg, 0.5 * dt, depth + 1);
  RadialState full = step_with_halving(half, cfg, 0.5 * dt, depth + 1);
  // report the interface data of the whole step
  full.last_dt = dt;
  for (std::size_t k = 0; k < full.last_velocity.size(); ++k) {
    full.last_velocity[k] = (full.geometry.radii[k] - state.geometry.radii[k]) / dt;
    full.last_flux_inner[k] += half.last_flux_inner[k];
    full.last_flux_outer[k] += half.last_flux_outer[k];
  }
  return full;
}

double rate_scale(const RadialState& s, const PhasePair& pair) {
  double rate = 0.0;
  for (int c = 0; c < s.geometry.component_count(); ++c) {
    const auto& eos = eos_of(s.geometry, pair, c);
    const double p = s.pressures[c].mean();
    const double rho = density_from_pressure(eos, p);
    const double k = effective_permeability(law_of(s.geometry, pair, c), p, 0.0);
    rate = std::max(rate, rho * k / density_slope(eos, p));
  }
  return rate / (s.geometry.R_out * s.geometry.R_out);
}

}  // namespace

RadialState uniform_state(const RadialGeometry& g, const std::vector<double>& component_pressures, int N) {
  validate_geometry(g);
  if (g.layout != Layout::Concentric) {
    throw Error(ErrorKind::InvalidArgument, "the simulator handles concentric layouts only");
  }
  if (N < 2) throw Error(ErrorKind::InvalidArgument, "need at least two cells per component");
  const int m = g.interface_count();
  if (static_cast<int>(component_pressures.size()) != m + 1) {
    throw Error(ErrorKind::InvalidArgument, "one pressure per component is required");
  }
  RadialState s;
  s.geometry = g;
  for (double p : component_pressures) s.pressures.push_back(Eigen::VectorXd::Constant(N, p));
  for (int k = 0; k < m; ++k) {
    s.trace_inner.push_back(component_pressures[k]);
    s.trace_outer.push_back(component_pressures[k + 1]);
  }
  s.last_flux_inner.assign(m, 0.0);
  s.last_flux_outer.assign(m, 0.0);
  s.last_velocity.assign(m, 0.0);
  return s;
}

RadialState equilibrium_to_state(const EquilibriumState& eq, int N) {
  return uniform_state(eq.geometry, eq.pressures, N);
}

RadialState perturbed_state(const EquilibriumState& eq, const PhasePair& pair, double perturbation, int N) {
  RadialGeometry g = eq.geometry;
  for (double& R : g.radii) R *= 1.0 + perturbation;
  validate_geometry(g);
  const Topology old_topo = topology(eq.geometry);
  const Topology new_topo = topology(g);
  const int nc = g.component_count();
  std::vector<double> p = eq.pressures;
  if (eq.kase == Case::NoPhaseTransition) {
    for (int c = 0; c < nc; ++c) {
      const auto& eos = eos_of(g, pair, c);
      const double M = density_from_pressure(eos, eq.pressures[c]) * old_topo.components[c].volume;
      p[c] = pressure_from_density(eos, M / new_topo.components[c].volume);
    }
  } else {
    const Phase keep = component_phase(g, nc - 1);
    double total = 0.0;
    double kept = 0.0;
    double refit_volume = 0.0;
    for (int c = 0; c < nc; ++c) {
      const auto& eos = eos_of(g, pair, c);
      total += density_from_pressure(eos, eq.pressures[c]) * old_topo.components[c].volume;
      if (component_phase(g, c) == keep) {
        kept += density_from_pressure(eos, eq.pressures[c]) * new_topo.components[c].volume;
      } else {
        refit_volume += new_topo.components[c].volume;
      }
    }
    const auto& eos_refit = pair.eos_of(other(keep));
    for (int c = 0; c < nc; ++c) {
      if (component_phase(g, c) != keep) p[c] = pressure_from_density(eos_refit, (total - kept) / refit_volume);
    }
  }
  return uniform_state(g, p, N);
}

RadialState step(const RadialState& state, const SimConfig& cfg) {
  return step_with_halving(state, cfg, cfg.dt, 0);
}

double available_energy(const RadialState& s, const PhasePair& pair) {
  const auto& g = s.geometry;
  const int n = g.n;
  const double kap = kappa(n);
  double E = 0.0;
  for (int c = 0; c < g.component_count(); ++c) {
    const auto& eos = eos_of(g, pair, c);
    const double a = inner_radius(g, c), b = outer_radius(g, c);
    const int N = static_cast<int>(s.pressures[c].size());
    for (int i = 0; i < N; ++i) {
      const double r0 = a + (b - a) * i / N;
      const double r1 = a + (b - a) * (i + 1) / N;
      const double rho = density_from_pressure(eos, s.pressures[c][i]);
      E += rho * free_energy(eos, rho) * kap * (std::pow(r1, n) - std::pow(r0, n));
    }
  }
  for (double R : g.radii) E += pair.sigma * sphere_area(n, R);
  return E;
}

namespace {

// derivative at x0 of the quadratic through three points
double derivative3(double x0, const double* x, const double* f) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      double term = 1.0 / (x[i] - x[j]);
      for (int q = 0; q < 3; ++q) {
        if (q != i && q != j) term *= (x0 - x[q]) / (x[i] - x[q]);
      }
      w += term;
    }
    d += w * f[i];
  }
  return d;
}

}  // namespace

double dissipation(const RadialState& s, const PhasePair& pair) {
  const auto& g = s.geometry;
  const int n = g.n;
  const int m = g.interface_count();
  const double kap = kappa(n);
  double D = 0.0;
  for (int c = 0; c <= m; ++c) {
    const auto& law = law_of(g, pair, c);
    const double a = inner_radius(g, c), b = outer_radius(g, c);
    const int N = static_cast<int>(s.pressures[c].size());
    const double h = (b - a) / N;
    // nodes: left end, cell centers, right end
    std::vector<double> x(N + 2), p(N + 2), grad(N + 2);
    x[0] = a;
    x[N + 1] = b;
    for (int i = 0; i < N; ++i) {
      x[i + 1] = a + (i + 0.5) * h;
      p[i + 1] = s.pressures[c][i];
    }
    const bool left_trace = c > 0;
    const bool right_trace = c < m;
    p[0] = left_trace ? s.trace_outer[c - 1] : p[1];
    p[N + 1] = right_trace ? s.trace_inner[c] : p[N];
    for (int i = 1; i <= N; ++i) {
      double xs[3], fs[3];
      if (i == 1 && !left_trace) {
        // even reflection about r = 0
        xs[0] = -x[1]; fs[0] = p[1];
        xs[1] = x[1]; fs[1] = p[1];
        xs[2] = x[2]; fs[2] = p[2];
      } else if (i == N && !right_trace) {
        // even reflection about R_out
        xs[0] = x[N - 1]; fs[0] = p[N - 1];
        xs[1] = x[N]; fs[1] = p[N];
        xs[2] = 2.0 * b - x[N]; fs[2] = p[N];
      } else {
        xs[0] = x[i - 1]; fs[0] = p[i - 1];
        xs[1] = x[i]; fs[1] = p[i];
        xs[2] = x[i + 1]; fs[2] = p[i + 1];
      }
      grad[i] = derivative3(x[i], xs, fs);
    }
    if (left_trace) {
      const double xs[3] = {x[0], x[1], x[2]};
      const double fs[3] = {p[0], p[1], p[2]};
      grad[0] = derivative3(x[0], xs, fs);
    } else {
      grad[0] = 0.0;
    }
    if (right_trace) {
      const double xs[3] = {x[N - 1], x[N], x[N + 1]};
      const double fs[3] = {p[N - 1], p[N], p[N + 1]};
      grad[N + 1] = derivative3(x[N + 1], xs, fs);
    } else {
      grad[N + 1] = 0.0;
    }
    std::vector<double> f(N + 2);
    for (int i = 0; i < N + 2; ++i) {
      const double k = effective_permeability(law, p[i], grad[i] * grad[i]);
      f[i] = k * grad[i] * grad[i] * n * kap * std::pow(x[i], n - 1);
    }
    for (int i = 0; i + 1 < N + 2; ++i) D += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
  }
  return D;
}

double scheme_dissipation(const RadialState& s, const PhasePair& pair) {
  SimConfig cfg;
  cfg.pair = pair;
  const StepContext ctx = make_context(s, cfg, 1.0);
  return evaluate(ctx, pack(s)).scheme_dissipation;
}

MassReport masses(const RadialState& s, const PhasePair& pair) {
  const auto& g = s.geometry;
  const int n = g.n;
  const double kap = kappa(n);
  MassReport rep;
  for (int c = 0; c < g.component_count(); ++c) {
    const auto& eos = eos_of(g, pair, c);
    const double a = inner_radius(g, c), b = outer_radius(g, c);
    const int N = static_cast<int>(s.pressures[c].size());
    double M = 0.0;
    for (int i = 0; i < N; ++i) {
      const double r0 = a + (b - a) * i / N;
      const double r1 = a + (b - a) * (i + 1) / N;
      M += density_from_pressure(eos, s.pressures[c][i]) * kap * (std::pow(r1, n) - std::pow(r0, n));
    }
    rep.components.push_back(M);
    rep.total += M;
  }
  return rep;
}

PhaseFlux phase_flux(const RadialState& s, const PhasePair& /*pair*/, int k) {
  PhaseFlux out;
  if (!(s.last_dt > 0.0)) return out;
  const auto& g = s.geometry;
  const double A = sphere_area(g.n, g.radii.at(k));
  const bool phase_one_inside = component_phase(g, k) == Phase::One;
  const double sign = phase_one_inside ? 1.0 : -1.0;
  const double j_in = sign * s.last_flux_inner.at(k) / (s.last_dt * A);
  const double j_out = sign * s.last_flux_outer.at(k) / (s.last_dt * A);
  out.side1 = phase_one_inside ? j_in : j_out;
  out.side2 = phase_one_inside ? j_out : j_in;
  out.mismatch = std::abs(out.side1 - out.side2);
  return out;
}

double fixed_point_residual(const RadialState& state, const SimConfig& cfg) {
  const StepContext ctx = make_context(state, cfg, cfg.dt);
  return evaluate(ctx, pack(state)).F.lpNorm<Eigen::Infinity>();
}

namespace {

SimRecord make_record(const RadialState& s, const PhasePair& pair) {
  SimRecord r;
  r.t = s.t;
  r.radii = s.geometry.radii;
  r.energy = available_energy(s, pair);
  r.dissipation = dissipation(s, pair);
  r.dissipation_scheme = scheme_dissipation(s, pair);
  const MassReport mr = masses(s, pair);
  r.component_masses = mr.components;
  r.total_mass = mr.total;
  r.pi_minus = s.trace_inner;
  r.pi_plus = s.trace_outer;
  for (int k = 0; k < s.geometry.interface_count(); ++k) r.j_gamma.push_back(phase_flux(s, pair, k).side1);
  r.velocity = s.last_velocity;
  return r;
}

std::optional<EventKind> detect_event(const RadialState& s, const SimConfig& cfg) {
  const auto& g = s.geometry;
  const int m = g.interface_count();
  for (int c = 0; c <= m; ++c) {
    for (Eigen::Index i = 0; i < s.pressures[c].size(); ++i) {
      const double p = s.pressures[c][i];
      if (!std::isfinite(p) || std::abs(p) > cfg.events.max_norm) return EventKind::NormBlowup;
    }
  }
  const double gap = cfg.events.min_gap * g.R_out;
  if (m > 0 && g.radii[0] < gap) return EventKind::InterfaceCollapsed;
  for (int k = 0; k + 1 < m; ++k) {
    if (g.radii[k + 1] - g.radii[k] < gap) return EventKind::InterfaceCollision;
  }
  if (m > 0 && g.R_out - g.radii[m - 1] < gap) return EventKind::InterfaceAtBoundary;
  if (cfg.kase == Case::PhaseTransition) {
    for (int k = 0; k < m; ++k) {
      const double rin = density_from_pressure(eos_of(g, cfg.pair, k), s.trace_inner[k]);
      const double rout = density_from_pressure(eos_of(g, cfg.pair, k + 1), s.trace_outer[k]);
      if (std::abs(rout - rin) < cfg.events.min_density_jump * std::max(rin, rout)) return EventKind::DensityJumpVanished;
    }
  }
  return std::nullopt;
}

}  // namespace

SimSeries run(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt and t_end must be positive");
  SimSeries out;
  RadialState state = cfg.initial;
  SimRecord rec = make_record(state, cfg.pair);
  out.records.push_back(rec);
  out.initial_energy = rec.energy;
  const MassReport m0 = masses(state, cfg.pair);
  double prev_energy = rec.energy;
  double prev_D = rec.dissipation;
  const double rate = rate_scale(state, cfg.pair);
  int calm = 0;
  bool recorded_last = true;

  if (auto ev = detect_event(state, cfg)) {
    out.termination = Termination::Event;
    out.event = ev;
    out.message = "event at t = 0";
    out.final_state = state;
    out.final_energy = rec.energy;
    return out;
  }

  const double t_stop = cfg.t_end * (1.0 - 1e-12);
  while (state.t < t_stop) {
    SimConfig local = cfg;
    local.dt = std::min(cfg.dt, cfg.t_end - state.t);
    try {
      state = step(state, local);
    } catch (const Error& e) {
      out.termination = Termination::NewtonDiverged;
      out.message = e.what();
      break;
    }
    ++out.steps;
    const double E = available_energy(state, cfg.pair);
    const double D = dissipation(state, cfg.pair);
    out.max_energy_increase = out.steps == 1 ? E - prev_energy : std::max(out.max_energy_increase, E - prev_energy);
    out.dissipation_integral += 0.5 * local.dt * (prev_D + D);
    prev_energy = E;
    prev_D = D;

    const MassReport mr = masses(state, cfg.pair);
    if (cfg.kase == Case::NoPhaseTransition) {
      for (std::size_t c = 0; c < mr.components.size(); ++c) {
        out.max_mass_drift =
            std::max(out.max_mass_drift, std::abs(mr.components[c] - m0.components[c]) / m0.components[c]);
      }
    } else {
      out.max_mass_drift = std::max(out.max_mass_drift, std::abs(mr.total - m0.total) / m0.total);
    }

    recorded_last = false;
    if (out.steps % cfg.cadence == 0) {
      out.records.push_back(make_record(state, cfg.pair));
      recorded_last = true;
      double spread = 0.0;
      for (const auto& p : state.pressures) {
        spread = std::max(spread, (p.maxCoeff() - p.minCoeff()) / std::max(std::abs(p.mean()), 1e-300));
      }
      double speed = 0.0;
      for (int k = 0; k < state.geometry.interface_count(); ++k) {
        speed = std::max(speed, std::abs(state.last_velocity[k]) / (state.geometry.radii[k] * rate));
      }
      calm = (spread < 1e-9 && speed < 1e-9) ? calm + 1 : 0;
      if (cfg.stop_at_equilibrium && calm >= 10) {
        out.termination = Termination::ConvergedToEquilibrium;
        break;
      }
    }
    if (auto ev = detect_event(state, cfg)) {
      out.termination = Termination::Event;
      out.event = ev;
      out.message = to_string(*ev) + " at t = " + std::to_string(state.t);
      break;
    }
  }
  if (!recorded_last) out.records.push_back(make_record(state, cfg.pair));
  out.final_state = state;
  out.final_energy = available_energy(state, cfg.pair);
  return out;
}

double fit_decay_rate(const SimSeries& series, double R_star, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& r : series.records) {
    const double dev = std::abs(r.radii.at(0) - R_star) / R_star;
    if (dev < lo || dev > hi) continue;
    const double y = std::log(dev);
    sx += r.t;
    sy += y;
    sxx += r.t * r.t;
    sxy += r.t * y;
    ++count;
  }
  if (count < 3) throw Error(ErrorKind::NoConvergence, "too few records in the decay window");
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return -slope;
}

std::string csv_header(int m, int components) {
  std::ostringstream os;
  os << "t";
  for (int k = 1; k <= m; ++k) os << ",R_" << k;
  os << ",E_a,D,M_total";
  for (int c = 1; c <= components; ++c) os << ",M_comp_" << c;
  for (int k = 1; k <= m; ++k) os << ",pi_minus_" << k << ",pi_plus_" << k << ",jGamma_" << k << ",V_" << k;
  return os.str();
}

std::string csv_row(const SimRecord& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << r.t;
  for (double R : r.radii) os << ',' << R;
  os << ',' << r.energy << ',' << r.dissipation << ',' << r.total_mass;
  for (double M : r.component_masses) os << ',' << M;
  for (std::size_t k = 0; k < r.radii.size(); ++k) {
    os << ',' << r.pi_minus[k] << ',' << r.pi_plus[k] << ',' << r.j_gamma[k] << ',' << r.velocity[k];
  }
  return os.str();
}

}  // namespace verigin
