// spectrum.cpp
#include "verigin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "verigin/error.hpp"

namespace verigin {

namespace {

struct PhaseWeights {
  double mass;
  double stiffness;
  double rho;
  double rate;  // rho k / rho'
};

PhaseWeights weights_of(Case kase, const ComponentData& c, const PhasePair& pair) {
  const double k = effective_permeability(pair.law_of(c.phase), c.pressure, 0.0);
  if (kase == Case::NoPhaseTransition) return {c.drho / c.rho, k, c.rho, c.rho * k / c.drho};
  return {c.drho * c.rho, c.rho * c.rho * k, c.rho, c.rho * k / c.drho};
}

// Graded nodes on [a, b]: geometric growth away from clustered ends, with the
// total size ratio capped at 20 so fine meshes stay quasi-uniform.
std::vector<double> graded_nodes(double a, double b, int N, bool cl, bool cr) {
  std::vector<double> sizes(N, 1.0);
  if (cl || cr) {
    const int span = (cl && cr) ? (N + 1) / 2 : N;
    const double q = std::min(1.05, std::pow(20.0, 1.0 / std::max(1, span - 1)));
    for (int i = 0; i < N; ++i) {
      int d = 0;
      if (cl && cr) d = std::min(i, N - 1 - i);
      else if (cl) d = i;
      else d = N - 1 - i;
      sizes[i] = std::pow(q, d);
    }
  }
  double total = 0.0;
  for (double s : sizes) total += s;
  std::vector<double> r(N + 1);
  r[0] = a;
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    acc += sizes[i];
    r[i + 1] = a + (b - a) * acc / total;
  }
  r[N] = b;
  return r;
}

constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};

}  // namespace

RadialNetwork mode_network(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l,
                           bool interface_conditions) {
  const RadialGeometry& g = eq.geometry;
  const auto comps = component_data(eq, pair);
  const int m = g.interface_count();
  RadialNetwork net;
  net.kase = kase;
  net.n = g.n;
  net.l = l;
  net.interface_conditions = interface_conditions;

  int next_label = 0;
  auto fresh = [&]() { return next_label++; };

  auto add_interface = [&](double R, int inner_comp, int outer_comp, int& inner_label, int& outer_label) {
    NetworkInterface itf;
    itf.radius = R;
    itf.sigma_mu = pair.sigma * curvature_op_eigenvalue(g.n, R, l).value;
    itf.jump = comps[outer_comp].rho - comps[inner_comp].rho;
    inner_label = fresh();
    outer_label = kase == Case::PhaseTransition ? inner_label : fresh();
    if (interface_conditions && itf.sigma_mu == 0.0) {
      if (kase == Case::NoPhaseTransition) outer_label = inner_label;
      else net.pinned_labels.push_back(inner_label);
      ++net.decoupled_kernel;
    }
    itf.inner_label = inner_label;
    itf.outer_label = outer_label;
    net.interfaces.push_back(itf);
  };

  auto segment = [&](double a, double b, int comp, int left, int right, bool cl, bool cr) {
    const PhaseWeights w = weights_of(kase, comps[comp], pair);
    net.segments.push_back({a, b, w.mass, w.stiffness, left, right, cl, cr});
  };

  if (g.layout == Layout::Concentric) {
    const int origin = fresh();
    if (l >= 1) net.pinned_labels.push_back(origin);
    std::vector<int> in(m), out(m);
    for (int k = 0; k < m; ++k) add_interface(g.radii[k], k, k + 1, in[k], out[k]);
    const int boundary = fresh();
    for (int c = 0; c <= m; ++c) {
      const double a = c == 0 ? 0.0 : g.radii[c - 1];
      const double b = c == m ? g.R_out : g.radii[c];
      segment(a, b, c, c == 0 ? origin : out[c - 1], c == m ? boundary : in[c], c > 0, c < m);
    }
    return net;
  }

  const int junction = fresh();
  for (int k = 0; k < m; ++k) {
    const int origin = fresh();
    if (l >= 1) net.pinned_labels.push_back(origin);
    int in = -1;
    int out = -1;
    add_interface(g.radii[k], k, m, in, out);
    const int end = l == 0 ? junction : fresh();
    segment(0.0, g.radii[k], k, origin, in, false, true);
    segment(g.radii[k], droplet_cell_radius(g, k), m, out, end, true, false);
  }
  return net;
}

ModeProblem assemble_network(const RadialNetwork& net, int N, double rate_scale) {
  if (N < 2) throw Error(ErrorKind::InvalidArgument, "need at least two elements per segment");
  const int n = net.n;
  const double L = static_cast<double>(net.l) * (net.l + n - 2);

  std::map<int, int> dof_of_label;
  std::vector<double> radius;
  auto dof_for = [&](int label, double r) {
    auto it = dof_of_label.find(label);
    if (it != dof_of_label.end()) return it->second;
    const int d = static_cast<int>(radius.size());
    dof_of_label[label] = d;
    radius.push_back(r);
    return d;
  };

  std::vector<std::vector<int>> seg_dofs;
  std::vector<std::vector<double>> seg_nodes;
  for (const auto& s : net.segments) {
    auto nodes = graded_nodes(s.a, s.b, N, s.cluster_left, s.cluster_right);
    std::vector<int> dofs(N + 1);
    dofs[0] = dof_for(s.left_label, s.a);
    for (int i = 1; i < N; ++i) {
      dofs[i] = static_cast<int>(radius.size());
      radius.push_back(nodes[i]);
    }
    dofs[N] = dof_for(s.right_label, s.b);
    seg_dofs.push_back(std::move(dofs));
    seg_nodes.push_back(std::move(nodes));
  }
  for (const auto& itf : net.interfaces) {
    if (!dof_of_label.count(itf.inner_label) || !dof_of_label.count(itf.outer_label)) {
      throw Error(ErrorKind::InvalidArgument, "interface label not attached to a segment");
    }
  }

  const int total = static_cast<int>(radius.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, total);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(total);
  for (std::size_t s = 0; s < net.segments.size(); ++s) {
    const auto& seg = net.segments[s];
    const auto& x = seg_nodes[s];
    const auto& d = seg_dofs[s];
    for (int e = 0; e < N; ++e) {
      const double r0 = x[e];
      const double r1 = x[e + 1];
      const double h = r1 - r0;
      double k00 = 0, k01 = 0, k11 = 0, m0 = 0, m1 = 0;
      for (int q = 0; q < 4; ++q) {
        const double r = 0.5 * (r0 + r1) + 0.5 * h * kGaussX[q];
        const double w = 0.5 * h * kGaussW[q] * std::pow(r, n - 1);
        const double p0 = (r1 - r) / h;
        const double p1 = (r - r0) / h;
        const double ang = L / (r * r);
        k00 += w * (1.0 / (h * h) + ang * p0 * p0);
        k01 += w * (-1.0 / (h * h) + ang * p0 * p1);
        k11 += w * (1.0 / (h * h) + ang * p1 * p1);
        m0 += w * p0;
        m1 += w * p1;
      }
      const int i = d[e];
      const int j = d[e + 1];
      A(i, i) += seg.stiffness_weight * k00;
      A(i, j) += seg.stiffness_weight * k01;
      A(j, i) += seg.stiffness_weight * k01;
      A(j, j) += seg.stiffness_weight * k11;
      mass[i] += seg.mass_weight * m0;
      mass[j] += seg.mass_weight * m1;
    }
  }

  Eigen::MatrixXd B = mass.asDiagonal();
  const int mi = static_cast<int>(net.interfaces.size());
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(total, mi);
  ModeProblem mp;
  for (int k = 0; k < mi; ++k) {
    const auto& itf = net.interfaces[k];
    const double W = std::pow(itf.radius, n - 1);
    const int i = dof_of_label.at(itf.inner_label);
    const int o = dof_of_label.at(itf.outer_label);
    if (net.kase == Case::NoPhaseTransition) {
      if (i != o) {
        E(o, k) += std::sqrt(W);
        E(i, k) -= std::sqrt(W);
      }
      if (net.interface_conditions && itf.sigma_mu != 0.0) {
        const double c = W / itf.sigma_mu;
        B(i, i) += c;
        B(o, o) += c;
        B(i, o) -= c;
        B(o, i) -= c;
      }
    } else {
      E(i, k) += std::sqrt(W);
      if (net.interface_conditions && itf.sigma_mu != 0.0) {
        B(i, i) += W * itf.jump * itf.jump / itf.sigma_mu;
      }
    }
    mp.sigma_mu.push_back(itf.sigma_mu);
    mp.jumps.push_back(itf.jump);
  }

  std::vector<bool> pinned(total, false);
  for (int label : net.pinned_labels) {
    auto it = dof_of_label.find(label);
    if (it != dof_of_label.end()) pinned[it->second] = true;
  }
  std::vector<int> keep;
  for (int i = 0; i < total; ++i) {
    if (!pinned[i]) keep.push_back(i);
  }
  const int f = static_cast<int>(keep.size());
  mp.kase = net.kase;
  mp.n = n;
  mp.l = net.l;
  mp.multiplicity = harmonic_multiplicity(n, net.l);
  mp.A.resize(f, f);
  mp.B.resize(f, f);
  mp.mass.resize(f);
  mp.E.resize(f, mi);
  mp.r.resize(f);
  for (int a = 0; a < f; ++a) {
    mp.mass[a] = mass[keep[a]];
    mp.r[a] = radius[keep[a]];
    mp.E.row(a) = E.row(keep[a]);
    for (int b = 0; b < f; ++b) {
      mp.A(a, b) = A(keep[a], keep[b]);
      mp.B(a, b) = B(keep[a], keep[b]);
    }
  }
  mp.decoupled_kernel = net.decoupled_kernel;
  mp.elements_per_segment = N;
  mp.rate_scale = rate_scale;
  return mp;
}

namespace {

double rate_scale_of(Case kase, const EquilibriumState& eq, const PhasePair& pair) {
  double rate = 0.0;
  for (const auto& c : component_data(eq, pair)) rate = std::max(rate, weights_of(kase, c, pair).rate);
  return rate / (eq.geometry.R_out * eq.geometry.R_out);
}

void require_nondegenerate(Case kase, const EquilibriumState& eq, const PhasePair& pair) {
  if (kase != Case::PhaseTransition) return;
  const auto comps = component_data(eq, pair);
  const Topology topo = topology(eq.geometry);
  for (const auto& itf : topo.interfaces) {
    if (std::abs(comps[itf.outer].rho - comps[itf.inner].rho) < 1e-8) {
      throw Error(ErrorKind::DegenerateEquilibrium, "[[rho]] vanishes at an interface");
    }
  }
}

}  // namespace

ModeProblem assemble_mode(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l, int N) {
  if (l < 0) throw Error(ErrorKind::InvalidArgument, "harmonic degree must be nonnegative");
  require_nondegenerate(kase, eq, pair);
  return assemble_network(mode_network(kase, eq, pair, l, true), N, rate_scale_of(kase, eq, pair));
}

double near_zero_threshold(const ModeProblem& mp) {
  const double N = mp.elements_per_segment;
  return 10.0 / (N * N) * mp.rate_scale;
}

SpectrumSlice generalized_spectrum(const ModeProblem& mp, int count) {
  SpectrumSlice out;
  out.l = mp.l;
  out.multiplicity = mp.multiplicity;
  std::vector<double> values(mp.decoupled_kernel, 0.0);
  if (mp.A.rows() > 0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(mp.B);
    const Eigen::MatrixXd L = -lu.solve(mp.A);
    Eigen::EigenSolver<Eigen::MatrixXd> es(L, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigensolverFailure, "eigenvalue iteration failed");
    const Eigen::VectorXcd ev = es.eigenvalues();
    const double biggest = ev.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      out.max_imag_ratio = std::max(out.max_imag_ratio, std::abs(ev[i].imag()) / std::max(biggest, 1e-300));
      values.push_back(ev[i].real());
    }
    if (out.max_imag_ratio > 1e-8) {
      std::ostringstream os;
      os << "complex eigenvalue in mode l = " << mp.l << ", |Im|/max|lambda| = " << out.max_imag_ratio;
      throw Error(ErrorKind::EigensolverFailure, os.str());
    }
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  const double tol = near_zero_threshold(mp);
  out.all = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());

  std::vector<double> chosen;
  std::vector<double> rest;
  for (double v : values) {
    if (v > tol) ++out.positive_count;
    if (std::abs(v) <= tol) ++out.near_zero_count;
    (v > tol ? chosen : rest).push_back(v);
  }
  std::sort(rest.begin(), rest.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  for (int i = 0; i < count && i < static_cast<int>(rest.size()); ++i) chosen.push_back(rest[i]);
  std::sort(chosen.begin(), chosen.end(), std::greater<>());
  out.eigenvalues = Eigen::Map<Eigen::VectorXd>(chosen.data(), chosen.size());
  return out;
}

Eigen::MatrixXd dtn_matrix(const ModeProblem& uncoupled, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "T_lambda needs lambda > 0");
  Eigen::MatrixXd K = uncoupled.A;
  K.diagonal() += lambda * uncoupled.mass;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularSystem, "lambda M + A not positive definite");
  const Eigen::MatrixXd X = llt.solve(uncoupled.E);
  Eigen::MatrixXd T = uncoupled.E.transpose() * X;
  return 0.5 * (T + T.transpose());
}

Eigen::MatrixXd dtn_matrix(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l, double lambda,
                           int N) {
  require_nondegenerate(kase, eq, pair);
  const ModeProblem mp =
      assemble_network(mode_network(kase, eq, pair, l, false), N, rate_scale_of(kase, eq, pair));
  return dtn_matrix(mp, lambda);
}

Eigen::MatrixXd b_lambda(const ModeProblem& uncoupled, double lambda) {
  Eigen::MatrixXd Bl = lambda * dtn_matrix(uncoupled, lambda);
  for (Eigen::Index k = 0; k < Bl.rows(); ++k) {
    if (uncoupled.kase == Case::PhaseTransition) {
      Bl.row(k) *= uncoupled.jumps[k];
      Bl.col(k) *= uncoupled.jumps[k];
    }
    Bl(k, k) += uncoupled.sigma_mu[k];
  }
  return Bl;
}

Eigen::MatrixXd b_lambda(Case kase, const EquilibriumState& eq, const PhasePair& pair, int l, double lambda,
                         int N) {
  require_nondegenerate(kase, eq, pair);
  const ModeProblem mp =
      assemble_network(mode_network(kase, eq, pair, l, false), N, rate_scale_of(kase, eq, pair));
  return b_lambda(mp, lambda);
}

namespace {

int negative_eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  int count = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] < 0.0) ++count;
  }
  return count;
}

double min_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

int b_lambda_unstable_count(const ModeProblem& uncoupled, double lambda_small, double lambda_large) {
  return negative_eigenvalues(b_lambda(uncoupled, lambda_small)) -
         negative_eigenvalues(b_lambda(uncoupled, lambda_large));
}

double b_lambda_root(const ModeProblem& uncoupled, double lo, double hi) {
  double flo = min_eigenvalue(b_lambda(uncoupled, lo));
  const double fhi = min_eigenvalue(b_lambda(uncoupled, hi));
  if ((flo < 0.0) == (fhi < 0.0)) throw Error(ErrorKind::InvalidArgument, "det B_lambda has no sign change");
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-13; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double fm = min_eigenvalue(b_lambda(uncoupled, mid));
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

B0Spectrum b0_closed_form(Case kase, const EquilibriumState& eq, const PhasePair& pair) {
  const Topology topo = topology(eq.geometry);
  const int m = eq.geometry.interface_count();
  const int n = eq.geometry.n;
  Eigen::VectorXd area(m);
  for (int k = 0; k < m; ++k) area[k] = topo.interfaces[k].area;
  const Eigen::VectorXd sq = area.cwiseSqrt();

  Eigen::MatrixXd ortho;
  B0Spectrum out;
  if (kase == Case::NoPhaseTransition) {
    ortho = sq.asDiagonal() * c_star(eq, pair) * sq.asDiagonal();
  } else {
    require_nondegenerate(kase, eq, pair);
    const auto comps = component_data(eq, pair);
    double integral = 0.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    for (const auto& c : comps) {
      integral += c.drho * c.rho * c.volume;
      (c.phase == Phase::One ? rho1 : rho2) = c.rho;
    }
    const double jump2 = (rho2 - rho1) * (rho2 - rho1);
    ortho = jump2 / integral * sq * sq.transpose();
    double total_area = area.sum();
    const double R = topo.interfaces[0].radius;
    for (int k = 0; k < m; ++k) ortho(k, k) -= pair.sigma * (n - 1) / (R * R);
    out.mu0 = pair.sigma * (n - 1) * total_area / (m * R * R);
    out.mu1 = jump2 * total_area / integral - pair.sigma * (n - 1) / (R * R);
  }
  const Eigen::MatrixXd indicator = sq.asDiagonal() * ortho * sq.asDiagonal();
  out.orthonormal_basis = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ortho, Eigen::EigenvaluesOnly).eigenvalues();
  out.indicator_basis = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(indicator, Eigen::EigenvaluesOnly).eigenvalues();
  return out;
}

SpectrumReport kernel_report(Case kase, const EquilibriumState& eq, const PhasePair& pair, int N, int L_max) {
  if (L_max < 2) throw Error(ErrorKind::InvalidArgument, "kernel_report needs L_max >= 2");
  SpectrumReport rep;
  for (int l = 0; l <= L_max; ++l) {
    const ModeProblem mp = assemble_mode(kase, eq, pair, l, N);
    const SpectrumSlice slice = generalized_spectrum(mp, 0);
    ModeKernel mk;
    mk.l = l;
    mk.multiplicity = mp.multiplicity;
    mk.algebraic = slice.near_zero_count;

    // ker L = ker A since B is invertible; chains of length two exist for kernel
    // vectors z with B z orthogonal to ker A
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mp.A);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double amax = ev.cwiseAbs().maxCoeff();
    std::vector<int> kernel_cols;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i]) <= 1e-10 * amax) kernel_cols.push_back(static_cast<int>(i));
    }
    mk.geometric = static_cast<int>(kernel_cols.size()) + mp.decoupled_kernel;
    if (!kernel_cols.empty()) {
      Eigen::MatrixXd K(mp.A.rows(), kernel_cols.size());
      for (std::size_t j = 0; j < kernel_cols.size(); ++j) K.col(j) = es.eigenvectors().col(kernel_cols[j]);
      const Eigen::MatrixXd S = K.transpose() * mp.B * K;
      const double scale = (K.cwiseAbs().transpose() * mp.B.cwiseAbs() * K.cwiseAbs()).maxCoeff();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ss(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < ss.eigenvalues().size(); ++i) {
        if (std::abs(ss.eigenvalues()[i]) <= 1e-8 * scale) ++mk.jordan_extra;
      }
    }
    rep.kernel_dim += mk.multiplicity * mk.geometric;
    rep.algebraic_dim += mk.multiplicity * mk.algebraic;
    rep.kernel_dim_l2 += mk.multiplicity * (mk.geometric + mk.jordan_extra);
    rep.positive_count += mk.multiplicity * slice.positive_count;
    if (mk.jordan_extra > 0) rep.semisimple = false;
    rep.modes.push_back(mk);
  }
  return rep;
}

}  // namespace verigin
