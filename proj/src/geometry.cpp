// geometry.cpp
#include "verigin/geometry.hpp"

#include <sstream>

#include "verigin/error.hpp"

namespace verigin {

// both layouts: one component per interface plus the outer/continuous phase
int RadialGeometry::component_count() const { return interface_count() + 1; }

namespace {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

}  // namespace

std::int64_t harmonic_multiplicity(int n, int l) {
  if (l < 0) return 0;
  return binomial(n + l - 1, l) - binomial(n + l - 3, l - 2);
}

CurvatureEigenvalue curvature_op_eigenvalue(int n, double R, int l) {
  if (l < 0) throw Error(ErrorKind::InvalidArgument, "harmonic degree must be nonnegative");
  const long numerator = static_cast<long>(l) * (l + n - 2) - (n - 1);
  return {static_cast<double>(numerator) / (R * R), harmonic_multiplicity(n, l)};
}

Phase component_phase(const RadialGeometry& g, int component) {
  if (g.layout == Layout::Droplets) {
    return component < g.interface_count() ? Phase::One : Phase::Two;
  }
  return component % 2 == 0 ? g.inner_phase : other(g.inner_phase);
}

void validate_geometry(const RadialGeometry& g) {
  std::ostringstream os;
  if (g.n < 2) {
    throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  }
  if (!(g.R_out > 0.0)) throw Error(ErrorKind::GeometryDegenerate, "outer radius must be positive");
  if (g.layout == Layout::Concentric) {
    double prev = 0.0;
    for (std::size_t k = 0; k < g.radii.size(); ++k) {
      if (!(g.radii[k] > prev)) {
        os << "radius " << k << " = " << g.radii[k] << " not above " << prev;
        throw Error(ErrorKind::GeometryDegenerate, os.str());
      }
      prev = g.radii[k];
    }
    if (!(g.R_out > prev)) {
      os << "outermost interface " << prev << " not inside R_out = " << g.R_out;
      throw Error(ErrorKind::GeometryDegenerate, os.str());
    }
    return;
  }
  if (g.inner_phase != Phase::One) {
    throw Error(ErrorKind::InvalidArgument, "droplet layout requires phase one droplets");
  }
  double occupied = 0.0;
  for (double R : g.radii) {
    if (!(R > 0.0 && R < g.R_out)) {
      os << "droplet radius " << R << " outside (0, R_out)";
      throw Error(ErrorKind::GeometryDegenerate, os.str());
    }
    occupied += std::pow(R, g.n);
  }
  if (!(occupied < std::pow(g.R_out, g.n))) {
    throw Error(ErrorKind::GeometryDegenerate, "droplets fill the container");
  }
}

Topology topology(const RadialGeometry& g) {
  validate_geometry(g);
  Topology t;
  const int m = g.interface_count();
  const int n = g.n;
  if (g.layout == Layout::Concentric) {
    for (int c = 0; c <= m; ++c) {
      const double a = c == 0 ? 0.0 : g.radii[c - 1];
      const double b = c == m ? g.R_out : g.radii[c];
      ComponentInfo info{component_phase(g, c), shell_volume(n, a, b), {}};
      if (c > 0) info.interfaces.push_back(c - 1);
      if (c < m) info.interfaces.push_back(c);
      t.components.push_back(info);
    }
    for (int k = 0; k < m; ++k) {
      const int orient = component_phase(g, k) == Phase::One ? 1 : -1;
      t.interfaces.push_back({g.radii[k], sphere_area(n, g.radii[k]), k, k + 1, orient});
    }
    return t;
  }

  double continuous = ball_volume(n, g.R_out);
  for (int k = 0; k < m; ++k) {
    t.components.push_back({Phase::One, ball_volume(n, g.radii[k]), {k}});
    continuous -= ball_volume(n, g.radii[k]);
  }
  ComponentInfo outer{Phase::Two, continuous, {}};
  for (int k = 0; k < m; ++k) {
    outer.interfaces.push_back(k);
    t.interfaces.push_back({g.radii[k], sphere_area(n, g.radii[k]), k, m, 1});
  }
  t.components.push_back(outer);
  return t;
}

double droplet_cell_radius(const RadialGeometry& g, int droplet) {
  const int m = g.interface_count();
  double occupied = 0.0;
  for (double R : g.radii) occupied += std::pow(R, g.n);
  const double share = (std::pow(g.R_out, g.n) - occupied) / m;
  return std::pow(std::pow(g.radii[droplet], g.n) + share, 1.0 / g.n);
}

}  // namespace verigin
