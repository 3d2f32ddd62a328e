// geometry.hpp
#ifndef VERIGIN_GEOMETRY_HPP
#define VERIGIN_GEOMETRY_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace verigin {

enum class Phase { One = 1, Two = 2 };

inline Phase other(Phase p) { return p == Phase::One ? Phase::Two : Phase::One; }
inline int index(Phase p) { return p == Phase::One ? 0 : 1; }

/// Concentric: nested spheres around the origin, phases alternate outward.
/// Droplets: m disjoint balls of phase one inside a connected phase-two region
/// (the nonlinear simulator only handles Concentric).
enum class Layout { Concentric, Droplets };

struct RadialGeometry {
  int n = 3;
  double R_out = 1.0;
  std::vector<double> radii;
  Phase inner_phase = Phase::One;
  Layout layout = Layout::Concentric;

  int interface_count() const { return static_cast<int>(radii.size()); }
  int component_count() const;
};

/// Volume of the unit ball in R^n.
template <class Scalar = double>
Scalar unit_ball_volume(int n) {
  using std::pow;
  using std::tgamma;
  return pow(Scalar(std::numbers::pi), Scalar(n) / 2) / tgamma(Scalar(n) / 2 + 1);
}

template <class Scalar = double>
Scalar ball_volume(int n, Scalar R) {
  using std::pow;
  return unit_ball_volume<Scalar>(n) * pow(R, n);
}

template <class Scalar = double>
Scalar sphere_area(int n, Scalar R) {
  using std::pow;
  return Scalar(n) * unit_ball_volume<Scalar>(n) * pow(R, n - 1);
}

/// Volume of the shell a <= r <= b.
template <class Scalar = double>
Scalar shell_volume(int n, Scalar a, Scalar b) {
  using std::pow;
  return unit_ball_volume<Scalar>(n) * (pow(b, n) - pow(a, n));
}

/// Equilibrium jump pi_2 - pi_1 across a sphere bounding a phase-one ball.
template <class Scalar = double>
Scalar mean_curvature_jump(int n, Scalar R, Scalar sigma) {
  return -Scalar(n - 1) * sigma / R;
}

/// Dimension of the degree-l spherical harmonics on S^{n-1}.
std::int64_t harmonic_multiplicity(int n, int l);

struct CurvatureEigenvalue {
  double value;             ///< (l(l+n-2) - (n-1)) / R^2
  std::int64_t multiplicity;
};

/// Eigenvalue of the linearized curvature operator -(n-1)/R^2 - Laplace-Beltrami
/// on degree-l harmonics of a sphere of radius R. Exactly zero for l = 1.
CurvatureEigenvalue curvature_op_eigenvalue(int n, double R, int l);

/// Abstract component/interface adjacency used by the stability formulas.
struct ComponentInfo {
  Phase phase;
  double volume;
  std::vector<int> interfaces;  ///< indices of interfaces on the component boundary
};

struct InterfaceInfo {
  double radius;
  double area;
  int inner;        ///< component enclosed by the sphere
  int outer;        ///< component outside the sphere
  int orientation;  ///< +1 when the outer normal of phase one points away from the center
};

struct Topology {
  std::vector<ComponentInfo> components;
  std::vector<InterfaceInfo> interfaces;
};

Phase component_phase(const RadialGeometry& g, int component);

/// Throws GeometryDegenerate unless radii are ordered, separated, and inside R_out.
void validate_geometry(const RadialGeometry& g);

Topology topology(const RadialGeometry& g);

/// Outer radius of the phase-two cell assigned to each droplet: cells share the
/// continuous phase volume equally.
double droplet_cell_radius(const RadialGeometry& g, int droplet);

}  // namespace verigin

#endif  // VERIGIN_GEOMETRY_HPP
