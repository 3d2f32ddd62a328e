// mobility.hpp
#ifndef VERIGIN_MOBILITY_HPP
#define VERIGIN_MOBILITY_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>

#include "verigin/eos.hpp"

namespace verigin {

/// u = -k(pi, s) grad pi with s = |grad pi|^2.
struct Darcy {
  std::function<double(double, double)> k;
  std::function<double(double, double)> dk_ds;
};

/// g(|u|) u = -l(pi) grad pi; s g(s) must be strictly increasing.
struct Forchheimer {
  std::function<double(double)> l;
  std::function<double(double)> g;
};

struct VelocityLaw {
  std::variant<Darcy, Forchheimer> kind;
  std::string preset;  ///< name used in reports, empty for hand-built laws
};

VelocityLaw darcy_const(double k);
VelocityLaw darcy_affine(double k0, double k1);  ///< k = k0 + k1 s
VelocityLaw forchheimer_linear(double l, double g0, double g1);  ///< g(v) = g0 + g1 v

/// Scalar permeability k such that u = -k grad pi. For Forchheimer the speed
/// w = k sqrt(s) solves g(w) w = l sqrt(s).
double effective_permeability(const VelocityLaw& law, double pressure, double s);

Eigen::VectorXd velocity(const VelocityLaw& law, double pressure,
                         const Eigen::Ref<const Eigen::VectorXd>& grad_pressure);

/// Pressure/gradient box over which the ellipticity conditions are sampled.
struct EllipticityWindow {
  double pressure_min = 1.0;
  double pressure_max = 1.0;
  double s_min = 0.0;
  double s_max = 1.0;
};

/// Checks k > 0 and k + 2 s dk/ds > 0 on a samples x samples grid. For
/// Forchheimer laws dk/ds is a central difference with step max(1e-6, 1e-6 s).
ValidationReport validate_ellipticity(const VelocityLaw& law, const EllipticityWindow& window,
                                      int samples);

}  // namespace verigin

#endif  // VERIGIN_MOBILITY_HPP
