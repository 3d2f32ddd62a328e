// mobility.cpp
#include "verigin/mobility.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "verigin/detail/roots.hpp"
#include "verigin/error.hpp"

namespace verigin {

VelocityLaw darcy_const(double k) {
  return VelocityLaw{Darcy{[k](double, double) { return k; }, [](double, double) { return 0.0; }},
                     "darcy-const"};
}

VelocityLaw darcy_affine(double k0, double k1) {
  return VelocityLaw{Darcy{[k0, k1](double, double s) { return k0 + k1 * s; },
                           [k1](double, double) { return k1; }},
                     "darcy-affine"};
}

VelocityLaw forchheimer_linear(double l, double g0, double g1) {
  return VelocityLaw{
      Forchheimer{[l](double) { return l; }, [g0, g1](double v) { return g0 + g1 * v; }},
      "forchheimer-linear"};
}

namespace {

double forchheimer_speed(const Forchheimer& law, double pressure, double s) {
  const double target = law.l(pressure) * std::sqrt(s);
  auto drag = [&](double w) { return law.g(w) * w; };
  auto drag_slope = [&](double w) {
    const double h = std::max(1e-7, 1e-7 * w);
    const double lo = std::max(0.0, w - h);
    return (drag(w + h) - drag(lo)) / (w + h - lo);
  };

  double hi = std::max(target / law.g(0.0), std::numeric_limits<double>::min());
  int grow = 0;
  while (drag(hi) < target) {
    hi *= 2.0;
    if (++grow > 200) throw Error(ErrorKind::NoConvergence, "Forchheimer bracket did not close");
  }
  auto root = detail::newton_bisect([&](double w) { return drag(w) - target; }, drag_slope, 0.0,
                                    hi, 1e-15, 200);
  if (!root) throw Error(ErrorKind::NoConvergence, "Forchheimer inversion exceeded budget");
  if (!(drag_slope(root->x) > 0.0)) {
    std::ostringstream os;
    os << "s g(s) not increasing near speed " << root->x;
    throw Error(ErrorKind::NonMonotoneDrag, os.str());
  }
  return root->x;
}

}  // namespace

double effective_permeability(const VelocityLaw& law, double pressure, double s) {
  if (s < 0.0) throw Error(ErrorKind::InvalidArgument, "s = |grad pi|^2 must be nonnegative");
  if (const auto* darcy = std::get_if<Darcy>(&law.kind)) return darcy->k(pressure, s);
  const auto& forch = std::get<Forchheimer>(law.kind);
  const double k0 = forch.l(pressure) / forch.g(0.0);
  // constant drag over the Darcy speed: the law reduces to Darcy with l / g
  if (s == 0.0 || forch.g(k0 * std::sqrt(s)) == forch.g(0.0)) return k0;
  return forchheimer_speed(forch, pressure, s) / std::sqrt(s);
}

Eigen::VectorXd velocity(const VelocityLaw& law, double pressure,
                         const Eigen::Ref<const Eigen::VectorXd>& grad_pressure) {
  const double s = grad_pressure.squaredNorm();
  return -effective_permeability(law, pressure, s) * grad_pressure;
}

ValidationReport validate_ellipticity(const VelocityLaw& law, const EllipticityWindow& window,
                                      int samples) {
  if (samples < 4) throw Error(ErrorKind::InvalidArgument, "validate_ellipticity needs >= 4 samples");
  ValidationReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  report.min_secondary = std::numeric_limits<double>::infinity();
  const auto* darcy = std::get_if<Darcy>(&law.kind);

  for (int i = 0; i < samples; ++i) {
    const double p = window.pressure_min +
                     (window.pressure_max - window.pressure_min) * i / double(samples - 1);
    for (int j = 0; j < samples; ++j) {
      const double s = window.s_min + (window.s_max - window.s_min) * j / double(samples - 1);
      double k = 0.0;
      double dk = 0.0;
      try {
        k = effective_permeability(law, p, s);
        if (darcy && darcy->dk_ds) {
          dk = darcy->dk_ds(p, s);
        } else {
          const double h = std::max(1e-6, 1e-6 * s);
          const double lo = std::max(0.0, s - h);
          dk = (effective_permeability(law, p, s + h) - effective_permeability(law, p, lo)) /
               (s + h - lo);
        }
      } catch (const Error& e) {
        report.passed = false;
        report.min_value = -std::numeric_limits<double>::infinity();
        report.min_location = s;
        report.message = e.what();
        return report;
      }
      const double combo = k + 2.0 * s * dk;
      if (k < report.min_value) {
        report.min_value = k;
        report.min_location = s;
      }
      report.min_secondary = std::min(report.min_secondary, combo);
    }
  }
  report.passed = report.min_value > 0.0 && report.min_secondary > 0.0;
  std::ostringstream os;
  if (report.passed) {
    os << "k and k + 2 s dk/ds positive on the window";
  } else {
    os << "min k = " << report.min_value << " (at s = " << report.min_location
       << "), min k + 2 s dk/ds = " << report.min_secondary;
  }
  report.message = os.str();
  return report;
}

}  // namespace verigin
