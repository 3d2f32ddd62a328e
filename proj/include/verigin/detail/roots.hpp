// roots.hpp
#ifndef VERIGIN_DETAIL_ROOTS_HPP
#define VERIGIN_DETAIL_ROOTS_HPP

#include <cmath>
#include <optional>

namespace verigin::detail {

struct RootResult {
  double x;
  int iterations;
};

/// Safeguarded Newton iteration for an increasing function on a bracket [lo, hi]
/// with f(lo) <= 0 <= f(hi). Newton candidates outside the live bracket, or
/// iterations where the bracket stalls, fall back to bisection. Returns nullopt
/// when the iteration budget runs out.
template <class F, class DF>
std::optional<RootResult> newton_bisect(F&& f, DF&& df, double lo, double hi, double rel_tol,
                                        int max_iter) {
  double x = 0.5 * (lo + hi);
  double width_two_ago = 2.0 * (hi - lo);
  double width_one_ago = hi - lo;
  for (int it = 1; it <= max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return RootResult{x, it};
    if (fx < 0.0) lo = x; else hi = x;

    const double d = df(x);
    double next = 0.5 * (lo + hi);
    const bool stalled = (hi - lo) > 0.5 * width_two_ago;
    if (d > 0.0 && std::isfinite(d) && !stalled) {
      const double cand = x - fx / d;
      if (cand > lo && cand < hi) next = cand;
    }
    width_two_ago = width_one_ago;
    width_one_ago = hi - lo;

    const double step = std::abs(next - x);
    x = next;
    if (step <= rel_tol * std::abs(x) || (hi - lo) <= rel_tol * std::abs(x)) {
      return RootResult{x, it};
    }
  }
  return std::nullopt;
}

}  // namespace verigin::detail

#endif  // VERIGIN_DETAIL_ROOTS_HPP
