// selfcheck.hpp
#ifndef VERIGIN_SELFCHECK_HPP
#define VERIGIN_SELFCHECK_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace verigin {

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick subset of the acceptance checks, a few seconds in total.
std::vector<CheckLine> seed_check();

/// Prints one PASS/FAIL line per check; returns 0 when all pass, 2 otherwise.
int run_seed_check(std::ostream& out);

}  // namespace verigin

#endif  // VERIGIN_SELFCHECK_HPP
