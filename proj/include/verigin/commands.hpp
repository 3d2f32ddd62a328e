// commands.hpp
#ifndef VERIGIN_COMMANDS_HPP
#define VERIGIN_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "verigin/config.hpp"

namespace verigin {

enum ExitCode : int { ExitOk = 0, ExitValidation = 1, ExitNumerical = 2, ExitInternal = 3 };

/// Exit code for a library error kind.
int exit_code_for(ErrorKind kind);

struct CommandOptions {
  std::string command;      ///< equilibrium, stability, spectrum, symbol, simulate, sweep, validate
  std::string config_path;
  std::string out_dir;      ///< empty: output.dir from the config, else "out"
  // sweep only
  std::string param;        ///< "sigma", a dotted path or a JSON pointer
  std::string range;        ///< "lo:hi:count", endpoints included
  std::string sweep_command = "stability";
};

/// Runs one subcommand. Reports go to out_dir; diagnostics to err.
int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err);

// Module pipelines, each returning the "outputs" block of report.json. They
// throw verigin::Error on failure.
nlohmann::json equilibrium_outputs(const Config& cfg);
nlohmann::json stability_outputs(const Config& cfg);
nlohmann::json spectrum_outputs(const Config& cfg);
nlohmann::json symbol_outputs(const Config& cfg, std::string& csv);
nlohmann::json simulate_outputs(const Config& cfg, std::string& csv, int& exit_code);

EquilibriumState solve_equilibrium(const Config& cfg);

/// "lo:hi:count" to count equally spaced values.
std::vector<double> parse_range(const std::string& range);

/// "sigma" -> "/sigma", "phases.0.eos.c" -> "/phases/0/eos/c"; pointers pass through.
std::string param_pointer(const std::string& param);

/// Worker count for sweeps: VERIGIN_THREADS if set, else the logical processors.
int sweep_threads(int runs);

}  // namespace verigin

#endif  // VERIGIN_COMMANDS_HPP
