// config.hpp
#ifndef VERIGIN_CONFIG_HPP
#define VERIGIN_CONFIG_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "verigin/equilibria.hpp"
#include "verigin/error.hpp"
#include "verigin/simulator.hpp"
#include "verigin/symbol.hpp"

namespace verigin {

struct Numerics {
  int N = 100;          ///< cells (simulator) or elements (spectrum) per component
  double dt = 1e-3;
  double t_end = 1.0;
  int L_max = 4;
  ScanGrid lambda_grid;
  double newton_tol = 1e-11;
  int max_halvings = 10;
};

struct OutputOptions {
  std::string dir;  ///< empty: use the --out flag
  int cadence = 1;
  bool json = true;
  bool csv = true;
};

enum class InitialKind { Equilibrium, Perturbed };

struct SimulationOptions {
  InitialKind initial = InitialKind::Perturbed;
  double perturbation = 0.01;
  bool stop_at_equilibrium = true;
};

struct Config {
  int schema_version = 1;
  Case kase = Case::NoPhaseTransition;
  PhasePair pair;
  RadialGeometry geometry;
  std::vector<double> masses;  ///< case i, one per component
  double total_mass = 0.0;     ///< case ii
  Numerics numerics;
  EventThresholds events;
  OutputOptions output;
  SimulationOptions simulation;
  nlohmann::json source;  ///< the document as read
};

struct ConfigIssue {
  std::string pointer;  ///< JSON pointer of the offending value
  std::string message;
};

/// Every problem found in a config. what() lists them one per line.
class ConfigError : public Error {
 public:
  ConfigError(ErrorKind kind, std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Throws ConfigError with kind ParseError for malformed JSON and
/// ValidationError (all issues at once) for an invalid document.
Config parse_config(const std::string& path);
Config parse_config_json(const nlohmann::json& doc);

/// Stable 64-bit FNV-1a of the compact dump, hex encoded.
std::string config_hash(const nlohmann::json& doc);

}  // namespace verigin

#endif  // VERIGIN_CONFIG_HPP
