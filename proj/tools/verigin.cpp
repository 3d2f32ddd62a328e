// verigin.cpp
#include <CLI11.hpp>
#include <iostream>

#include "verigin/commands.hpp"
#include "verigin/selfcheck.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-phase compressible flow with surface tension: equilibria, stability and radial dynamics"};
  app.require_subcommand(0, 1);
  bool seed_check = false;
  app.add_flag("--seed-check", seed_check, "Run the quick self-check subset and exit");

  verigin::CommandOptions opts;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"validate", "Check a config and print OK"},
      {"equilibrium", "Solve for the equilibrium"},
      {"stability", "Equilibrium plus the thermodynamic stability test"},
      {"spectrum", "Discretized spectrum, kernel and interface pencil"},
      {"symbol", "Parabolicity scan of the interface symbol"},
      {"simulate", "Radially symmetric time integration"},
      {"sweep", "Repeat a command over a parameter range"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "Config file (JSON)")->required();
    sub->add_option("--out", opts.out_dir, "Output directory (default: output.dir from the config, else ./out)");
    if (std::string(name) == "sweep") {
      sub->add_option("--param", opts.param, "Parameter, e.g. sigma or phases.0.eos.c")->required();
      sub->add_option("--range", opts.range, "lo:hi:count")->required();
      sub->add_option("--cmd", opts.sweep_command, "Command per point")->capture_default_str();
    }
    sub->callback([&opts, sub] { opts.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : verigin::ExitValidation;
  }

  try {
    if (seed_check) return verigin::run_seed_check(std::cout);
    if (opts.command.empty()) {
      std::cerr << app.help();
      return verigin::ExitValidation;
    }
    return verigin::run_command(opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "verigin: internal error: " << e.what() << '\n';
    return verigin::ExitInternal;
  }
}
