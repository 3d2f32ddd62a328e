#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "verigin/commands.hpp"

using namespace verigin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string config_path(const char* name) { return std::string(VERIGIN_CONFIG_DIR) + "/" + name + ".json"; }

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / (std::string("verigin_test_") + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("error kinds map to exit codes") {
  CHECK(exit_code_for(ErrorKind::ValidationError) == ExitValidation);
  CHECK(exit_code_for(ErrorKind::ParseError) == ExitValidation);
  CHECK(exit_code_for(ErrorKind::InvalidArgument) == ExitValidation);
  CHECK(exit_code_for(ErrorKind::NoConvergence) == ExitNumerical);
  CHECK(exit_code_for(ErrorKind::NewtonDiverged) == ExitNumerical);
}

TEST_CASE("validate") {
  std::ostringstream out, err;
  CommandOptions opts;
  opts.command = "validate";
  opts.config_path = config_path("shells_no_transition");
  CHECK(run_command(opts, out, err) == ExitOk);
  CHECK(out.str() == "OK\n");

  const fs::path dir = scratch("invalid");
  fs::create_directories(dir);
  json doc = json::parse(slurp(opts.config_path));
  doc["sigma"] = -1.0;
  doc["geometry"]["bogus"] = 1;
  std::ofstream(dir / "bad.json") << doc.dump();
  opts.config_path = (dir / "bad.json").string();
  std::ostringstream out2, err2;
  CHECK(run_command(opts, out2, err2) == ExitValidation);
  CHECK(err2.str().find("/sigma") != std::string::npos);
  CHECK(err2.str().find("/geometry/bogus") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("unknown command and droplet simulation are validation failures") {
  std::ostringstream out, err;
  CommandOptions opts;
  opts.command = "frobnicate";
  opts.config_path = config_path("shells_no_transition");
  CHECK(run_command(opts, out, err) == ExitValidation);
  opts.command = "simulate";
  opts.config_path = config_path("ostwald_two_droplets");
  opts.out_dir = scratch("ostwald").string();
  CHECK(run_command(opts, out, err) == ExitValidation);
  fs::remove_all(opts.out_dir);
}

TEST_CASE("report layout") {
  std::ostringstream out, err;
  CommandOptions opts;
  opts.command = "stability";
  opts.config_path = config_path("droplet_phase_transition");
  opts.out_dir = scratch("report").string();
  REQUIRE(run_command(opts, out, err) == ExitOk);
  const json rep = json::parse(slurp(fs::path(opts.out_dir) / "report.json"));
  CHECK(rep["command"] == "stability");
  CHECK(rep["status"] == "ok");
  CHECK(rep.contains("timestamp"));
  CHECK(rep["outputs"]["zeta"].get<double>() == doctest::Approx(0.263889).epsilon(1e-5));
  CHECK(rep["outputs"]["verdict"] == "NormallyStable");
  fs::remove_all(opts.out_dir);
}

TEST_CASE("range and parameter parsing") {
  const auto v = parse_range("0.5:1.5:5");
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 0.5);
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v.back() == 1.5);
  CHECK(parse_range("2:2:1") == std::vector<double>{2.0});
  CHECK_THROWS(parse_range("1:2"));
  CHECK_THROWS(parse_range("a:2:3"));
  CHECK_THROWS(parse_range("1:2:0"));
  CHECK(param_pointer("sigma") == "/sigma");
  CHECK(param_pointer("phases.0.eos.c") == "/phases/0/eos/c");
  CHECK(param_pointer("/geometry/R_out") == "/geometry/R_out");
}

TEST_CASE("sweep equals independent runs") {
  const fs::path dir = scratch("sweep");
  setenv("VERIGIN_THREADS", "3", 1);
  CHECK(sweep_threads(20) == 3);
  CHECK(sweep_threads(2) == 2);
  std::ostringstream out, err;
  CommandOptions opts;
  opts.command = "sweep";
  opts.config_path = config_path("droplet_phase_transition");
  opts.out_dir = dir.string();
  opts.param = "sigma";
  opts.range = "0.02:0.07:20";
  REQUIRE(run_command(opts, out, err) == ExitOk);
  unsetenv("VERIGIN_THREADS");

  std::istringstream csv(slurp(dir / "sweep_summary.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "index,sigma,zeta,verdict,exit_code");
  const Config base = parse_config(opts.config_path);
  const auto values = parse_range(opts.range);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream ls(line);
    std::string idx, val, zeta, verdict, code;
    std::getline(ls, idx, ',');
    std::getline(ls, val, ',');
    std::getline(ls, zeta, ',');
    std::getline(ls, verdict, ',');
    std::getline(ls, code, ',');
    const int i = std::stoi(idx);
    json doc = base.source;
    doc["sigma"] = values[i];
    const json ref = stability_outputs(parse_config_json(doc));
    CHECK(std::stod(val) == values[i]);
    CHECK(std::stod(zeta) == ref["zeta"].get<double>());
    CHECK(verdict == ref["verdict"].get<std::string>());
    CHECK(code == "0");
    CHECK(fs::exists(dir / ("run_" + std::string(idx.size() < 3 ? 3 - idx.size() : 0, '0') + idx) / "report.json"));
    ++rows;
  }
  CHECK(rows == 20);
  fs::remove_all(dir);
}

TEST_CASE("sweep rejects a non-numeric parameter") {
  std::ostringstream out, err;
  CommandOptions opts;
  opts.command = "sweep";
  opts.config_path = config_path("droplet_phase_transition");
  opts.out_dir = scratch("badsweep").string();
  opts.param = "geometry.layout";
  opts.range = "0:1:2";
  CHECK(run_command(opts, out, err) == ExitValidation);
  fs::remove_all(opts.out_dir);
}
