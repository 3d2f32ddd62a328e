#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

#include "verigin/config.hpp"

using namespace verigin;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "schema_version": 1,
    "case": "phase-transition",
    "phases": [
      {"eos": {"family": "ideal-gas", "c": 1.0}, "law": {"preset": "darcy-const", "k": 1.0}},
      {"eos": {"family": "ideal-gas", "c": 2.0, "d": 0.4816}, "law": {"preset": "darcy-const", "k": 1.0}}
    ],
    "geometry": {"n": 3, "R_out": 2.0, "radii": [1.0]},
    "sigma": 0.05,
    "total_mass": 19.27
  })");
}

std::vector<ConfigIssue> issues_of(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    return e.issues();
  }
  FAIL("expected a ConfigError");
  return {};
}

bool has_pointer(const std::vector<ConfigIssue>& issues, const std::string& ptr) {
  return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) { return i.pointer == ptr; });
}

}  // namespace

TEST_CASE("minimal config and defaults") {
  const Config cfg = parse_config_json(minimal());
  CHECK(cfg.kase == Case::PhaseTransition);
  CHECK(cfg.geometry.n == 3);
  CHECK(cfg.geometry.layout == Layout::Concentric);
  CHECK(cfg.pair.sigma == 0.05);
  CHECK(cfg.total_mass == 19.27);
  CHECK(cfg.numerics.N == 100);
  CHECK(cfg.output.cadence == 1);
  CHECK(cfg.simulation.initial == InitialKind::Perturbed);
}

TEST_CASE("unknown keys are rejected with their path") {
  json doc = minimal();
  doc["colour"] = "blue";
  doc["phases"][1]["eos"]["gamma"] = 1.4;
  const auto issues = issues_of(doc);
  CHECK(has_pointer(issues, "/colour"));
  CHECK(has_pointer(issues, "/phases/1/eos/gamma"));
}

TEST_CASE("power-law exponent 1 is reported at its pointer") {
  json doc = minimal();
  doc["phases"][0]["eos"] = {{"family", "power-law"}, {"c", 1.0}, {"r", 1.0}};
  CHECK(has_pointer(issues_of(doc), "/phases/0/eos/r"));
}

TEST_CASE("unordered radii are reported at the geometry") {
  json doc = minimal();
  doc["case"] = "no-phase-transition";
  doc.erase("total_mass");
  doc["geometry"]["radii"] = {1.4, 0.8};
  doc["masses"] = {1.0, 2.0, 3.0};
  CHECK(has_pointer(issues_of(doc), "/geometry/radii"));
}

TEST_CASE("every problem is reported at once") {
  json doc = minimal();
  doc["schema_version"] = 2;
  doc["sigma"] = -1.0;
  doc["numerics"] = {{"N", 0}, {"dt", -1.0}};
  doc["phases"][1]["law"] = {{"preset", "darcy-affine"}, {"k0", 1.0}, {"k1", -0.5}};
  doc["masses"] = {1.0, 2.0};
  const auto issues = issues_of(doc);
  for (const char* p : {"/schema_version", "/sigma", "/numerics/N", "/numerics/dt", "/phases/1/law/k1", "/masses"})
    CHECK_MESSAGE(has_pointer(issues, p), p);
  CHECK(issues.size() >= 6);
}

TEST_CASE("mass field must match the case") {
  json doc = minimal();
  doc.erase("total_mass");
  CHECK(has_pointer(issues_of(doc), "/total_mass"));
  doc["case"] = "no-phase-transition";
  doc["masses"] = {1.0};
  CHECK(has_pointer(issues_of(doc), "/masses"));
}

TEST_CASE("malformed files are parse errors") {
  const std::string path = "verigin_test_bad_config.json";
  {
    std::ofstream out(path);
    out << "{\"schema_version\": 1,";
  }
  try {
    parse_config(path);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_config("no/such/file.json"), ConfigError);
}

TEST_CASE("config hash is stable and content sensitive") {
  const json a = minimal();
  json b = minimal();
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b["sigma"] = 0.06;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"droplet_phase_transition", "ostwald_two_droplets", "shells_no_transition"}) {
    const Config cfg = parse_config(std::string(VERIGIN_CONFIG_DIR) + "/" + name + ".json");
    CHECK(cfg.schema_version == 1);
  }
}
