// config.cpp
#include "verigin/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace verigin {

namespace {

using nlohmann::json;

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << '\n';
    os << (issues[i].pointer.empty() ? "/" : issues[i].pointer) << ": " << issues[i].message;
  }
  return os.str();
}

// Collects issues instead of stopping at the first one.
class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& ptr, const std::string& msg) { issues.push_back({ptr, msg}); }

  bool object(const json& v, const std::string& ptr) {
    if (v.is_object()) return true;
    fail(ptr, "expected an object");
    return false;
  }

  void allow_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) fail(ptr + "/" + it.key(), "unknown key");
    }
  }

  std::optional<double> number(const json& obj, const std::string& ptr, const char* key, bool required) {
    const std::string p = ptr + "/" + key;
    if (!obj.contains(key)) {
      if (required) fail(p, "required");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(p, "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(p, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<double> positive(const json& obj, const std::string& ptr, const char* key, bool required) {
    auto x = number(obj, ptr, key, required);
    if (x && !(*x > 0.0)) {
      fail(ptr + "/" + key, "must be > 0");
      return std::nullopt;
    }
    return x;
  }

  std::optional<int> integer(const json& obj, const std::string& ptr, const char* key, bool required, int min) {
    const std::string p = ptr + "/" + key;
    if (!obj.contains(key)) {
      if (required) fail(p, "required");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(p, "expected an integer");
      return std::nullopt;
    }
    const auto x = v.get<std::int64_t>();
    if (x < min || x > 1000000000) {
      fail(p, "must be an integer >= " + std::to_string(min));
      return std::nullopt;
    }
    return static_cast<int>(x);
  }

  std::optional<std::string> choice(const json& obj, const std::string& ptr, const char* key, bool required,
                                    std::initializer_list<const char*> values) {
    const std::string p = ptr + "/" + key;
    if (!obj.contains(key)) {
      if (required) fail(p, "required");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    std::string list;
    for (const char* s : values) list += std::string(list.empty() ? "" : ", ") + '"' + s + '"';
    if (!v.is_string()) {
      fail(p, "expected one of " + list);
      return std::nullopt;
    }
    const std::string s = v.get<std::string>();
    for (const char* c : values) {
      if (s == c) return s;
    }
    fail(p, "expected one of " + list + ", got \"" + s + "\"");
    return std::nullopt;
  }
};

std::optional<EquationOfState> read_eos(Reader& rd, const json& e, const std::string& ptr) {
  if (!rd.object(e, ptr)) return std::nullopt;
  rd.allow_keys(e, ptr, {"family", "c", "r", "d", "density_range"});
  const auto family = rd.choice(e, ptr, "family", true, {"ideal-gas", "power-law"});
  const auto c = rd.positive(e, ptr, "c", true);
  const auto d = rd.number(e, ptr, "d", false);
  DensityRange range;
  bool ok = family && c;
  if (e.contains("density_range")) {
    const json& r = e.at("density_range");
    const std::string p = ptr + "/density_range";
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      rd.fail(p, "expected [min, max]");
      ok = false;
    } else {
      range = {r[0].get<double>(), r[1].get<double>()};
      if (!(range.min > 0.0 && range.min < range.max && std::isfinite(range.max))) {
        rd.fail(p, "need 0 < min < max");
        ok = false;
      }
    }
  }
  std::optional<double> r;
  if (family == "power-law") {
    r = rd.positive(e, ptr, "r", true);
    if (r && *r == 1.0) {
      rd.fail(ptr + "/r", "power-law exponent must differ from 1");
      r.reset();
    }
    ok = ok && r;
  } else if (family && e.contains("r")) {
    rd.fail(ptr + "/r", "only used by the power-law family");
  }
  if (!ok) return std::nullopt;
  EquationOfState eos = *family == "ideal-gas" ? ideal_gas(*c, d.value_or(0.0), range)
                                                : power_law(*c, *r, d.value_or(0.0), range);
  const ValidationReport rep = validate_eos(eos, 200);
  if (!rep.passed) {
    rd.fail(ptr, rep.message);
    return std::nullopt;
  }
  return eos;
}

std::optional<VelocityLaw> read_law(Reader& rd, const json& l, const std::string& ptr,
                                    const std::optional<EquationOfState>& eos) {
  if (!rd.object(l, ptr)) return std::nullopt;
  const auto preset = rd.choice(l, ptr, "preset", true, {"darcy-const", "darcy-affine", "forchheimer-linear"});
  if (!preset) {
    rd.allow_keys(l, ptr, {"preset", "k", "k0", "k1", "l", "g0", "g1"});
    return std::nullopt;
  }
  std::optional<VelocityLaw> law;
  if (*preset == "darcy-const") {
    rd.allow_keys(l, ptr, {"preset", "k"});
    if (auto k = rd.positive(l, ptr, "k", true)) law = darcy_const(*k);
  } else if (*preset == "darcy-affine") {
    rd.allow_keys(l, ptr, {"preset", "k0", "k1"});
    auto k0 = rd.positive(l, ptr, "k0", true);
    auto k1 = rd.number(l, ptr, "k1", true);
    if (k1 && *k1 < 0.0) {
      rd.fail(ptr + "/k1", "must be >= 0");
      k1.reset();
    }
    if (k0 && k1) law = darcy_affine(*k0, *k1);
  } else {
    rd.allow_keys(l, ptr, {"preset", "l", "g0", "g1"});
    auto lv = rd.positive(l, ptr, "l", true);
    auto g0 = rd.positive(l, ptr, "g0", true);
    const auto g1 = rd.number(l, ptr, "g1", true);
    const bool g1_ok = g1 && *g1 >= 0.0;
    if (g1 && !g1_ok) rd.fail(ptr + "/g1", "must be >= 0");
    if (lv && g0 && g1_ok) law = forchheimer_linear(*lv, *g0, *g1);
  }
  if (law && eos) {
    EllipticityWindow w;
    w.pressure_min = pressure_from_density(*eos, eos->range.min);
    w.pressure_max = pressure_from_density(*eos, eos->range.max);
    w.s_min = 0.0;
    w.s_max = 1e4;
    const ValidationReport rep = validate_ellipticity(*law, w, 12);
    if (!rep.passed) {
      rd.fail(ptr, rep.message);
      return std::nullopt;
    }
  }
  return law;
}

void read_grid(Reader& rd, const json& g, const std::string& ptr, ScanGrid& grid) {
  if (!rd.object(g, ptr)) return;
  rd.allow_keys(g, ptr, {"lambda_count", "arg_count", "xi_count", "lambda_min", "lambda_max", "xi_min", "xi_max"});
  if (auto v = rd.integer(g, ptr, "lambda_count", false, 1)) grid.lambda_count = *v;
  if (auto v = rd.integer(g, ptr, "arg_count", false, 1)) grid.arg_count = *v;
  if (auto v = rd.integer(g, ptr, "xi_count", false, 1)) grid.xi_count = *v;
  if (auto v = rd.positive(g, ptr, "lambda_min", false)) grid.lambda_min = *v;
  if (auto v = rd.positive(g, ptr, "lambda_max", false)) grid.lambda_max = *v;
  if (auto v = rd.positive(g, ptr, "xi_min", false)) grid.xi_min = *v;
  if (auto v = rd.positive(g, ptr, "xi_max", false)) grid.xi_max = *v;
  if (grid.lambda_min > grid.lambda_max) rd.fail(ptr + "/lambda_max", "must be >= lambda_min");
  if (grid.xi_min > grid.xi_max) rd.fail(ptr + "/xi_max", "must be >= xi_min");
}

void read_numerics(Reader& rd, const json& v, Numerics& num) {
  const std::string ptr = "/numerics";
  if (!rd.object(v, ptr)) return;
  rd.allow_keys(v, ptr, {"N", "dt", "t_end", "L_max", "lambda_grid", "tolerances"});
  if (auto x = rd.integer(v, ptr, "N", false, 4)) num.N = *x;
  if (auto x = rd.positive(v, ptr, "dt", false)) num.dt = *x;
  if (auto x = rd.positive(v, ptr, "t_end", false)) num.t_end = *x;
  if (auto x = rd.integer(v, ptr, "L_max", false, 2)) num.L_max = *x;
  if (v.contains("lambda_grid")) read_grid(rd, v.at("lambda_grid"), ptr + "/lambda_grid", num.lambda_grid);
  if (v.contains("tolerances")) {
    const json& t = v.at("tolerances");
    const std::string tp = ptr + "/tolerances";
    if (rd.object(t, tp)) {
      rd.allow_keys(t, tp, {"newton", "max_halvings"});
      if (auto x = rd.positive(t, tp, "newton", false)) num.newton_tol = *x;
      if (auto x = rd.integer(t, tp, "max_halvings", false, 0)) num.max_halvings = *x;
    }
  }
}

}  // namespace

ConfigError::ConfigError(ErrorKind kind, std::vector<ConfigIssue> issues)
    : Error(kind, join_issues(issues)), issues_(std::move(issues)) {}

Config parse_config_json(const json& doc) {
  Reader rd;
  Config cfg;
  cfg.source = doc;
  if (!rd.object(doc, "")) throw ConfigError(ErrorKind::ValidationError, rd.issues);
  rd.allow_keys(doc, "", {"schema_version", "description", "case", "phases", "geometry", "sigma", "masses",
                          "total_mass", "numerics", "events", "output", "simulation"});

  if (auto v = rd.integer(doc, "", "schema_version", true, 0)) {
    if (*v != 1) rd.fail("/schema_version", "only schema_version 1 is supported");
  }
  if (doc.contains("description") && !doc.at("description").is_string()) {
    rd.fail("/description", "expected a string");
  }
  const auto kase = rd.choice(doc, "", "case", true, {"no-phase-transition", "phase-transition"});
  if (kase) cfg.kase = *kase == "phase-transition" ? Case::PhaseTransition : Case::NoPhaseTransition;

  if (!doc.contains("phases")) {
    rd.fail("/phases", "required");
  } else if (!doc.at("phases").is_array() || doc.at("phases").size() != 2) {
    rd.fail("/phases", "expected an array of two phases");
  } else {
    for (int i = 0; i < 2; ++i) {
      const std::string ptr = "/phases/" + std::to_string(i);
      const json& ph = doc.at("phases")[i];
      if (!rd.object(ph, ptr)) continue;
      rd.allow_keys(ph, ptr, {"eos", "law"});
      std::optional<EquationOfState> eos;
      if (ph.contains("eos")) {
        eos = read_eos(rd, ph.at("eos"), ptr + "/eos");
      } else {
        rd.fail(ptr + "/eos", "required");
      }
      std::optional<VelocityLaw> law;
      if (ph.contains("law")) {
        law = read_law(rd, ph.at("law"), ptr + "/law", eos);
      } else {
        rd.fail(ptr + "/law", "required");
      }
      if (eos && law) {
        cfg.pair.eos[i] = *eos;
        cfg.pair.law[i] = *law;
      }
    }
  }

  if (auto s = rd.number(doc, "", "sigma", true)) {
    if (*s < 0.0) {
      rd.fail("/sigma", "must be >= 0");
    } else {
      cfg.pair.sigma = *s;
    }
  }

  bool geometry_ok = false;
  if (!doc.contains("geometry")) {
    rd.fail("/geometry", "required");
  } else if (rd.object(doc.at("geometry"), "/geometry")) {
    const json& g = doc.at("geometry");
    const std::string ptr = "/geometry";
    rd.allow_keys(g, ptr, {"n", "R_out", "radii", "inner_phase", "layout"});
    const auto n = rd.integer(g, ptr, "n", true, 2);
    const auto R_out = rd.positive(g, ptr, "R_out", true);
    const auto layout = rd.choice(g, ptr, "layout", false, {"concentric", "droplets"});
    const auto inner = rd.integer(g, ptr, "inner_phase", false, 1);
    bool ok = n && R_out;
    if (inner && *inner > 2) {
      rd.fail(ptr + "/inner_phase", "must be 1 or 2");
      ok = false;
    }
    std::vector<double> radii;
    if (!g.contains("radii")) {
      rd.fail(ptr + "/radii", "required");
      ok = false;
    } else {
      const json& r = g.at("radii");
      if (!r.is_array() || r.empty()) {
        rd.fail(ptr + "/radii", "expected a non-empty array of numbers");
        ok = false;
      } else {
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (!r[k].is_number()) {
            rd.fail(ptr + "/radii/" + std::to_string(k), "expected a number");
            ok = false;
          } else {
            radii.push_back(r[k].get<double>());
          }
        }
      }
    }
    if (ok) {
      cfg.geometry.n = *n;
      cfg.geometry.R_out = *R_out;
      cfg.geometry.radii = radii;
      cfg.geometry.inner_phase = inner.value_or(1) == 2 ? Phase::Two : Phase::One;
      cfg.geometry.layout = layout.value_or("concentric") == "droplets" ? Layout::Droplets : Layout::Concentric;
      try {
        validate_geometry(cfg.geometry);
        geometry_ok = true;
      } catch (const Error& e) {
        const bool about_phase = cfg.geometry.layout == Layout::Droplets && cfg.geometry.inner_phase != Phase::One;
        rd.fail(ptr + (about_phase ? "/inner_phase" : "/radii"), e.what());
      }
      if (geometry_ok && kase == "phase-transition" && cfg.geometry.layout == Layout::Concentric &&
          cfg.geometry.interface_count() > 1) {
        rd.fail(ptr + "/radii", "phase-transition configs with several interfaces need the droplets layout");
        geometry_ok = false;
      }
    }
  }

  if (kase == "no-phase-transition") {
    if (doc.contains("total_mass")) rd.fail("/total_mass", "not used without phase transition, give masses");
    if (!doc.contains("masses")) {
      rd.fail("/masses", "required: one mass per component");
    } else {
      const json& m = doc.at("masses");
      if (!m.is_array()) {
        rd.fail("/masses", "expected an array of numbers");
      } else {
        for (std::size_t c = 0; c < m.size(); ++c) {
          if (!m[c].is_number() || !(m[c].get<double>() > 0.0)) {
            rd.fail("/masses/" + std::to_string(c), "expected a positive number");
          } else {
            cfg.masses.push_back(m[c].get<double>());
          }
        }
        if (geometry_ok && m.size() != static_cast<std::size_t>(cfg.geometry.component_count())) {
          rd.fail("/masses", "expected " + std::to_string(cfg.geometry.component_count()) + " entries, one per component");
        }
      }
    }
  } else if (kase == "phase-transition") {
    if (doc.contains("masses")) rd.fail("/masses", "not used with phase transition, give total_mass");
    if (auto M = rd.positive(doc, "", "total_mass", true)) cfg.total_mass = *M;
  }

  if (doc.contains("numerics")) read_numerics(rd, doc.at("numerics"), cfg.numerics);

  if (doc.contains("events") && rd.object(doc.at("events"), "/events")) {
    const json& e = doc.at("events");
    rd.allow_keys(e, "/events", {"min_gap", "min_density_jump", "max_norm"});
    if (auto x = rd.positive(e, "/events", "min_gap", false)) cfg.events.min_gap = *x;
    if (auto x = rd.positive(e, "/events", "min_density_jump", false)) cfg.events.min_density_jump = *x;
    if (auto x = rd.positive(e, "/events", "max_norm", false)) cfg.events.max_norm = *x;
  }

  if (doc.contains("output") && rd.object(doc.at("output"), "/output")) {
    const json& o = doc.at("output");
    rd.allow_keys(o, "/output", {"dir", "cadence", "formats"});
    if (o.contains("dir")) {
      if (o.at("dir").is_string() && !o.at("dir").get<std::string>().empty()) {
        cfg.output.dir = o.at("dir").get<std::string>();
      } else {
        rd.fail("/output/dir", "expected a non-empty string");
      }
    }
    if (auto x = rd.integer(o, "/output", "cadence", false, 1)) cfg.output.cadence = *x;
    if (o.contains("formats")) {
      const json& f = o.at("formats");
      if (!f.is_array()) {
        rd.fail("/output/formats", "expected an array");
      } else {
        cfg.output.json = cfg.output.csv = false;
        for (std::size_t i = 0; i < f.size(); ++i) {
          if (f[i] == "json") {
            cfg.output.json = true;
          } else if (f[i] == "csv") {
            cfg.output.csv = true;
          } else {
            rd.fail("/output/formats/" + std::to_string(i), "expected \"json\" or \"csv\"");
          }
        }
      }
    }
  }

  if (doc.contains("simulation") && rd.object(doc.at("simulation"), "/simulation")) {
    const json& s = doc.at("simulation");
    rd.allow_keys(s, "/simulation", {"initial", "perturbation", "stop_at_equilibrium"});
    if (auto x = rd.choice(s, "/simulation", "initial", false, {"equilibrium", "perturbed"})) {
      cfg.simulation.initial = *x == "equilibrium" ? InitialKind::Equilibrium : InitialKind::Perturbed;
    }
    if (auto x = rd.number(s, "/simulation", "perturbation", false)) {
      if (std::abs(*x) >= 0.5) {
        rd.fail("/simulation/perturbation", "must lie in (-0.5, 0.5)");
      } else {
        cfg.simulation.perturbation = *x;
      }
    }
    if (s.contains("stop_at_equilibrium")) {
      if (s.at("stop_at_equilibrium").is_boolean()) {
        cfg.simulation.stop_at_equilibrium = s.at("stop_at_equilibrium").get<bool>();
      } else {
        rd.fail("/simulation/stop_at_equilibrium", "expected a boolean");
      }
    }
  }

  if (!rd.issues.empty()) throw ConfigError(ErrorKind::ValidationError, rd.issues);
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ErrorKind::ParseError, {{"", "cannot open " + path}});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorKind::ParseError, {{"", e.what()}});
  }
  return parse_config_json(doc);
}

std::string config_hash(const json& doc) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace verigin
