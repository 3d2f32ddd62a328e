// commands.cpp
#include "verigin/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "verigin/spectrum.hpp"

namespace verigin {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::InvalidArgument:
      return ExitValidation;
    default:
      return ExitNumerical;
  }
}

namespace {

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

std::string fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json equilibrium_json(const EquilibriumState& eq, const PhasePair& pair) {
  json j;
  j["case"] = to_string(eq.kase);
  j["radii"] = eq.geometry.radii;
  j["pressures"] = eq.pressures;
  json dens = json::array();
  for (const auto& c : component_data(eq, pair)) dens.push_back(c.rho);
  j["densities"] = dens;
  j["residuals"] = {{"laplace", eq.residuals.laplace}, {"mass", eq.residuals.mass}};
  j["residuals"]["gibbs"] = eq.residuals.gibbs ? json(*eq.residuals.gibbs) : json(nullptr);
  j["iterations"] = eq.iterations;
  return j;
}

// Collects the files of one run for the manifest.
class RunWriter {
 public:
  explicit RunWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    files_.push_back({{"path", name}, {"bytes", content.size()}, {"fnv1a64", fnv1a(content)}});
  }

  void report(const std::string& command, const Config& cfg, const json& body) {
    json rep;
    rep["command"] = command;
    rep["config_hash"] = config_hash(cfg.source);
    for (auto it = body.begin(); it != body.end(); ++it) rep[it.key()] = it.value();
    rep["files"] = files_;
    rep["timestamp"] = utc_timestamp();
    std::ofstream out(dir_ / "report.json", std::ios::binary);
    out << rep.dump(2) << '\n';
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  json files_ = json::array();
};

struct Outcome {
  int code = ExitOk;
  json outputs;
};

// Runs one module command into dir.
Outcome execute(const std::string& command, const Config& cfg, const fs::path& dir, std::ostream& err) {
  RunWriter writer(dir);
  Outcome oc;
  json body;
  try {
    std::string csv;
    if (command == "equilibrium") {
      oc.outputs = equilibrium_outputs(cfg);
    } else if (command == "stability") {
      oc.outputs = stability_outputs(cfg);
    } else if (command == "spectrum") {
      oc.outputs = spectrum_outputs(cfg);
    } else if (command == "symbol") {
      oc.outputs = symbol_outputs(cfg, csv);
      if (cfg.output.csv) writer.write("symbol.csv", csv);
    } else if (command == "simulate") {
      oc.outputs = simulate_outputs(cfg, csv, oc.code);
      if (cfg.output.csv) writer.write("timeseries.csv", csv);
    } else {
      throw Error(ErrorKind::InvalidArgument, "unknown command " + command);
    }
    body["status"] = oc.code == ExitOk ? "ok" : "failed";
    body["outputs"] = oc.outputs;
  } catch (const Error& e) {
    oc.code = exit_code_for(e.kind());
    body["status"] = "failed";
    body["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    err << "verigin " << command << ": " << e.what() << '\n';
  }
  if (cfg.output.json) writer.report(command, cfg, body);
  return oc;
}

std::string resolve_out(const CommandOptions& opts, const Config& cfg) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  return "out";
}

struct SweepRow {
  double value = 0.0;
  int code = ExitOk;
  std::string metric;
  std::string label;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::pair<std::string, std::string> sweep_columns(const std::string& command, const Config& cfg) {
  if (command == "stability") return {cfg.kase == Case::PhaseTransition ? "zeta" : "min_eig", "verdict"};
  if (command == "equilibrium") return {"R_1", "iterations"};
  if (command == "spectrum") return {"positive_count", "semisimple"};
  if (command == "symbol") return {"min_ratio", "zero_found"};
  return {"final_R_1", "termination"};
}

void fill_row(const std::string& command, const Outcome& oc, SweepRow& row) {
  const json& o = oc.outputs;
  if (o.is_null()) {
    row.metric = "nan";
    row.label = "error";
    return;
  }
  if (command == "stability") {
    row.metric = fmt(o.contains("zeta") ? o["zeta"].get<double>() : o["eigenvalues"][0].get<double>());
    row.label = o["verdict"].get<std::string>();
  } else if (command == "equilibrium") {
    row.metric = fmt(o["radii"][0].get<double>());
    row.label = std::to_string(o["iterations"].get<int>());
  } else if (command == "spectrum") {
    row.metric = std::to_string(o["counts"]["positive_total"].get<std::int64_t>());
    row.label = o["kernel"]["semisimple"].get<bool>() ? "true" : "false";
  } else if (command == "symbol") {
    row.metric = fmt(o["min_ratio"].get<double>());
    row.label = o["zero_found"].get<bool>() ? "true" : "false";
  } else {
    row.metric = fmt(o["final"]["radii"][0].get<double>());
    row.label = o["termination"].get<std::string>();
  }
}

int run_sweep(const CommandOptions& opts, const Config& base, std::ostream& out, std::ostream& err) {
  static const char* allowed[] = {"equilibrium", "stability", "spectrum", "symbol", "simulate"};
  if (std::find(std::begin(allowed), std::end(allowed), opts.sweep_command) == std::end(allowed)) {
    err << "verigin sweep: --cmd must be one of equilibrium, stability, spectrum, symbol, simulate\n";
    return ExitValidation;
  }
  std::vector<double> values;
  json::json_pointer ptr;
  try {
    values = parse_range(opts.range);
    ptr = json::json_pointer(param_pointer(opts.param));
  } catch (const std::exception& e) {
    err << "verigin sweep: " << e.what() << '\n';
    return ExitValidation;
  }
  if (!base.source.contains(ptr) || !base.source.at(ptr).is_number()) {
    err << "verigin sweep: " << ptr.to_string() << " is not a numeric entry of the config\n";
    return ExitValidation;
  }

  const fs::path root = resolve_out(opts, base);
  fs::create_directories(root);
  std::vector<SweepRow> rows(values.size());
  std::vector<std::string> diagnostics(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      std::ostringstream run_err;
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu", i);
      SweepRow& row = rows[i];
      row.value = values[i];
      json doc = base.source;
      doc[ptr] = values[i];
      try {
        const Config cfg = parse_config_json(doc);
        const Outcome oc = execute(opts.sweep_command, cfg, root / name, run_err);
        row.code = oc.code;
        fill_row(opts.sweep_command, oc, row);
      } catch (const ConfigError& e) {
        row.code = ExitValidation;
        row.metric = "nan";
        row.label = "invalid";
        run_err << "verigin sweep " << name << ": " << e.what() << '\n';
      } catch (const std::exception& e) {
        row.code = ExitInternal;
        row.metric = "nan";
        row.label = "internal";
        run_err << "verigin sweep " << name << ": " << e.what() << '\n';
      }
      diagnostics[i] = run_err.str();
    }
  };
  const int threads = sweep_threads(static_cast<int>(values.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const auto [metric, label] = sweep_columns(opts.sweep_command, base);
  std::ostringstream csv;
  const std::string param_name = opts.param.empty() ? "value" : opts.param;
  csv << "index," << param_name << ',' << metric << ',' << label << ",exit_code\n";
  int worst = ExitOk;
  json runs = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    err << diagnostics[i];
    csv << i << ',' << fmt(rows[i].value) << ',' << rows[i].metric << ',' << rows[i].label << ',' << rows[i].code
        << '\n';
    worst = std::max(worst, rows[i].code);
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", i);
    runs.push_back({{"index", i}, {"value", rows[i].value}, {"dir", name}, {"exit_code", rows[i].code}});
  }
  RunWriter writer(root);
  writer.write("sweep_summary.csv", csv.str());
  json body;
  body["status"] = worst == ExitOk ? "ok" : "failed";
  body["outputs"] = {{"command", opts.sweep_command}, {"param", opts.param}, {"pointer", ptr.to_string()},
                     {"runs", runs}};
  writer.report("sweep", base, body);
  out << "wrote " << values.size() << " runs to " << root.string() << '\n';
  return worst;
}

}  // namespace

EquilibriumState solve_equilibrium(const Config& cfg) {
  if (cfg.kase == Case::NoPhaseTransition) return solve_equilibrium_case_i(cfg.pair, cfg.geometry, cfg.masses);
  return solve_equilibrium_case_ii(cfg.pair, cfg.geometry, cfg.total_mass);
}

json equilibrium_outputs(const Config& cfg) {
  return equilibrium_json(solve_equilibrium(cfg), cfg.pair);
}

json stability_outputs(const Config& cfg) {
  const EquilibriumState eq = solve_equilibrium(cfg);
  const StabilityReport st =
      cfg.kase == Case::NoPhaseTransition ? stability_matrix_case_i(eq, cfg.pair) : zeta_case_ii(eq, cfg.pair);
  json j;
  j["equilibrium"] = equilibrium_json(eq, cfg.pair);
  if (st.zeta) {
    j["zeta"] = *st.zeta;
  } else {
    j["C_matrix"] = to_json(st.C);
  }
  j["eigenvalues"] = to_json(st.eigenvalues);
  j["negative_count"] = st.negative_count;
  j["verdict"] = to_string(st.verdict);
  j["connected"] = st.connected;
  j["constraint_count"] = st.component_count;
  return j;
}

json spectrum_outputs(const Config& cfg) {
  const EquilibriumState eq = solve_equilibrium(cfg);
  const int N = cfg.numerics.N;
  const int L = cfg.numerics.L_max;
  json j;
  j["equilibrium"] = equilibrium_json(eq, cfg.pair);
  j["N"] = N;
  j["L_max"] = L;
  j["convention"] = "growth rate, positive is unstable";

  json modes = json::array();
  std::int64_t positive_total = 0;
  double rate = 1.0;
  for (int l = 0; l <= L; ++l) {
    const ModeProblem mp = assemble_mode(cfg.kase, eq, cfg.pair, l, N);
    if (l == 0) rate = mp.rate_scale;
    const SpectrumSlice s = generalized_spectrum(mp, 4);
    positive_total += s.positive_count * s.multiplicity;
    modes.push_back({{"l", l},
                     {"multiplicity", s.multiplicity},
                     {"eigenvalues", to_json(s.eigenvalues)},
                     {"positive_count", s.positive_count},
                     {"near_zero_count", s.near_zero_count},
                     {"max_imag_ratio", s.max_imag_ratio}});
  }
  j["modes"] = modes;

  const SpectrumReport kr = kernel_report(cfg.kase, eq, cfg.pair, N, L);
  json km = json::array();
  for (const auto& m : kr.modes) {
    km.push_back({{"l", m.l},
                  {"multiplicity", m.multiplicity},
                  {"geometric", m.geometric},
                  {"algebraic", m.algebraic},
                  {"jordan_extra", m.jordan_extra}});
  }
  j["kernel"] = {{"modes", km},
                 {"kernel_dim", kr.kernel_dim},
                 {"algebraic_dim", kr.algebraic_dim},
                 {"kernel_dim_l2", kr.kernel_dim_l2},
                 {"semisimple", kr.semisimple}};
  const int m = eq.geometry.interface_count();
  const int n = eq.geometry.n;
  j["counts"] = {{"positive_total", positive_total},
                 {"expected_kernel", cfg.kase == Case::PhaseTransition ? n * m + 1 : m * n + m + 1}};

  // B_0 against its closed form
  const B0Spectrum b0 = b0_closed_form(cfg.kase, eq, cfg.pair);
  const ModeProblem uncoupled = assemble_network(mode_network(cfg.kase, eq, cfg.pair, 0, false), N, rate);
  const double probe = 1e-6 * rate;
  const Eigen::MatrixXd B = b_lambda(uncoupled, probe);
  const Topology topo = topology(eq.geometry);
  Eigen::VectorXd sq(m);
  for (int k = 0; k < m; ++k) sq[k] = std::sqrt(topo.interfaces[k].area);
  const Eigen::MatrixXd Bi = sq.asDiagonal() * B * sq.asDiagonal();
  const Eigen::VectorXd ortho = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B, Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::VectorXd indic =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Bi, Eigen::EigenvaluesOnly).eigenvalues();
  json b;
  b["lambda_probe"] = probe;
  b["closed_form"] = {{"indicator_basis", to_json(b0.indicator_basis)},
                      {"orthonormal_basis", to_json(b0.orthonormal_basis)}};
  b["discrete"] = {{"indicator_basis", to_json(indic)}, {"orthonormal_basis", to_json(ortho)}};
  b["max_abs_difference"] = (indic - b0.indicator_basis).cwiseAbs().maxCoeff();
  if (cfg.kase == Case::PhaseTransition) {
    b["mu0"] = b0.mu0;
    b["mu1"] = b0.mu1;
  }
  j["B0"] = b;
  return j;
}

json symbol_outputs(const Config& cfg, std::string& csv) {
  const EquilibriumState eq = solve_equilibrium(cfg);
  const auto [p1, p2] = symbol_phases(eq, cfg.pair);
  const ScanResult res = parabolicity_scan(cfg.kase, p1, p2, cfg.pair.sigma, cfg.numerics.lambda_grid);
  std::ostringstream os;
  os << std::setprecision(17) << "re_lambda,im_lambda,abs_xi,abs_s,abs_s0,ratio\n";
  for (const auto& r : res.rows) {
    os << r.lambda.real() << ',' << r.lambda.imag() << ',' << r.xi << ',' << r.abs_s << ',' << r.abs_s0 << ','
       << r.ratio << '\n';
  }
  csv = os.str();
  const ScanGrid& g = cfg.numerics.lambda_grid;
  json j;
  j["min_ratio"] = res.min_ratio;
  j["max_ratio"] = res.max_ratio;
  j["zero_found"] = res.zero_found;
  j["lambda_term_vanishes"] = res.lambda_term_vanishes;
  j["c_t"] = res.c_t;
  j["c_x"] = res.c_x;
  j["points"] = res.rows.size();
  j["grid"] = {{"lambda_count", g.lambda_count}, {"arg_count", g.arg_count}, {"xi_count", g.xi_count},
               {"lambda_min", g.lambda_min},     {"lambda_max", g.lambda_max}, {"xi_min", g.xi_min},
               {"xi_max", g.xi_max}};
  return j;
}

json simulate_outputs(const Config& cfg, std::string& csv, int& exit_code) {
  if (cfg.geometry.layout != Layout::Concentric) {
    throw Error(ErrorKind::InvalidArgument, "simulate needs the concentric layout");
  }
  const EquilibriumState eq = solve_equilibrium(cfg);
  SimConfig sc;
  sc.kase = cfg.kase;
  sc.pair = cfg.pair;
  sc.dt = cfg.numerics.dt;
  sc.t_end = cfg.numerics.t_end;
  sc.events = cfg.events;
  sc.cadence = cfg.output.cadence;
  sc.newton_tol = cfg.numerics.newton_tol;
  sc.max_halvings = cfg.numerics.max_halvings;
  sc.stop_at_equilibrium = cfg.simulation.stop_at_equilibrium;
  sc.initial = cfg.simulation.initial == InitialKind::Equilibrium
                   ? equilibrium_to_state(eq, cfg.numerics.N)
                   : perturbed_state(eq, cfg.pair, cfg.simulation.perturbation, cfg.numerics.N);
  const SimSeries s = run(sc);

  std::ostringstream os;
  const int m = eq.geometry.interface_count();
  os << csv_header(m, m + 1) << '\n';
  for (const auto& r : s.records) os << csv_row(r) << '\n';
  csv = os.str();

  exit_code = s.termination == Termination::NewtonDiverged ? ExitNumerical : ExitOk;
  json j;
  j["termination"] = to_string(s.termination);
  j["event"] = s.event ? json(to_string(*s.event)) : json(nullptr);
  j["message"] = s.message;
  j["steps"] = s.steps;
  j["records"] = s.records.size();
  const RadialState& f = s.final_state;
  json pressures = json::array();
  for (const auto& p : f.pressures) pressures.push_back(to_json(p));
  j["final"] = {{"t", f.t},
                {"radii", f.geometry.radii},
                {"pressures", pressures},
                {"pi_minus", f.trace_inner},
                {"pi_plus", f.trace_outer}};
  j["equilibrium"] = equilibrium_json(eq, cfg.pair);
  const double identity = s.final_energy - s.initial_energy + s.dissipation_integral;
  j["conservation"] = {{"max_mass_drift", s.max_mass_drift},
                       {"initial_energy", s.initial_energy},
                       {"final_energy", s.final_energy},
                       {"dissipation_integral", s.dissipation_integral},
                       {"energy_identity_residual", identity},
                       {"max_energy_increase", s.max_energy_increase}};
  json fits;
  fits["radius_relative_error"] = json::array();
  for (int k = 0; k < m; ++k) {
    fits["radius_relative_error"].push_back(std::abs(f.geometry.radii[k] - eq.geometry.radii[k]) /
                                            eq.geometry.radii[k]);
  }
  try {
    fits["decay_rate"] = fit_decay_rate(s, eq.geometry.radii[0]);
  } catch (const Error&) {
    fits["decay_rate"] = nullptr;
  }
  j["fits"] = fits;
  return j;
}

std::vector<double> parse_range(const std::string& range) {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  char tail = 0;
  if (std::sscanf(range.c_str(), "%lf:%lf:%ld%c", &lo, &hi, &count, &tail) != 3 || count < 1 ||
      !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::InvalidArgument, "range must look like lo:hi:count, got \"" + range + "\"");
  }
  std::vector<double> v;
  for (long i = 0; i < count; ++i) v.push_back(count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1));
  return v;
}

std::string param_pointer(const std::string& param) {
  if (param.empty()) throw Error(ErrorKind::InvalidArgument, "--param is required for sweep");
  if (param.front() == '/') return param;
  std::string p = "/" + param;
  std::replace(p.begin(), p.end(), '.', '/');
  return p;
}

int sweep_threads(int runs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("VERIGIN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::clamp(n, 1, std::max(runs, 1));
}

int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  static const char* commands[] = {"equilibrium", "stability", "spectrum", "symbol", "simulate", "sweep", "validate"};
  if (std::find(std::begin(commands), std::end(commands), opts.command) == std::end(commands)) {
    err << "verigin: unknown command \"" << opts.command << "\"\n";
    return ExitValidation;
  }
  Config cfg;
  try {
    cfg = parse_config(opts.config_path);
  } catch (const ConfigError& e) {
    err << "verigin: " << to_string(e.kind()) << " in " << opts.config_path << '\n';
    for (const auto& issue : e.issues()) {
      err << "  " << (issue.pointer.empty() ? "/" : issue.pointer) << ": " << issue.message << '\n';
    }
    return ExitValidation;
  }
  try {
    if (opts.command == "validate") {
      out << "OK\n";
      return ExitOk;
    }
    if (opts.command == "sweep") return run_sweep(opts, cfg, out, err);
    const fs::path dir = resolve_out(opts, cfg);
    const Outcome oc = execute(opts.command, cfg, dir, err);
    if (oc.code == ExitOk) out << "wrote " << (dir / "report.json").string() << '\n';
    return oc.code;
  } catch (const Error& e) {
    err << "verigin: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "verigin: internal error: " << e.what() << '\n';
    return ExitInternal;
  }
}

}  // namespace verigin
