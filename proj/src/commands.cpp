#include "wkb/commands.hpp"

#include "wkb/corrector.hpp"
#include "wkb/error.hpp"
#include "wkb/io.hpp"
#include "wkb/limit.hpp"
#include "wkb/nls.hpp"
#include "wkb/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace wkb {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "limit",         "corrector", "sweep",
                                              "conserve", "blowup", "focusing-demo", "report"};
  return names;
}

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

bool wants(const RunConfig& c, const char* format) {
  return std::find(c.formats.begin(), c.formats.end(), format) != c.formats.end();
}

std::string csv_text(const std::string& title, const std::string& config_text, const Table& t) {
  std::ostringstream body;
  for (std::size_t i = 0; i < t.columns.size(); ++i) body << (i ? "," : "") << csv_field(t.columns[i]);
  body << "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) body << (i ? "," : "") << csv_field(row[i]);
    body << "\r\n";
  }
  std::ostringstream out;
  out << "# wkbench " << title << "\n";
  std::istringstream echo(config_text);
  for (std::string line; std::getline(echo, line);) out << "# config: " << line << "\n";
  out << "# content-hash: fnv1a64:" << hex64(fnv1a64(config_text + body.str())) << "\n";
  out << body.str();
  return out.str();
}

class Artifacts {
 public:
  Artifacts(const CommandContext& ctx, const RunConfig& config)
      : dir_(ctx.output_directory), config_text_(serialize(config)) {
    fs::create_directories(dir_);
  }

  void csv(const std::string& name, const std::string& title, const Table& t) {
    write(name, csv_text(title, config_text_, t));
  }

  void json(const std::string& name, ordered_json payload) {
    payload["config"] = config_text_;
    const std::string hash = hex64(fnv1a64(payload.dump()));
    payload["content_hash"] = "fnv1a64:" + hash;
    write(name, payload.dump(2) + "\n");
  }

  std::ofstream binary(const std::string& name) {
    written_.push_back(dir_ / name);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return out;
  }

  const std::string& config_text() const { return config_text_; }
  std::vector<fs::path> files() const { return written_; }

 private:
  void write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    written_.push_back(p);
  }

  fs::path dir_;
  std::string config_text_;
  std::vector<fs::path> written_;
};

std::string num(double x) { return format_double(x); }

double drift(double x, double x0) { return std::abs(x - x0) / std::max(std::abs(x0), 1.0); }

NlsConfig nls_config(const RunConfig& c) {
  NlsConfig n;
  n.epsilon = c.epsilon();
  n.sigma = c.sigma;
  n.final_time = c.final_time;
  n.dt0 = c.dt0;
  n.dt_exponent = c.dt_exponent;
  n.observation_count = c.observation_count;
  n.self_check = c.self_check;
  return n;
}

LimitOptions limit_options(const RunConfig& c) {
  LimitOptions o;
  o.sigma = c.sigma;
  o.final_time = c.final_time;
  o.dt = std::min(c.corrector_dt, c.final_time);
  o.observation_count = c.observation_count;
  return o;
}

ordered_json self_check_json(const SelfCheckReport& r) {
  ordered_json j;
  j["performed"] = r.performed;
  j["passed"] = r.passed;
  j["change"] = r.difference;
  j["threshold"] = r.threshold;
  return j;
}

double consistency(const LimitState& s, int sigma) {
  ArrayXcd power = s.a.values();
  for (int k = 1; k < sigma; ++k) power *= s.a.values();
  const double peak = std::pow(s.a.values().abs().maxCoeff(), sigma);
  return (s.A.values() - power).abs().maxCoeff() / (1.0 + peak);
}

double phase_error(const LimitState& s) {
  const auto g = phase_gradient(s);
  double acc = 0.0;
  for (std::size_t axis = 0; axis < g.size(); ++axis)
    acc += std::pow(lp_norm(ArrayXd(g[axis] - s.v[axis].values()), s.phi.grid(), 2.0), 2);
  return std::sqrt(acc);
}

void cmd_simulate(const RunConfig& c, Artifacts& out, std::ostream& log) {
  const InitialData data = make_initial_data(c.grid(), c.preset, c.epsilon());
  const NlsConfig cfg = nls_config(c);
  std::vector<NlsInvariants> inv;
  std::vector<double> times;
  const NlsObserver observe = [&](const NlsState& s) {
    inv.push_back(nls_invariants(s, cfg.epsilon, cfg.sigma));
    times.push_back(s.time);
  };
  const NlsRun run = evolve_nls(build_initial_data(data, cfg.epsilon), cfg, std::span(&observe, 1));
  Table t{{"time", "mass", "energy", "momentum", "pseudo_conformal", "mass_center",
           "boundary_tail", "support_warning"},
          {}};
  for (std::size_t j = 0; j < inv.size(); ++j)
    t.rows.push_back({num(times[j]), num(inv[j].mass), num(inv[j].energy), num(inv[j].momentum[0]),
                      num(inv[j].pseudo_conformal), num(inv[j].mass_center[0]),
                      num(inv[j].boundary_tail), inv[j].support_warning ? "true" : "false"});
  if (wants(c, "csv")) out.csv("simulate.csv", "simulate", t);
  if (wants(c, "json")) {
    ordered_json j;
    j["command"] = "simulate";
    j["epsilon"] = cfg.epsilon;
    j["dt"] = run.dt;
    j["steps"] = run.steps;
    j["self_check"] = self_check_json(run.self_check);
    j["mass_drift"] = drift(inv.back().mass, inv.front().mass);
    j["energy_drift"] = drift(inv.back().energy, inv.front().energy);
    out.json("simulate.json", j);
  }
  if (wants(c, "bin")) {
    auto bin = out.binary("simulate.bin");
    for (const auto& s : run.snapshots) write_snapshot(bin, "u", s.time, s.u);
  }
  log << "simulate: " << run.steps << " steps of dt = " << num(run.dt)
      << ", mass drift " << num(drift(inv.back().mass, inv.front().mass)) << "\n";
}

void cmd_limit(const RunConfig& c, Artifacts& out, std::ostream& log) {
  const InitialData data = make_initial_data(c.grid(), c.preset, c.epsilon());
  const LimitTrajectory traj = evolve_limit(data, limit_options(c));
  Table t{{"time", "mass", "energy", "momentum", "pseudo_conformal", "total_pressure",
           "A_consistency", "phase_error"},
          {}};
  for (const auto& s : traj.states) {
    const EulerInvariants e = euler_invariants(s, c.sigma);
    t.rows.push_back({num(s.time), num(e.mass), num(e.energy), num(e.momentum[0]),
                      num(e.pseudo_conformal), num(e.total_pressure), num(consistency(s, c.sigma)),
                      num(phase_error(s))});
  }
  if (wants(c, "csv")) out.csv("limit.csv", "limit", t);
  if (wants(c, "json")) {
    ordered_json j;
    j["command"] = "limit";
    j["breakdown"] = traj.breakdown;
    j["breakdown_time"] = traj.breakdown ? traj.breakdown_time : c.final_time;
    j["states"] = traj.states.size();
    out.json("limit.json", j);
  }
  if (wants(c, "bin")) {
    auto bin = out.binary("limit.bin");
    for (const auto& s : traj.states) {
      write_snapshot(bin, "a", s.time, s.a);
      write_snapshot(bin, "A", s.time, s.A);
    }
  }
  log << "limit: " << traj.states.size() << " states"
      << (traj.breakdown ? ", breakdown at t = " + num(traj.breakdown_time) : "") << "\n";
}

void cmd_corrector(const RunConfig& c, Artifacts& out, std::ostream& log) {
  const InitialData data = make_initial_data(c.grid(), c.preset, c.epsilon());
  CorrectorOptions co;
  co.dt = c.corrector_dt;
  co.observation_count = c.observation_count;
  LimitOptions lo = limit_options(c);
  const LimitTrajectory limit = evolve_limit(data, matched_limit_options(lo, co));
  if (limit.breakdown)
    throw NumericalGuardError("limit_solver",
                              "breakdown at t = " + num(limit.breakdown_time) + " before T");
  const CorrectorTrajectory corr = evolve_corrector(limit, data.a1, co);
  Table t{{"time", "phi1_sup", "a1_l2", "tilde_modulus_defect"}, {}};
  double phi1_sup = 0.0;
  std::size_t cursor = 0;
  for (const auto& s : corr.states) {
    while (cursor + 1 < limit.states.size() && limit.states[cursor].time < s.time - 1e-12) ++cursor;
    const ComplexField tilde = tilde_amplitude(limit.states[cursor], s);
    const double defect =
        (tilde.values().abs() - limit.states[cursor].a.values().abs()).abs().maxCoeff();
    const double sup = s.phi1.values().abs().maxCoeff();
    phi1_sup = std::max(phi1_sup, sup);
    t.rows.push_back({num(s.time), num(sup), num(lp_norm(s.a1f.values(), s.a1f.grid(), 2.0)),
                      num(defect)});
  }
  if (wants(c, "csv")) out.csv("corrector.csv", "corrector", t);
  if (wants(c, "json")) {
    ordered_json j;
    j["command"] = "corrector";
    j["dt"] = corr.dt;
    j["phi1_sup"] = phi1_sup;
    out.json("corrector.json", j);
  }
  if (wants(c, "bin")) {
    auto bin = out.binary("corrector.bin");
    for (const auto& s : corr.states) {
      write_snapshot(bin, "phi1", s.time, as_complex(s.phi1));
      write_snapshot(bin, "a1", s.time, s.a1f);
    }
  }
  log << "corrector: max |phi1| = " << num(phi1_sup) << "\n";
}

void cmd_sweep(const RunConfig& c, const CommandContext& ctx, Artifacts& out, std::ostream& log) {
  SweepPlan plan = make_sweep_plan(c);
  plan.workers = ctx.workers;
  const SweepResult result = run_sweep(plan);
  if (wants(c, "csv")) {
    std::ostringstream s;
    write_sweep_csv(s, result);
    std::ofstream(ctx.output_directory / "sweep.csv", std::ios::binary) << s.str();
  }
  if (wants(c, "json")) {
    std::ostringstream s;
    write_sweep_json(s, result);
    std::ofstream(ctx.output_directory / "sweep.json", std::ios::binary) << s.str();
  }
  for (const auto& f : result.fits)
    log << "sweep: " << f.metric << " slope " << num(f.slope) << " r2 " << num(f.r2)
        << (f.noisy ? " (noisy)" : "") << "\n";
  (void)out;
}

void cmd_conserve(const RunConfig& c, Artifacts& out, std::ostream& log) {
  const InitialData data = make_initial_data(c.grid(), c.preset, c.epsilon());
  const NlsConfig cfg = nls_config(c);
  const NlsRun run = evolve_nls(build_initial_data(data, cfg.epsilon), cfg);
  const LimitTrajectory limit = evolve_limit(data, limit_options(c));
  const int n = c.dim;
  const double law = (2.0 - n * c.sigma) / (c.sigma + 1.0);

  Table t{{"time", "nls_mass_drift", "nls_momentum_drift", "nls_energy_drift",
           "nls_pseudo_conformal_defect", "euler_mass_drift", "euler_momentum_drift",
           "euler_energy_drift", "euler_pseudo_conformal_defect"},
          {}};
  std::vector<NlsInvariants> qi;
  for (const auto& s : run.snapshots) qi.push_back(nls_invariants(s, cfg.epsilon, cfg.sigma));
  std::vector<EulerInvariants> ei;
  for (const auto& s : limit.states) ei.push_back(euler_invariants(s, c.sigma));
  double nls_law = 0.0, euler_law = 0.0;
  std::map<std::string, double> worst;
  for (std::size_t j = 0; j < qi.size(); ++j) {
    const double t_j = run.snapshots[j].time;
    if (j > 0) {
      const double t0 = run.snapshots[j - 1].time;
      nls_law += 0.5 * (t_j - t0) * law * (t0 * qi[j - 1].potential_term + t_j * qi[j].potential_term);
    }
    std::vector<std::string> row{num(t_j), num(drift(qi[j].mass, qi[0].mass)),
                                 num(drift(qi[j].momentum[0], qi[0].momentum[0])),
                                 num(drift(qi[j].energy, qi[0].energy)),
                                 num(drift(qi[j].pseudo_conformal, qi[0].pseudo_conformal + nls_law))};
    worst["nls_mass_drift"] = std::max(worst["nls_mass_drift"], drift(qi[j].mass, qi[0].mass));
    worst["nls_momentum_drift"] =
        std::max(worst["nls_momentum_drift"], drift(qi[j].momentum[0], qi[0].momentum[0]));
    worst["nls_energy_drift"] = std::max(worst["nls_energy_drift"], drift(qi[j].energy, qi[0].energy));
    if (j < ei.size() && std::abs(limit.states[j].time - t_j) < 1e-9) {
      if (j > 0) {
        const double t0 = limit.states[j - 1].time;
        euler_law += 0.5 * (t_j - t0) * law *
                     (t0 * ei[j - 1].total_pressure + t_j * ei[j].total_pressure);
      }
      row.push_back(num(drift(ei[j].mass, ei[0].mass)));
      row.push_back(num(drift(ei[j].momentum[0], ei[0].momentum[0])));
      row.push_back(num(drift(ei[j].energy, ei[0].energy)));
      row.push_back(num(drift(ei[j].pseudo_conformal, ei[0].pseudo_conformal + euler_law)));
      worst["euler_mass_drift"] = std::max(worst["euler_mass_drift"], drift(ei[j].mass, ei[0].mass));
      worst["euler_momentum_drift"] =
          std::max(worst["euler_momentum_drift"], drift(ei[j].momentum[0], ei[0].momentum[0]));
      worst["euler_energy_drift"] =
          std::max(worst["euler_energy_drift"], drift(ei[j].energy, ei[0].energy));
    } else {
      row.insert(row.end(), 4, "nan");
    }
    t.rows.push_back(std::move(row));
  }
  if (wants(c, "csv")) out.csv("conserve.csv", "conserve", t);
  if (wants(c, "json")) {
    ordered_json j;
    j["command"] = "conserve";
    for (const auto& [k, v] : worst) j[k] = v;
    j["support_warning"] = qi.front().support_warning;
    out.json("conserve.json", j);
  }
  for (const auto& [k, v] : worst) log << "conserve: max " << k << " = " << num(v) << "\n";
}

void cmd_blowup(const RunConfig& c, Artifacts& out, std::ostream& log) {
  const InitialData data = make_initial_data(c.grid(), c.preset, c.epsilon());
  LimitOptions o;
  o.sigma = c.sigma;
  o.final_time = c.horizon;
  o.dt = std::min(c.corrector_dt, c.horizon);
  o.observation_count = 1;
  const LimitTrajectory traj = evolve_limit(data, o);
  const BlowupReport r = blowup_monitor(traj);
  Table t{{"time", "max_grad_v", "total_pressure", "pressure_envelope", "spectral_tail"}, {}};
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.rows.push_back({num(r.times[i]), num(r.max_grad_v_history[i]), num(r.pressure_history[i]),
                      num(r.pressure_envelope[i]), num(traj.history[i].spectral_tail)});
  if (wants(c, "csv")) out.csv("blowup.csv", "blowup", t);
  if (wants(c, "json")) {
    ordered_json j;
    j["command"] = "blowup";
    j["breakdown_flag"] = r.breakdown_flag;
    j["t_estimate"] = r.breakdown_flag ? ordered_json(r.t_estimate) : ordered_json(nullptr);
    j["t_uncertainty"] = r.t_uncertainty;
    j["reason"] = r.reason;
    j["reference_gradient"] = traj.reference_gradient;
    j["pressure_within_envelope"] = r.pressure_within_envelope;
    j["horizon"] = c.horizon;
    out.json("blowup.json", j);
  }
  log << "blowup: " << (r.breakdown_flag ? "breakdown at t = " + num(r.t_estimate) + " (" + r.reason + ")"
                                         : std::string("no breakdown before the horizon"))
      << "\n";
}

void cmd_focusing(const RunConfig& c, Artifacts& out, std::ostream& log) {
  const InitialData data = make_initial_data(c.grid(), c.preset, c.epsilon());
  FocusingOptions fo;
  fo.sigma = c.sigma;
  fo.final_time = c.final_time;
  fo.dt = std::min(1e-3, c.corrector_dt);
  fo.perturbation_amplitude = c.perturbation_amplitude;
  Table t{{"sign", "mode", "wavenumber", "growth_factor", "growth_rate", "linear_rate"}, {}};
  ordered_json j;
  j["command"] = "focusing-demo";
  for (bool focusing : {true, false}) {
    fo.focusing = focusing;
    const auto rows = focusing_demo(data, c.perturbation_wavenumbers, fo);
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      t.rows.push_back({focusing ? "focusing" : "defocusing", std::to_string(r.mode),
                        num(r.wavenumber), num(r.growth_factor), num(r.growth_rate),
                        num(r.linear_rate)});
      ordered_json e;
      e["mode"] = r.mode;
      e["growth_factor"] = r.growth_factor;
      e["growth_rate"] = r.growth_rate;
      e["linear_rate"] = r.linear_rate;
      arr.push_back(e);
      log << "focusing-demo: " << (focusing ? "focusing" : "defocusing") << " k = " << r.mode
          << " rate " << num(r.growth_rate) << " factor " << num(r.growth_factor) << "\n";
    }
    j[focusing ? "focusing" : "defocusing"] = arr;
  }
  if (wants(c, "csv")) out.csv("focusing.csv", "focusing-demo", t);
  if (wants(c, "json")) out.json("focusing.json", j);
}

// Recomputes the content hash embedded in a CSV or JSON artifact.
bool verify_artifact(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (p.extension() == ".json") {
    auto doc = ordered_json::parse(text);
    if (!doc.contains("content_hash")) return false;
    const std::string claimed = doc["content_hash"];
    doc.erase("content_hash");
    return claimed == "fnv1a64:" + hex64(fnv1a64(doc.dump()));
  }
  std::istringstream lines(text);
  std::string config, claimed, line;
  std::streampos body_start = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("# config: ", 0) == 0) config += line.substr(10) + "\n";
    else if (line.rfind("# content-hash: ", 0) == 0) claimed = line.substr(16);
    else if (line.rfind("#", 0) != 0) break;
    body_start = lines.tellg();
  }
  if (claimed.empty()) return false;
  return claimed == "fnv1a64:" + hex64(fnv1a64(config + text.substr(body_start)));
}

void cmd_report(const CommandContext& ctx, Artifacts& out, std::ostream& log) {
  ordered_json j;
  j["command"] = "report";
  ordered_json list = ordered_json::array();
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(ctx.output_directory))
    if (e.is_regular_file() && (e.path().extension() == ".csv" || e.path().extension() == ".json") &&
        e.path().filename() != "report.json")
      paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  bool all_ok = true;
  for (const auto& p : paths) {
    const bool ok = verify_artifact(p);
    all_ok = all_ok && ok;
    ordered_json e;
    e["file"] = p.filename().string();
    e["hash_verified"] = ok;
    list.push_back(e);
    log << "report: " << p.filename().string() << (ok ? " hash ok" : " HASH MISMATCH") << "\n";
  }
  j["artifacts"] = list;
  j["all_verified"] = all_ok;
  out.json("report.json", j);
}

}  // namespace

std::vector<fs::path> run_command(const std::string& name, const RunConfig& config,
                                  const CommandContext& context, std::ostream& log) {
  Artifacts out(context, config);
  if (name == "simulate") cmd_simulate(config, out, log);
  else if (name == "limit") cmd_limit(config, out, log);
  else if (name == "corrector") cmd_corrector(config, out, log);
  else if (name == "sweep") cmd_sweep(config, context, out, log);
  else if (name == "conserve") cmd_conserve(config, out, log);
  else if (name == "blowup") cmd_blowup(config, out, log);
  else if (name == "focusing-demo") cmd_focusing(config, out, log);
  else if (name == "report") cmd_report(context, out, log);
  else throw ConfigError("command", "unknown command '" + name + "'");
  auto files = out.files();
  if (name == "sweep") {
    if (wants(config, "csv")) files.push_back(context.output_directory / "sweep.csv");
    if (wants(config, "json")) files.push_back(context.output_directory / "sweep.json");
  }
  return files;
}

std::string error_record(const std::exception_ptr& error, int& status) {
  ordered_json j;
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    status = exit_config;
    j["error"] = {{"kind", "config"}, {"key", e.key()}, {"message", e.what()}};
  } catch (const NumericalGuardError& e) {
    status = exit_numerical;
    j["error"] = {{"kind", "numerical_guard"}, {"module", e.module()}, {"message", e.what()}};
  } catch (const std::exception& e) {
    status = exit_internal;
    j["error"] = {{"kind", "internal"}, {"message", e.what()}};
  } catch (...) {
    status = exit_internal;
    j["error"] = {{"kind", "internal"}, {"message", "unknown exception"}};
  }
  j["exit_status"] = status;
  return j.dump();
}

}  // namespace wkb
