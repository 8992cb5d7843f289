#include "wkb/config.hpp"

#include "wkb/algebra.hpp"
#include "wkb/error.hpp"
#include "wkb/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wkb {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"dim", "N", "L"}},
      {"physics", {"sigma", "epsilon", "epsilon_list"}},
      {"time",
       {"T", "dt0", "dt_exponent", "observation_count", "corrector_dt", "horizon", "self_check"}},
      {"initial",
       {"a0", "a1", "phi0", "amplitude", "width", "radius", "a0_tilt", "a1_scale", "phase_scale",
        "wavenumber", "perturbation_wavenumbers", "perturbation_amplitude"}},
      {"output", {"directory", "formats"}}};
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(x))
    throw ConfigError(key, "expected a finite real number, got '" + text + "'");
  return x;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const RunConfig& c) {
  require(c.dim == 1 || c.dim == 2, "grid.dim", "must be 1 or 2");
  require(c.points >= 16 && is_power_of_two(c.points), "grid.N", "must be a power of two >= 16");
  require(c.length > 0.0, "grid.L", "must be positive");
  require(c.sigma >= 1 && c.sigma <= max_sigma, "physics.sigma",
          "sigma must be a nonzero natural number (at most " + std::to_string(max_sigma) + ")");
  const std::string ekey = c.epsilon_list_given ? "physics.epsilon_list" : "physics.epsilon";
  require(!c.epsilons.empty(), ekey, "must not be empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    require(c.epsilons[i] > 0.0 && c.epsilons[i] <= 1.0, ekey, "epsilon must lie in (0, 1]");
    if (i > 0) require(c.epsilons[i] < c.epsilons[i - 1], ekey, "must be strictly decreasing");
  }
  require(c.final_time > 0.0, "time.T", "must be positive");
  require(c.dt0 > 0.0, "time.dt0", "must be positive");
  require(c.dt_exponent >= 0.0, "time.dt_exponent", "must be nonnegative");
  for (double e : c.epsilons)
    require(c.dt0 * std::pow(e, c.dt_exponent) < c.final_time, "time.dt0",
            "time step dt0 * epsilon^p must be smaller than T");
  require(c.observation_count >= 1, "time.observation_count", "must be >= 1");
  require(c.corrector_dt > 0.0 && c.corrector_dt <= c.final_time, "time.corrector_dt",
          "must lie in (0, T]");
  require(c.horizon > 0.0, "time.horizon", "must be positive");
  const auto& p = c.preset;
  const std::set<std::string> a0{"gaussian", "compact_bump", "plane_wave", "constant"};
  const std::set<std::string> a1{"zero", "gaussian", "imag_gaussian"};
  const std::set<std::string> phi0{"zero", "cosine", "compact_bump", "plane_wave"};
  require(a0.count(p.a0) > 0, "initial.a0", "unknown preset '" + p.a0 + "'");
  require(a1.count(p.a1) > 0, "initial.a1", "unknown preset '" + p.a1 + "'");
  require(phi0.count(p.phi0) > 0, "initial.phi0", "unknown preset '" + p.phi0 + "'");
  require(p.amplitude >= 0.0, "initial.amplitude", "must be nonnegative");
  require(p.width > 0.0, "initial.width", "must be positive");
  require(p.radius > 0.0, "initial.radius", "must be positive");
  for (int k : c.perturbation_wavenumbers)
    require(k > 0, "initial.perturbation_wavenumbers", "modes must be positive integers");
  require(c.perturbation_amplitude >= 0.0, "initial.perturbation_amplitude", "must be nonnegative");
  require(!c.output_directory.empty(), "output.directory", "must not be empty");
  for (const auto& f : c.formats)
    require(f == "csv" || f == "json" || f == "bin", "output.formats",
            "unknown format '" + f + "' (csv, json, bin)");
}

SelfCheckPolicy parse_policy(const std::string& text) {
  const std::string t = trim(text);
  if (t == "off") return SelfCheckPolicy::off;
  if (t == "report") return SelfCheckPolicy::report;
  if (t == "enforce") return SelfCheckPolicy::enforce;
  throw ConfigError("time.self_check", "expected off, report or enforce, got '" + text + "'");
}

template <typename T>
std::string join(const std::vector<T>& items, auto&& format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + format(items[i]);
  return out;
}

}  // namespace

const char* to_string(SelfCheckPolicy policy) {
  switch (policy) {
    case SelfCheckPolicy::off: return "off";
    case SelfCheckPolicy::report: return "report";
    case SelfCheckPolicy::enforce: return "enforce";
  }
  return "report";
}

Grid RunConfig::grid() const {
  return dim == 1 ? Grid::line(points, length) : Grid::plane({points, points}, {length, length});
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", "malformed document at line " + std::to_string(e.line()) + ": " +
                                    e.message());
  }

  RunConfig c;
  for (const auto& [section, body] : tree) {
    const auto known = schema().find(section);
    if (body.empty() || known == schema().end()) {
      throw ConfigError(section, body.empty() ? "key outside any section" : "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known->second.count(key)) throw ConfigError(full, "unknown key");
      const std::string v = value.data();
      if (section == "grid") {
        if (key == "dim") c.dim = to_int(full, v);
        else if (key == "N") c.points = to_int(full, v);
        else c.length = to_double(full, v);
      } else if (section == "physics") {
        if (key == "sigma") {
          c.sigma = to_int(full, v);
        } else if (key == "epsilon") {
          c.epsilons = {to_double(full, v)};
        } else {
          c.epsilons.clear();
          for (const auto& item : split_list(v)) c.epsilons.push_back(to_double(full, item));
          c.epsilon_list_given = true;
        }
      } else if (section == "time") {
        if (key == "T") c.final_time = to_double(full, v);
        else if (key == "dt0") c.dt0 = to_double(full, v);
        else if (key == "dt_exponent") c.dt_exponent = to_double(full, v);
        else if (key == "observation_count") c.observation_count = to_int(full, v);
        else if (key == "corrector_dt") c.corrector_dt = to_double(full, v);
        else if (key == "horizon") c.horizon = to_double(full, v);
        else c.self_check = parse_policy(v);
      } else if (section == "initial") {
        auto& p = c.preset;
        if (key == "a0") p.a0 = trim(v);
        else if (key == "a1") p.a1 = trim(v);
        else if (key == "phi0") p.phi0 = trim(v);
        else if (key == "amplitude") p.amplitude = to_double(full, v);
        else if (key == "width") p.width = to_double(full, v);
        else if (key == "radius") p.radius = to_double(full, v);
        else if (key == "a0_tilt") p.a0_tilt = to_double(full, v);
        else if (key == "a1_scale") p.a1_scale = to_double(full, v);
        else if (key == "phase_scale") p.phase_scale = to_double(full, v);
        else if (key == "wavenumber") p.wavenumber = to_double(full, v);
        else if (key == "perturbation_wavenumbers") {
          c.perturbation_wavenumbers.clear();
          for (const auto& item : split_list(v))
            c.perturbation_wavenumbers.push_back(to_int(full, item));
        } else {
          c.perturbation_amplitude = to_double(full, v);
        }
      } else {
        if (key == "directory") c.output_directory = trim(v);
        else c.formats = split_list(v);
      }
    }
  }
  if (tree.get_child_optional("physics.epsilon") && tree.get_child_optional("physics.epsilon_list"))
    throw ConfigError("physics.epsilon_list", "give either epsilon or epsilon_list, not both");
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize(const RunConfig& c) {
  auto num = [](double x) { return format_double(x); };
  auto integer = [](int x) { return std::to_string(x); };
  auto str = [](const std::string& s) { return s; };
  std::ostringstream out;
  out << "[grid]\n"
      << "dim = " << c.dim << "\nN = " << c.points << "\nL = " << num(c.length) << "\n\n";
  out << "[physics]\nsigma = " << c.sigma << "\n";
  if (c.epsilon_list_given)
    out << "epsilon_list = " << join(c.epsilons, num) << "\n\n";
  else
    out << "epsilon = " << num(c.epsilon()) << "\n\n";
  out << "[time]\nT = " << num(c.final_time) << "\ndt0 = " << num(c.dt0)
      << "\ndt_exponent = " << num(c.dt_exponent) << "\nobservation_count = " << c.observation_count
      << "\ncorrector_dt = " << num(c.corrector_dt) << "\nhorizon = " << num(c.horizon)
      << "\nself_check = " << to_string(c.self_check) << "\n\n";
  const auto& p = c.preset;
  out << "[initial]\na0 = " << p.a0 << "\na1 = " << p.a1 << "\nphi0 = " << p.phi0
      << "\namplitude = " << num(p.amplitude) << "\nwidth = " << num(p.width)
      << "\nradius = " << num(p.radius) << "\na0_tilt = " << num(p.a0_tilt)
      << "\na1_scale = " << num(p.a1_scale) << "\nphase_scale = " << num(p.phase_scale)
      << "\nwavenumber = " << num(p.wavenumber)
      << "\nperturbation_wavenumbers = " << join(c.perturbation_wavenumbers, integer)
      << "\nperturbation_amplitude = " << num(c.perturbation_amplitude) << "\n\n";
  out << "[output]\ndirectory = " << c.output_directory << "\nformats = " << join(c.formats, str)
      << "\n";
  return out.str();
}

SweepPlan make_sweep_plan(const RunConfig& c) {
  SweepPlan plan;
  if (c.epsilon_list_given) plan.epsilons = c.epsilons;
  plan.sigma = c.sigma;
  plan.grid = c.grid();
  plan.final_time = c.final_time;
  plan.observation_count = c.observation_count;
  plan.dt0 = c.dt0;
  plan.dt_exponent = c.dt_exponent;
  plan.corrector_dt = c.corrector_dt;
  plan.preset = c.preset;
  plan.self_check = c.self_check;
  plan.config_echo = serialize(c);
  return plan;
}

}  // namespace wkb
