#include "wkb/sweep.hpp"

#include "wkb/algebra.hpp"
#include "wkb/corrector.hpp"
#include "wkb/diagnostics.hpp"
#include "wkb/error.hpp"
#include "wkb/io.hpp"
#include "wkb/limit.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace wkb {

void SweepPlan::validate() const {
  if (epsilons.empty()) throw std::invalid_argument("sweep: empty epsilon list");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] <= 1.0))
      throw std::invalid_argument("sweep: every epsilon must lie in (0, 1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("sweep: epsilon list must be strictly decreasing");
  }
  require_sigma(sigma);
  if (!(final_time > 0.0)) throw std::invalid_argument("sweep: final_time must be positive");
  if (observation_count < 2) throw std::invalid_argument("sweep: need at least 2 observation intervals");
  if (!(corrector_dt > 0.0)) throw std::invalid_argument("sweep: corrector_dt must be positive");
  if (workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");
}

int uniform_order(int sigma, int dim) {
  if (sigma >= 3) return sigma;
  if (sigma == 2) return dim == 1 ? 2 : 1;
  return 1;
}

double wkb_sup_exponent(int dim) { return dim == 1 ? infinity : 6.0; }

RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& errors,
                 std::string metric) {
  if (epsilons.size() != errors.size())
    throw std::invalid_argument("fit_rate: epsilon and error lists differ in length");
  if (errors.size() < 3) throw std::invalid_argument("fit_rate: insufficient points (need >= 3)");
  const auto n = static_cast<double>(errors.size());
  double sx = 0, sy = 0;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw std::invalid_argument("fit_rate: errors must be positive and finite");
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("fit_rate: epsilons must be positive");
    x.push_back(std::log(epsilons[i]));
    y.push_back(std::log(errors[i]));
    sx += x.back();
    sy += y.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: epsilons must not all coincide");
  RateFit fit;
  fit.metric = std::move(metric);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.noisy = fit.r2 < 0.98;
  return fit;
}

namespace {

struct SharedRuns {
  InitialData data;
  std::vector<LimitState> limit;        // at observation times
  std::vector<CorrectorState> corrector;
  std::vector<ComplexField> tilde;
  double phi1_sup = 0.0;
};

SharedRuns shared_runs(const SweepPlan& plan) {
  SharedRuns s{make_initial_data(plan.grid, plan.preset, plan.epsilons.front()), {}, {}, {}, 0.0};
  LimitOptions lo;
  lo.sigma = plan.sigma;
  lo.final_time = plan.final_time;
  CorrectorOptions co;
  co.dt = plan.corrector_dt;
  co.observation_count = plan.observation_count;
  const LimitTrajectory limit = evolve_limit(s.data, matched_limit_options(lo, co));
  if (limit.breakdown)
    throw NumericalGuardError("sweep", "limit solution breaks down at t = " +
                                           std::to_string(limit.breakdown_time) +
                                           " inside the sweep window");
  const CorrectorTrajectory corr = evolve_corrector(limit, s.data.a1, co);
  const int m = plan.observation_count;
  std::size_t cursor = 0;
  for (int j = 0; j <= m; ++j) {
    const double t = plan.final_time * j / m;
    while (cursor + 1 < limit.states.size() &&
           std::abs(limit.states[cursor].time - t) > std::abs(limit.states[cursor + 1].time - t))
      ++cursor;
    LimitState state = limit.states[cursor];
    state.time = t;
    CorrectorState c = corr.states.at(j);
    c.time = t;
    s.tilde.push_back(tilde_amplitude(state, c));
    s.phi1_sup = std::max(s.phi1_sup, c.phi1.values().abs().maxCoeff());
    s.limit.push_back(std::move(state));
    s.corrector.push_back(std::move(c));
  }
  return s;
}

SweepRow evaluate_row(const SweepPlan& plan, const SharedRuns& shared, double eps) {
  SweepRow row;
  row.epsilon = eps;
  NlsConfig cfg;
  cfg.epsilon = eps;
  cfg.sigma = plan.sigma;
  cfg.final_time = plan.final_time;
  cfg.dt0 = plan.dt0;
  cfg.dt_exponent = plan.dt_exponent;
  cfg.observation_count = plan.observation_count;
  cfg.self_check = plan.self_check;
  const NlsRun run = evolve_nls(build_initial_data(shared.data, eps), cfg);
  row.dt = run.dt;
  row.steps = run.steps;
  row.self_check = run.self_check;
  if (run.self_check.performed && !run.self_check.passed) {
    row.flagged = true;
    row.flag_reason = "self-check";
  }

  const Grid& grid = plan.grid;
  const int sigma = plan.sigma;
  const int k = uniform_order(sigma, grid.dim());
  const double p = wkb_sup_exponent(grid.dim());
  const int m = plan.observation_count;
  std::vector<DiagnosticsRecord> records;
  for (int j = 0; j <= m; ++j) {
    const NlsState& u = run.snapshots[j];
    const LimitState& lim = shared.limit[j];
    records.push_back(make_record(u, lim, eps, sigma, std::max(k, sigma - 1)));
    const DiagnosticsRecord& r = records.back();

    const ArrayXcd one = u.u.values() - demodulate(lim.a, lim.phi, eps).values();
    const ArrayXcd two = u.u.values() - demodulate(shared.tilde[j], lim.phi, eps).values();
    row.err_one_l2 = std::max(row.err_one_l2, lp_norm(one, grid, 2.0));
    row.err_one_sup = std::max(row.err_one_sup, lp_norm(one, grid, p));
    row.err_two_l2 = std::max(row.err_two_l2, lp_norm(two, grid, 2.0));
    row.err_two_sup = std::max(row.err_two_sup, lp_norm(two, grid, p));
    row.a_eps_hk = std::max(row.a_eps_hk, r.sobolev_table.at("a_eps:H" + std::to_string(k)));
    row.q_eps_hkm1 = std::max(row.q_eps_hkm1, r.sobolev_table.at("q_eps:H" + std::to_string(k - 1)));

    const DensityMetrics dm = density_metrics(r, lim, sigma, eps);
    row.pos_err = std::max(row.pos_err, dm.pos_err_lsp1);
    row.cur_err_weighted = std::max(row.cur_err_weighted, dm.cur_err_weighted);
    row.cur_err_l1 = std::max(row.cur_err_l1, dm.cur_err_l1);
    row.envelope_rate = std::max(row.envelope_rate, envelope_rate(lim, sigma));
  }
  row.pos_err_pow = std::pow(row.pos_err, sigma + 1);
  row.q0_hsm1 = records.front().sobolev_table.at("q_eps:H" + std::to_string(sigma - 1));
  row.energy0 = records.front().modulated_energy;
  for (const auto& r : records)
    row.envelope_ratio = std::max(
        row.envelope_ratio, r.modulated_energy / (row.energy0 * std::exp(row.envelope_rate * r.time)));
  const double h = plan.final_time / m;
  for (int j = 1; j < m; ++j)
    row.residual_max = std::max(
        row.residual_max,
        residual_transport(std::span(records).subspan(j - 1, 3), shared.limit[j], h));
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan) {
  plan.validate();
  const SharedRuns shared = shared_runs(plan);

  SweepResult result;
  result.plan = plan;
  result.phi1_sup = shared.phi1_sup;
  result.rows.resize(plan.epsilons.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < plan.epsilons.size(); i = next++) {
      try {
        result.rows[i] = evaluate_row(plan, shared, plan.epsilons[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(plan.workers, static_cast<int>(plan.epsilons.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto column = [&](double SweepRow::*field) {
    std::vector<double> out;
    for (const auto& r : result.rows) out.push_back(r.*field);
    return out;
  };
  const std::pair<const char*, double SweepRow::*> fitted[] = {
      {"err_two_l2", &SweepRow::err_two_l2},   {"err_two_sup", &SweepRow::err_two_sup},
      {"err_one_l2", &SweepRow::err_one_l2},   {"pos_err_pow", &SweepRow::pos_err_pow},
      {"cur_err_l1", &SweepRow::cur_err_l1},   {"cur_err_weighted", &SweepRow::cur_err_weighted}};
  if (plan.epsilons.size() >= 3) {
    for (const auto& [name, field] : fitted) {
      try {
        result.fits.push_back(fit_rate(plan.epsilons, column(field), name));
      } catch (const std::invalid_argument&) {
        RateFit f;
        f.metric = name;
        f.slope = f.intercept = f.r2 = std::numeric_limits<double>::quiet_NaN();
        f.noisy = true;
        result.fits.push_back(f);
      }
    }
  }
  return result;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns{
      "epsilon",        "dt",           "steps",       "self_check_passed", "self_check_change",
      "self_check_threshold", "flagged", "err_one_l2", "err_one_sup",      "err_two_l2",
      "err_two_sup",    "a_eps_hk",     "q_eps_hkm1",  "q0_hsm1",           "pos_err",
      "pos_err_pow",    "cur_err_weighted", "cur_err_l1", "energy0",        "envelope_rate",
      "envelope_ratio", "residual_max", "slope_err_two_l2"};
  return columns;
}

namespace {

double fitted_slope(const SweepResult& r, const std::string& metric) {
  for (const auto& f : r.fits)
    if (f.metric == metric) return f.slope;
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::string> row_cells(const SweepRow& r, double slope) {
  return {format_double(r.epsilon),
          format_double(r.dt),
          std::to_string(r.steps),
          r.self_check.performed ? (r.self_check.passed ? "true" : "false") : "skipped",
          format_double(r.self_check.difference),
          format_double(r.self_check.threshold),
          r.flagged ? r.flag_reason : "",
          format_double(r.err_one_l2),
          format_double(r.err_one_sup),
          format_double(r.err_two_l2),
          format_double(r.err_two_sup),
          format_double(r.a_eps_hk),
          format_double(r.q_eps_hkm1),
          format_double(r.q0_hsm1),
          format_double(r.pos_err),
          format_double(r.pos_err_pow),
          format_double(r.cur_err_weighted),
          format_double(r.cur_err_l1),
          format_double(r.energy0),
          format_double(r.envelope_rate),
          format_double(r.envelope_ratio),
          format_double(r.residual_max),
          format_double(slope)};
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  std::ostringstream body;
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) body << (i ? "," : "") << cols[i];
  body << "\r\n";
  const double slope = fitted_slope(result, "err_two_l2");
  for (const auto& row : result.rows) {
    const auto cells = row_cells(row, slope);
    for (std::size_t i = 0; i < cells.size(); ++i) body << (i ? "," : "") << csv_field(cells[i]);
    body << "\r\n";
  }
  const std::string table = body.str();

  out << "# wkbench sweep\n";
  out << "# columns: sup over observation times; err_*_sup uses L^"
      << (result.plan.grid.dim() == 1 ? "inf" : "6") << "; H^k with k = "
      << uniform_order(result.plan.sigma, result.plan.grid.dim()) << "\n";
  std::istringstream echo(result.plan.config_echo);
  for (std::string line; std::getline(echo, line);) out << "# config: " << line << "\n";
  for (const auto& f : result.fits)
    out << "# fit: " << f.metric << " slope=" << format_double(f.slope)
        << " r2=" << format_double(f.r2) << (f.noisy ? " noisy" : "") << "\n";
  out << "# content-hash: fnv1a64:" << hex64(fnv1a64(result.plan.config_echo + table)) << "\n";
  out << table;
}

void write_sweep_json(std::ostream& out, const SweepResult& result) {
  using nlohmann::ordered_json;
  const SweepPlan& plan = result.plan;
  ordered_json doc;
  ordered_json p;
  p["epsilons"] = plan.epsilons;
  p["sigma"] = plan.sigma;
  p["dim"] = plan.grid.dim();
  p["points"] = plan.grid.points(0);
  p["length"] = plan.grid.length(0);
  p["final_time"] = plan.final_time;
  p["observation_count"] = plan.observation_count;
  p["dt0"] = plan.dt0;
  p["dt_exponent"] = plan.dt_exponent;
  p["corrector_dt"] = plan.corrector_dt;
  p["preset"] = plan.preset.a0 + "/" + plan.preset.a1 + "/" + plan.preset.phi0;
  p["config"] = plan.config_echo;
  doc["plan"] = p;

  ordered_json rows = ordered_json::array();
  const auto& cols = sweep_columns();
  const double slope = fitted_slope(result, "err_two_l2");
  for (const auto& row : result.rows) {
    const auto cells = row_cells(row, slope);
    ordered_json r;
    for (std::size_t i = 0; i < cols.size(); ++i) r[cols[i]] = cells[i];
    rows.push_back(r);
  }
  doc["rows"] = rows;
  ordered_json fits = ordered_json::array();
  for (const auto& f : result.fits) {
    ordered_json j;
    j["metric"] = f.metric;
    j["slope"] = format_double(f.slope);
    j["intercept"] = format_double(f.intercept);
    j["r2"] = format_double(f.r2);
    j["noisy"] = f.noisy;
    fits.push_back(j);
  }
  doc["fits"] = fits;
  doc["phi1_sup"] = format_double(result.phi1_sup);
  ordered_json env;
  env["compiler"] = __VERSION__;
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                 "." + std::to_string(EIGEN_MINOR_VERSION);
  env["fft"] = "Eigen::FFT (kissfft backend)";
  doc["environment"] = env;
  doc["content_hash"] = "fnv1a64:" + hex64(fnv1a64(doc.dump()));
  const std::string text = doc.dump(2);
  out << text << "\n";
}

}  // namespace wkb
