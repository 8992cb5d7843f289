// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "wkb/algebra.hpp"
#include "wkb/corrector.hpp"
#include "wkb/diagnostics.hpp"
#include "wkb/initial_data.hpp"
#include "wkb/io.hpp"
#include "wkb/limit.hpp"
#include "wkb/nls.hpp"
#include "wkb/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace wkb;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [out of range]");
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double ratio_max_min(const std::vector<SweepRow>& rows, double SweepRow::*m) {
  double lo = infinity, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.*m);
    hi = std::max(hi, r.*m);
  }
  return hi / lo;
}

const RateFit& fit(const SweepResult& r, const std::string& metric) {
  for (const auto& f : r.fits)
    if (f.metric == metric) return f;
  throw std::runtime_error("missing fit " + metric);
}

// gaussian a0 = e^{-(x/w)^2}(1 + i x/(2w)), a1 = gaussian, phi0 = -cos(2 pi x/L)/2
PresetParams wkb_preset(double width) {
  PresetParams p;
  p.a0 = "gaussian";
  p.a1 = "gaussian";
  p.phi0 = "cosine";
  p.phase_scale = 0.5;
  p.a0_tilt = 0.5;
  p.width = width;
  return p;
}

SweepPlan ladder(int sigma, double width) {
  SweepPlan p;
  p.sigma = sigma;
  p.preset = wkb_preset(width);
  p.workers = std::max(1u, std::thread::hardware_concurrency());
  p.config_echo = "acceptance ladder sigma=" + std::to_string(sigma) + " width=" + fmt(width) + "\n";
  return p;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream s;
  write_sweep_csv(s, r);
  return s.str();
}

// ---------------------------------------------------------------------------

Outcome algebra_suite() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  double gb = 0.0, b1 = 0.0, diag = 0.0, bound = infinity;
  for (int sigma = 1; sigma <= 4; ++sigma) {
    const double c = sigma == 2 ? 2.0 / 3.0 : c_sigma_bound(sigma);
    for (int i = 0; i < 10000; ++i) {
      const double r1 = unit(rng), r2 = unit(rng);
      const double b = b_sigma(r1, r2, sigma);
      gb = std::max(gb, std::abs(g_sigma(r1, r2, sigma) * b - (std::pow(r1, sigma) - std::pow(r2, sigma))));
      b1 = std::max(b1, std::abs(b * b - b_squared_identity(r1, r2, sigma)));
      diag = std::max(diag, std::abs(q_sigma(r1, r1, sigma) - sigma * std::pow(r1, sigma - 1)));
      bound = std::min(bound, q_sigma(r1, r2, sigma) -
                                  c * (std::pow(r1, sigma - 1) + std::pow(r2, sigma - 1)));
    }
  }
  const double c2 = c_sigma_bound(2);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(gb < 1e-10, "max|GB-(r1^s-r2^s)| = " + fmt(gb));
  o.require(b1 < 1e-10, "max|B^2 identity| = " + fmt(b1));
  o.require(diag < 1e-10, "max|Q(r,r)-s r^(s-1)| = " + fmt(diag));
  o.require(bound > -1e-10, "min(Q - C(r1^(s-1)+r2^(s-1))) = " + fmt(bound));
  o.require(std::abs(c2 - 2.0 / 3.0) < 1e-10, "C_2 = " + fmt(c2));
  o.require(secs < 1.0, "time " + fmt(secs) + " s");
  return o;
}

Outcome nls_solver() {
  Outcome o;
  {
    const double eps = 0.1, k = 0.3, amp = 0.8;
    const Grid g = Grid::line(64, 2 * pi);
    double worst = 0.0;
    for (int sigma : {1, 2}) {
      const double omega = 0.5 * k * k + std::pow(amp, 2 * sigma);
      auto wave = [&](double t) {
        return ArrayXcd(amp * (Complex(0, 1 / eps) * (k * g.coordinate(0) - omega * t)).exp());
      };
      NlsConfig c;
      c.epsilon = eps;
      c.sigma = sigma;
      c.final_time = 0.1;
      c.observation_count = 1;
      c.dt_override = 1e-5;
      c.self_check = SelfCheckPolicy::off;
      const NlsRun run = evolve_nls(NlsState{ComplexField(g, wave(0)), 0.0}, c);
      worst = std::max(worst, (run.snapshots.back().u.values() - wave(0.1)).abs().maxCoeff());
    }
    o.require(worst < 1e-8, "plane wave error " + fmt(worst));
  }
  const Grid g = Grid::line(512, 16);
  const double eps = 0.125;
  const NlsState u0 = build_initial_data(make_initial_data(g, wkb_preset(1.5), eps), eps);
  NlsConfig c;
  c.epsilon = eps;
  c.sigma = 2;
  c.observation_count = 1;
  c.self_check = SelfCheckPolicy::off;
  {
    c.final_time = 0.1;
    c.dt_override = 1e-4;
    const NlsRun run = evolve_nls(u0, c);
    const double m0 = nls_invariants(run.snapshots.front(), eps, 2).mass;
    const double m1 = nls_invariants(run.snapshots.back(), eps, 2).mass;
    const double drift = std::abs(m1 - m0) / m0;
    o.require(run.steps == 1000 && drift < 1e-12, "mass drift " + fmt(drift) + " over " +
                                                      std::to_string(run.steps) + " steps");
  }
  {
    c.final_time = 0.25;
    const double e0 = nls_invariants(u0, eps, 2).energy;
    std::vector<double> err;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      c.dt_override = dt;
      err.push_back(nls_invariants(evolve_nls(u0, c).snapshots.back(), eps, 2).energy - e0);
    }
    const double ratio = (err[0] - err[1]) / (err[1] - err[2]);
    o.require(ratio >= 3.5 && ratio <= 4.5, "energy Richardson ratio " + fmt(ratio));
  }
  return o;
}

Outcome limit_solver() {
  Outcome o;
  const Grid g = Grid::line(512, 16);
  const InitialData d = make_initial_data(g, wkb_preset(1.5), 0.125);
  {
    std::vector<ArrayXcd> finals;
    for (double dt : {0.008, 0.004, 0.002}) {
      LimitOptions lo;
      lo.final_time = 0.256;
      lo.dt = dt;
      lo.observation_count = 1;
      finals.push_back(evolve_limit(d, lo).states.back().A.values());
    }
    const double ratio = lp_norm(ArrayXcd(finals[0] - finals[1]), g, 2.0) /
                         lp_norm(ArrayXcd(finals[1] - finals[2]), g, 2.0);
    o.require(ratio >= 14 && ratio <= 18, "RK4 Richardson ratio " + fmt(ratio));
  }
  double consistency = 0.0, mass = 0.0, momentum = 0.0, energy = 0.0, phase = 0.0;
  for (int sigma : {1, 2, 3}) {
    LimitOptions lo;
    lo.sigma = sigma;
    lo.final_time = 0.25;
    lo.dt = 1e-3;
    const LimitTrajectory t = evolve_limit(d, lo);
    const EulerInvariants e0 = euler_invariants(t.states.front(), sigma);
    for (const auto& s : t.states) {
      ArrayXcd power = s.a.values();
      for (int k = 1; k < sigma; ++k) power *= s.a.values();
      consistency = std::max(consistency, (s.A.values() - power).abs().maxCoeff() /
                                              (1 + std::pow(s.a.values().abs().maxCoeff(), sigma)));
      const EulerInvariants e = euler_invariants(s, sigma);
      mass = std::max(mass, std::abs(e.mass - e0.mass) / e0.mass);
      energy = std::max(energy, std::abs(e.energy - e0.energy) / e0.energy);
      momentum = std::max(momentum, std::abs(e.momentum[0] - e0.momentum[0]) /
                                        std::max(1.0, std::abs(e0.momentum[0])));
      phase = std::max(phase, lp_norm(ArrayXd(phase_gradient(s)[0] - s.v[0].values()), g, 2.0));
    }
  }
  o.require(consistency < 1e-8, "A-a^s consistency " + fmt(consistency));
  o.require(mass < 1e-8 && momentum < 1e-8 && energy < 1e-8,
            "drifts mass " + fmt(mass) + " momentum " + fmt(momentum) + " energy " + fmt(energy));
  o.require(phase < 1e-6, "||grad phi - v|| " + fmt(phase));
  return o;
}

Outcome wkb_convergence(const SweepResult& s2) {
  Outcome o;
  const RateFit& f = fit(s2, "err_two_l2");
  o.require(f.slope >= 0.8 && f.slope <= 1.2, "slope " + fmt(f.slope));
  o.require(f.r2 >= 0.98, "r2 " + fmt(f.r2));
  return o;
}

Outcome uniform_bounds(const SweepResult& s2, const SweepResult& s3) {
  Outcome o;
  const double a2 = ratio_max_min(s2.rows, &SweepRow::a_eps_hk);
  const double q2 = ratio_max_min(s2.rows, &SweepRow::q_eps_hkm1);
  const double a3 = ratio_max_min(s3.rows, &SweepRow::a_eps_hk);
  const double q3 = ratio_max_min(s3.rows, &SweepRow::q_eps_hkm1);
  o.require(a2 < 2, "sigma=2 a_eps H^2 ratio " + fmt(a2));
  o.require(q2 < 2, "sigma=2 q_eps H^1 ratio " + fmt(q2));
  o.require(a3 < 2, "sigma=3 a_eps H^3 ratio " + fmt(a3));
  o.require(q3 < 2, "sigma=3 q_eps H^2 ratio " + fmt(q3));
  return o;
}

Outcome density_convergence(const SweepResult& s2) {
  Outcome o;
  const RateFit& pos = fit(s2, "pos_err_pow");
  const RateFit& cur = fit(s2, "cur_err_l1");
  o.require(pos.slope >= 1.8, "position slope " + fmt(pos.slope));
  o.require(cur.slope >= 0.8 && cur.slope <= 1.2, "current slope " + fmt(cur.slope));
  return o;
}

Outcome transport_identity() {
  Outcome o;
  const double eps = 0.125, h = 0.04;
  const Grid g = Grid::line(512, 16);
  double worst_order_lo = infinity, worst_order_hi = 0.0;
  for (int sigma : {1, 2, 3}) {
    const InitialData d = make_initial_data(g, wkb_preset(1.5), eps);
    NlsConfig c;
    c.epsilon = eps;
    c.sigma = sigma;
    c.final_time = 3 * h;
    c.observation_count = 6;
    c.dt_override = 1e-4;
    c.self_check = SelfCheckPolicy::off;
    const NlsRun run = evolve_nls(build_initial_data(d, eps), c);
    LimitOptions lo;
    lo.sigma = sigma;
    lo.final_time = 3 * h;
    lo.observation_count = 6;
    const LimitTrajectory t = evolve_limit(d, lo);
    std::vector<DiagnosticsRecord> r;
    for (int j = 0; j <= 6; ++j) r.push_back(make_record(run.snapshots[j], t.states[j], eps, sigma, 0));
    const std::vector<DiagnosticsRecord> wide{r[2], r[4], r[6]}, narrow{r[3], r[4], r[5]};
    const double order = std::log2(residual_transport(wide, t.states[4], h) /
                                   residual_transport(narrow, t.states[4], h / 2));
    worst_order_lo = std::min(worst_order_lo, order);
    worst_order_hi = std::max(worst_order_hi, order);
    if (sigma == 1) {
      const RealField f = transport_residual_field(narrow, t.states[4], h / 2);
      const DensityDefects dd = density_defects(narrow, t.states[4], h / 2);
      const double mismatch = (f.values() - (dd.r3.values() - dd.r1.values())).abs().maxCoeff();
      const double scale = f.values().abs().maxCoeff();
      o.require(mismatch < 1e-6 * scale,
                "sigma=1 reduction mismatch " + fmt(mismatch) + " vs residual " + fmt(scale));
    }
  }
  o.require(worst_order_lo >= 1.5 && worst_order_hi <= 2.5,
            "residual order in [" + fmt(worst_order_lo) + ", " + fmt(worst_order_hi) + "]");
  return o;
}

Outcome modulated_energy(const SweepResult& s2) {
  Outcome o;
  double worst = 0.0;
  for (const auto& r : s2.rows) worst = std::max(worst, r.envelope_ratio);
  o.require(worst <= 1.0, "max e(t)/(e(0)exp(Ct)) = " + fmt(worst));
  const double e0 = ratio_max_min(s2.rows, &SweepRow::energy0);
  o.require(e0 < 2, "e(0) max/min " + fmt(e0));
  return o;
}

Outcome q_initial(const SweepResult& s3) {
  Outcome o;
  const double q = ratio_max_min(s3.rows, &SweepRow::q0_hsm1);
  o.require(q < 2, "sigma=3 ||q(0)||_{H^2} max/min " + fmt(q));
  return o;
}

Outcome breakdown_demo() {
  Outcome o;
  const Grid g = Grid::line(4096, 16);
  for (int sigma : {1, 2}) {
    std::vector<double> times;
    for (double amp : {0.5, 1.0}) {
      PresetParams p;
      p.a0 = "compact_bump";
      p.amplitude = amp;
      LimitOptions lo;
      lo.sigma = sigma;
      lo.final_time = 20.0;
      lo.dt = 2.5e-3;
      lo.observation_count = 1;
      const BlowupReport r = blowup_monitor(evolve_limit(make_initial_data(g, p, 0.1), lo));
      o.require(r.breakdown_flag && r.t_estimate < 20.0,
                "sigma=" + std::to_string(sigma) + " amp " + fmt(amp) + " t* " + fmt(r.t_estimate));
      times.push_back(r.breakdown_flag ? r.t_estimate : infinity);
    }
    o.require(times[1] < times[0], "doubling shortens sigma=" + std::to_string(sigma));
  }
  return o;
}

Outcome focusing_demo_check() {
  Outcome o;
  const Grid g = Grid::line(128, 2 * pi);
  PresetParams p;
  p.a0 = "constant";
  const InitialData d = make_initial_data(g, p, 0.1);
  FocusingOptions fo;
  fo.sigma = 1;
  fo.final_time = 0.25;
  fo.dt = 1e-3;
  const std::vector<int> modes{4, 8, 16, 32};
  const auto rows = focusing_demo(d, modes, fo);
  bool increasing = true;
  std::string rates;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].growth_rate > rows[i - 1].growth_rate)) increasing = false;
    rates += (i ? "," : "") + fmt(rows[i].growth_rate);
  }
  o.require(increasing, "focusing rates " + rates);
  fo.focusing = false;
  double lo = infinity, hi = 0.0;
  for (const auto& r : focusing_demo(d, modes, fo)) {
    lo = std::min(lo, r.growth_factor);
    hi = std::max(hi, r.growth_factor);
  }
  o.require(lo >= 0.8 && hi <= 1.2, "defocusing factors in [" + fmt(lo) + ", " + fmt(hi) + "]");
  return o;
}

Outcome determinism(const SweepResult& s2, const std::string& first) {
  Outcome o;
  const std::string again = csv_of(run_sweep(s2.plan));
  o.require(again == first, "repeat sweep CSV " + std::string(again == first ? "identical" : "differs") +
                                " (" + std::to_string(first.size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %-22s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  report(1, "algebra", algebra_suite);
  report(2, "nls-solver", nls_solver);
  report(3, "limit-solver", limit_solver);

  SweepResult s2, s3;
  std::string s2_csv;
  try {
    s2 = run_sweep(ladder(2, 1.5));
    s2_csv = csv_of(s2);
    s3 = run_sweep(ladder(3, 2.0));
  } catch (const std::exception& e) {
    std::printf("sweep failed: %s\n", e.what());
  }
  const bool have = s2.rows.size() == 5 && s3.rows.size() == 5;
  auto needs = [&](auto f) {
    return [=, &s2, &s3, &s2_csv]() -> Outcome {
      if (!have) return Outcome{false, "sweep unavailable"};
      return f(s2, s3, s2_csv);
    };
  };
  report(4, "wkb-convergence", needs([](auto& a, auto&, auto&) { return wkb_convergence(a); }));
  report(5, "uniform-bounds", needs([](auto& a, auto& b, auto&) { return uniform_bounds(a, b); }));
  report(6, "density-convergence", needs([](auto& a, auto&, auto&) { return density_convergence(a); }));
  report(7, "transport-identity", transport_identity);
  report(8, "modulated-energy", needs([](auto& a, auto&, auto&) { return modulated_energy(a); }));
  report(9, "q-initial-bound", needs([](auto&, auto& b, auto&) { return q_initial(b); }));
  report(10, "breakdown-demo", breakdown_demo);
  report(11, "focusing-demo", focusing_demo_check);
  report(12, "determinism", needs([](auto& a, auto&, auto& c) { return determinism(a, c); }));

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
