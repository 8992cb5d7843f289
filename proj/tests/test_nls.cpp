#include "generators.hpp"

#include "wkb/error.hpp"
#include "wkb/initial_data.hpp"
#include "wkb/nls.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace wkb;
using std::numbers::pi;

namespace {

// A e^{i(kx - omega t)/eps} with omega = k^2/2 + |A|^{2 sigma}.
ArrayXcd plane_wave(const Grid& g, double amp, double k, double eps, int sigma, double t) {
  const double omega = 0.5 * k * k + std::pow(amp, 2 * sigma);
  return amp * (Complex(0, 1 / eps) * (k * g.coordinate(0) - omega * t)).exp();
}

NlsState gaussian_state(const Grid& g, double eps, double tilt = 0.5) {
  PresetParams p;
  p.a1 = "gaussian";
  p.phi0 = "cosine";
  p.phase_scale = 0.5;
  p.a0_tilt = tilt;
  return build_initial_data(make_initial_data(g, p, eps), eps);
}

NlsConfig fixed(double eps, int sigma, double T, double dt, int obs = 1) {
  NlsConfig c;
  c.epsilon = eps;
  c.sigma = sigma;
  c.final_time = T;
  c.dt_override = dt;
  c.observation_count = obs;
  c.self_check = SelfCheckPolicy::off;
  return c;
}

}  // namespace

TEST_CASE("plane waves are reproduced exactly") {
  const double L = 2 * pi, eps = 0.1;
  const Grid g = Grid::line(64, L);
  for (int sigma : {1, 2, 3}) {
    const double k = eps * 3.0;  // k/eps on the lattice
    const NlsState u0{ComplexField(g, plane_wave(g, 0.8, k, eps, sigma, 0)), 0.0};
    const NlsRun run = evolve_nls(u0, fixed(eps, sigma, 0.1, 1e-5));
    const ArrayXcd exact = plane_wave(g, 0.8, k, eps, sigma, 0.1);
    CHECK((run.snapshots.back().u.values() - exact).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("step size and observation alignment") {
  const Grid g = Grid::line(64, 16);
  NlsConfig c;
  c.epsilon = 0.25;
  c.final_time = 0.3;
  c.observation_count = 7;
  c.self_check = SelfCheckPolicy::off;
  const NlsRun run = evolve_nls(gaussian_state(g, 0.25), c);
  REQUIRE(run.snapshots.size() == 8);
  CHECK(run.dt <= c.target_dt());
  CHECK(run.steps * run.dt == doctest::Approx(0.3).epsilon(1e-13));
  for (int j = 0; j <= 7; ++j) CHECK(run.snapshots[j].time == doctest::Approx(0.3 * j / 7));
  CHECK(run.snapshots.back().time == 0.3);
}

TEST_CASE("default step follows eps^1.5") {
  NlsConfig c;
  c.epsilon = 1.0 / 64;
  CHECK(c.target_dt() == doctest::Approx(0.01 / 512));
}

TEST_CASE("mass is conserved to roundoff over a thousand steps") {
  const Grid g = Grid::line(256, 16);
  const NlsState u0 = gaussian_state(g, 0.125);
  const NlsRun run = evolve_nls(u0, fixed(0.125, 2, 0.1, 1e-4));
  CHECK(run.steps == 1000);
  const double m0 = nls_invariants(run.snapshots.front(), 0.125, 2).mass;
  const double m1 = nls_invariants(run.snapshots.back(), 0.125, 2).mass;
  CHECK(std::abs(m1 - m0) / m0 < 1e-12);
}

TEST_CASE("energy error is second order in dt") {
  const Grid g = Grid::line(256, 16);
  const NlsState u0 = gaussian_state(g, 0.125);
  const double e0 = nls_invariants(u0, 0.125, 2).energy;
  std::vector<double> err;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    const NlsRun run = evolve_nls(u0, fixed(0.125, 2, 0.25, dt));
    err.push_back(nls_invariants(run.snapshots.back(), 0.125, 2).energy - e0);
  }
  const double ratio = (err[0] - err[1]) / (err[1] - err[2]);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("momentum and pseudo-conformal law") {
  const Grid g = Grid::line(512, 16);
  const double eps = 0.125;
  for (int sigma : {1, 2}) {
    const NlsState u0 = gaussian_state(g, eps);
    const NlsRun run = evolve_nls(u0, fixed(eps, sigma, 0.25, 2e-4, 50));
    std::vector<NlsInvariants> inv;
    for (const auto& s : run.snapshots) inv.push_back(nls_invariants(s, eps, sigma));
    CHECK(std::abs(inv.back().momentum[0] - inv.front().momentum[0]) < 1e-10);
    // d/dt PC = t (2 - n sigma)/(sigma+1) int |u|^{2 sigma + 2}, trapezoid in time
    double law = inv.front().pseudo_conformal;
    for (std::size_t j = 1; j < inv.size(); ++j) {
      const double t0 = run.snapshots[j - 1].time, t1 = run.snapshots[j].time;
      law += 0.5 * (t1 - t0) * (2.0 - sigma) / (sigma + 1) *
             (t0 * inv[j - 1].potential_term + t1 * inv[j].potential_term);
    }
    CHECK(std::abs(inv.back().pseudo_conformal - law) < 1e-4 * inv.front().pseudo_conformal);
    // int x|u|^2 - t P is conserved
    const double drift = inv.back().mass_center[0] - inv.front().mass_center[0];
    CHECK(std::abs(drift) < 1e-8);
  }
}

TEST_CASE("invariants of a gaussian match closed forms") {
  const Grid g = Grid::line(512, 20);
  const ArrayXd x = g.coordinate(0);
  const double w = 1.0, eps = 0.2;
  const NlsState s{ComplexField(g, (-(x / w).square()).exp().cast<Complex>()), 0.0};
  const NlsInvariants inv = nls_invariants(s, eps, 2);
  // int e^{-2x^2} = sqrt(pi/2); int |f'|^2 = sqrt(pi/2); int e^{-6x^2} = sqrt(pi/6)
  CHECK(inv.mass == doctest::Approx(std::sqrt(std::sqrt(pi / 2))).epsilon(1e-12));
  CHECK(inv.energy ==
        doctest::Approx(0.5 * eps * eps * std::sqrt(pi / 2) + std::sqrt(pi / 6) / 3).epsilon(1e-12));
  CHECK(std::abs(inv.momentum[0]) < 1e-14);
  CHECK_FALSE(inv.support_warning);
}

TEST_CASE("support warning for data touching the boundary") {
  const Grid g = Grid::line(128, 4);
  const ArrayXd x = g.coordinate(0);
  const NlsState s{ComplexField(g, (-(x / 1.5).square()).exp().cast<Complex>()), 0.0};
  CHECK(nls_invariants(s, 0.1, 1).support_warning);
}

TEST_CASE("self-check policies") {
  const Grid g = Grid::line(256, 16);
  const NlsState u0 = gaussian_state(g, 0.125);
  NlsConfig c;
  c.epsilon = 0.125;
  c.final_time = 0.25;
  c.self_check = SelfCheckPolicy::report;
  const NlsRun ok = evolve_nls(u0, c);
  CHECK(ok.self_check.performed);
  CHECK(ok.self_check.passed);
  CHECK(ok.self_check.difference < ok.self_check.threshold);

  c.self_check = SelfCheckPolicy::enforce;
  c.dt_override = 0.05;
  c.self_check_tolerance = 1e-6;
  CHECK_THROWS_AS(evolve_nls(u0, c), NumericalGuardError);
  c.self_check = SelfCheckPolicy::report;
  const NlsRun flagged = evolve_nls(u0, c);
  CHECK_FALSE(flagged.self_check.passed);
  c.self_check = SelfCheckPolicy::off;
  CHECK_FALSE(evolve_nls(u0, c).self_check.performed);
}

TEST_CASE("non-finite data trips the guard") {
  const Grid g = Grid::line(32, 4);
  ArrayXcd u = ArrayXcd::Zero(32);
  u[3] = Complex(std::nan(""), 0);
  CHECK_THROWS_AS(evolve_nls(NlsState{ComplexField(g, u), 0.0}, fixed(0.5, 1, 0.1, 0.01)),
                  NumericalGuardError);
}

TEST_CASE("invalid configurations") {
  const Grid g = Grid::line(32, 4);
  const NlsState u0{ComplexField::zero(g), 0.0};
  CHECK_THROWS_AS(evolve_nls(u0, fixed(0.0, 1, 0.1, 0.01)), std::invalid_argument);
  CHECK_THROWS_AS(evolve_nls(u0, fixed(0.5, 0, 0.1, 0.01)), std::invalid_argument);
  CHECK_THROWS_AS(evolve_nls(u0, fixed(0.5, 1, 0.1, 0.2)), std::invalid_argument);
  NlsConfig c = fixed(0.5, 1, 0.1, 0.01);
  c.observation_count = 0;
  CHECK_THROWS_AS(evolve_nls(u0, c), std::invalid_argument);
}

TEST_CASE("runs are deterministic") {
  const Grid g = Grid::line(128, 16);
  const NlsState u0 = gaussian_state(g, 0.25);
  const NlsRun a = evolve_nls(u0, fixed(0.25, 3, 0.2, 1e-3));
  const NlsRun b = evolve_nls(u0, fixed(0.25, 3, 0.2, 1e-3));
  CHECK((a.snapshots.back().u.values() == b.snapshots.back().u.values()).all());
}

TEST_CASE("observers see every snapshot") {
  const Grid g = Grid::line(64, 16);
  int calls = 0;
  const NlsObserver count = [&](const NlsState&) { ++calls; };
  evolve_nls(gaussian_state(g, 0.5), fixed(0.5, 1, 0.1, 1e-3, 5), std::span(&count, 1));
  CHECK(calls == 6);
}
