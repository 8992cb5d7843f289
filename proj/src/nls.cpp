#include "wkb/nls.hpp"

#include "wkb/algebra.hpp"
#include "wkb/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wkb {

double NlsConfig::target_dt() const {
  return dt_override ? *dt_override : dt0 * std::pow(epsilon, dt_exponent);
}

void NlsConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  require_sigma(sigma);
  if (!(final_time > 0.0)) throw std::invalid_argument("final_time must be positive");
  if (observation_count < 1) throw std::invalid_argument("observation_count must be >= 1");
  const double dt = target_dt();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
  if (!(dt < final_time)) throw std::invalid_argument("time step must be smaller than final_time");
  if (!(self_check_tolerance > 0.0))
    throw std::invalid_argument("self_check_tolerance must be positive");
}

NlsState build_initial_data(const InitialData& data, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("epsilon must lie in (0, 1]");
  validate(data);
  const ArrayXcd amplitude = data.a0.values() + epsilon * data.a1.values();
  const ArrayXcd phase = (Complex(0.0, 1.0 / epsilon) * data.phi0.values().cast<Complex>()).exp();
  return NlsState{ComplexField(data.a0.grid(), amplitude * phase), 0.0};
}

NlsStepper::NlsStepper(const Grid& grid, double epsilon, int sigma, double dt)
    : ops_(grid), epsilon_(epsilon), sigma_(sigma), dt_(dt) {
  const ArrayXcd exponent =
      Complex(0.0, -epsilon * dt / 2.0) * ops_.wavenumber_squared().cast<Complex>();
  half_kinetic_ = (0.5 * exponent).exp();
  full_kinetic_ = exponent.exp();
}

void NlsStepper::nonlinear(ArrayXcd& u) const {
  const double scale = dt_ / epsilon_;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double r = std::norm(u[i]);
    double power = 1.0;
    for (int k = 0; k < sigma_; ++k) power *= r;
    u[i] *= std::polar(1.0, -power * scale);
  }
}

void NlsStepper::advance(ArrayXcd& u, std::int64_t steps) {
  if (steps <= 0) return;
  ops_.forward(u);
  u *= half_kinetic_;
  for (std::int64_t s = 0; s < steps; ++s) {
    ops_.inverse(u);
    nonlinear(u);
    ops_.forward(u);
    u *= s + 1 == steps ? half_kinetic_ : full_kinetic_;
  }
  ops_.inverse(u);
}

namespace {

void require_finite(const ArrayXcd& u, double t) {
  if (!u.allFinite())
    throw NumericalGuardError("nls_solver", "non-finite samples at t = " + std::to_string(t) +
                                                "; reduce dt");
}

ArrayXcd integrate_to(const ArrayXcd& u0, const Grid& grid, const NlsConfig& config, double dt,
                      std::int64_t steps) {
  NlsStepper stepper(grid, config.epsilon, config.sigma, dt);
  ArrayXcd u = u0;
  stepper.advance(u, steps);
  require_finite(u, config.final_time);
  return u;
}

}  // namespace

NlsRun evolve_nls(const NlsState& initial, const NlsConfig& config,
                  std::span<const NlsObserver> observers) {
  config.validate();
  const Grid& grid = initial.u.grid();
  const int m = config.observation_count;
  const double interval = config.final_time / m;
  const auto per_interval =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(interval / config.target_dt() - 1e-9)));
  const double dt = interval / static_cast<double>(per_interval);

  NlsRun run;
  run.dt = dt;
  run.steps = per_interval * m;
  run.snapshots.reserve(m + 1);

  ArrayXcd u = to_physical(initial.u).values();
  require_finite(u, initial.time);
  const ArrayXcd u0 = u;
  NlsStepper stepper(grid, config.epsilon, config.sigma, dt);
  for (int j = 0; j <= m; ++j) {
    if (j > 0) {
      stepper.advance(u, per_interval);
      require_finite(u, initial.time + j * interval);
    }
    run.snapshots.push_back(NlsState{ComplexField(grid, u), initial.time + j * interval});
    for (const auto& observe : observers) observe(run.snapshots.back());
  }

  if (config.self_check != SelfCheckPolicy::off) {
    const ArrayXcd fine = integrate_to(u0, grid, config, dt / 2.0, 2 * run.steps);
    auto& check = run.self_check;
    check.performed = true;
    check.difference = lp_norm(ArrayXcd(u - fine), grid, 2.0);
    check.threshold = config.self_check_tolerance * config.epsilon * lp_norm(fine, grid, 2.0);
    check.passed = check.difference <= check.threshold;
    if (!check.passed && config.self_check == SelfCheckPolicy::enforce)
      throw NumericalGuardError(
          "nls_solver", "dt-halving self-check failed: change " + std::to_string(check.difference) +
                            " exceeds " + std::to_string(check.threshold));
  }
  return run;
}

NlsInvariants nls_invariants(const NlsState& state, double epsilon, int sigma) {
  require_sigma(sigma);
  const Grid& grid = state.u.grid();
  const ArrayXcd u = to_physical(state.u).values();
  Spectral ops(grid);
  const auto grad = ops.gradient(u);
  const double t = state.time;

  NlsInvariants inv;
  inv.mass = lp_norm(u, grid, 2.0);
  const ArrayXd density = u.abs2();
  const ArrayXd potential = density.pow(sigma + 1);
  inv.potential_term = integrate(potential, grid);

  double kinetic = 0.0;
  double conformal = 0.0;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    kinetic += integrate(ArrayXd(grad[axis].abs2()), grid);
    inv.momentum.push_back(epsilon * integrate(ArrayXd((u.conjugate() * grad[axis]).imag()), grid));
    const ArrayXcd ju = grid.coordinate(axis).cast<Complex>() * u +
                        Complex(0.0, epsilon * t) * grad[axis];
    conformal += integrate(ArrayXd(ju.abs2()), grid);
    inv.mass_center.push_back(integrate(ArrayXd((u.conjugate() * ju).real()), grid));
  }
  inv.energy = 0.5 * epsilon * epsilon * kinetic + inv.potential_term / (sigma + 1);
  inv.pseudo_conformal = 0.5 * conformal + t * t * inv.potential_term / (sigma + 1);

  Eigen::Array<bool, Eigen::Dynamic, 1> strip =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(grid.size(), false);
  for (int axis = 0; axis < grid.dim(); ++axis)
    strip = strip || (grid.coordinate(axis).abs() >= 0.4 * grid.length(axis));
  const double total = density.sum();
  inv.boundary_tail = total > 0.0 ? strip.select(density, 0.0).sum() / total : 0.0;
  inv.support_warning = inv.boundary_tail > support_tail_threshold;
  return inv;
}

}  // namespace wkb
