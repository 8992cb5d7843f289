#include "wkb/limit.hpp"

#include "wkb/algebra.hpp"
#include "wkb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wkb {

void LimitOptions::validate() const {
  require_sigma(sigma);
  if (!(final_time > 0.0)) throw std::invalid_argument("limit: final_time must be positive");
  if (!(dt > 0.0 && dt <= final_time))
    throw std::invalid_argument("limit: dt must be positive and not exceed final_time");
  if (observation_count < 0) throw std::invalid_argument("limit: observation_count must be >= 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("limit: cfl must lie in (0, 1]");
  if (!(breakdown_factor > 1.0)) throw std::invalid_argument("limit: breakdown_factor must exceed 1");
}

namespace {

struct Fields {
  std::vector<ArrayXd> v;
  ArrayXcd A;
  ArrayXcd a;
  ArrayXd phi;

  void axpy(double h, const Fields& d) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += h * d.v[i];
    A += h * d.A;
    a += h * d.a;
    phi += h * d.phi;
  }
  bool finite() const {
    for (const auto& c : v)
      if (!c.allFinite()) return false;
    return A.allFinite() && a.allFinite() && phi.allFinite();
  }
};

class LimitRhs {
 public:
  LimitRhs(const Grid& grid, int sigma, bool focusing, bool dealias)
      : ops_(grid), sigma_(sigma), sign_(focusing ? -1.0 : 1.0), dealias_(dealias) {}

  Spectral& ops() { return ops_; }

  Fields operator()(const Fields& s) {
    const int dim = ops_.grid().dim();
    const auto n = ops_.grid().size();
    const Complex i(0.0, 1.0);

    ArrayXd div = ArrayXd::Zero(n);
    for (int axis = 0; axis < dim; ++axis) div += ops_.derivative(s.v[axis], axis);

    ArrayXd kinetic = ArrayXd::Zero(n);
    for (const auto& c : s.v) kinetic += 0.5 * c.square();
    ArrayXcd head = (kinetic + sign_ * s.A.abs2()).cast<Complex>();
    ops_.forward(head);
    if (dealias_) head = ops_.dealias_mask().select(head, Complex(0.0));

    Fields d;
    for (int axis = 0; axis < dim; ++axis) {
      ArrayXcd g = i * ops_.odd_wavenumber(axis) * head;
      ops_.inverse(g);
      d.v.push_back(-g.real());
    }
    ops_.inverse(head);
    d.phi = -head.real();

    const auto gA = ops_.gradient(s.A);
    const auto ga = ops_.gradient(s.a);
    d.A = -0.5 * sigma_ * s.A * div;
    d.a = -0.5 * s.a * div;
    for (int axis = 0; axis < dim; ++axis) {
      d.A -= s.v[axis] * gA[axis];
      d.a -= s.v[axis] * ga[axis];
    }
    if (dealias_) {
      ops_.dealias(d.A);
      ops_.dealias(d.a);
    }
    return d;
  }

 private:
  Spectral ops_;
  int sigma_;
  double sign_;
  bool dealias_;
};

Fields to_fields(const LimitState& s) {
  Fields f;
  for (const auto& c : s.v) f.v.push_back(c.values());
  f.A = s.A.values();
  f.a = s.a.values();
  f.phi = s.phi.values();
  return f;
}

LimitState to_state(const Grid& grid, const Fields& f, double t) {
  std::vector<RealField> v;
  for (const auto& c : f.v) v.emplace_back(grid, c);
  return LimitState{std::move(v), ComplexField(grid, f.A), ComplexField(grid, f.a),
                    RealField(grid, f.phi), RealField(grid, f.a.abs2()), t};
}

ArrayXcd power(const ArrayXcd& a, int sigma) {
  ArrayXcd out = a;
  for (int k = 1; k < sigma; ++k) out *= a;
  return out;
}

// Pointwise Frobenius norm of the Jacobian of v, and the divergence.
void velocity_gradients(Spectral& ops, const std::vector<ArrayXd>& v, ArrayXd& jac, ArrayXd& div) {
  const int dim = ops.grid().dim();
  jac = ArrayXd::Zero(ops.grid().size());
  div = ArrayXd::Zero(ops.grid().size());
  for (int j = 0; j < dim; ++j) {
    const auto g = ops.gradient(v[j]);
    for (int axis = 0; axis < dim; ++axis) jac += g[axis].square();
    div += g[j];
  }
  jac = jac.sqrt();
}

double spectral_tail(Spectral& ops, const std::vector<ArrayXd>& v) {
  const Grid& grid = ops.grid();
  Eigen::Array<bool, Eigen::Dynamic, 1> upper =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(grid.size(), false);
  for (int axis = 0; axis < grid.dim(); ++axis)
    upper = upper || (grid.mode_index(axis).abs() > grid.points(axis) / 6);
  double tail = 0.0;
  double total = 0.0;
  for (const auto& c : v) {
    ArrayXcd f = c.cast<Complex>();
    ops.forward(f);
    const ArrayXd e = f.abs2();
    total += e.sum();
    tail += upper.select(e, 0.0).sum();
  }
  return total > 0.0 ? tail / total : 0.0;
}

double reference_gradient(Spectral& ops, const Fields& f) {
  ArrayXd jac, div;
  velocity_gradients(ops, f.v, jac, div);
  const int dim = ops.grid().dim();
  const ArrayXd pressure = f.A.abs2();
  const auto g = ops.gradient(pressure);
  ArrayXd hess = ArrayXd::Zero(pressure.size());
  for (int j = 0; j < dim; ++j) {
    const auto h = ops.gradient(g[j]);
    for (int axis = 0; axis < dim; ++axis) hess += h[axis].square();
  }
  return std::max(jac.maxCoeff(), std::sqrt(hess.sqrt().maxCoeff()));
}

double cfl_step(const Grid& grid, const Fields& f, int sigma, double cfl) {
  double dx = grid.spacing(0);
  if (grid.dim() == 2) dx = std::min(dx, grid.spacing(1));
  const double speed = pointwise_modulus(f.v).maxCoeff() + std::sqrt(double(sigma)) * f.A.abs().maxCoeff();
  return speed > 0.0 ? cfl * dx / speed : std::numeric_limits<double>::infinity();
}

}  // namespace

LimitState initial_limit_state(const InitialData& init, int sigma) {
  require_sigma(sigma);
  validate(init);
  const Grid& grid = init.a0.grid();
  std::vector<RealField> v;
  for (auto& c : initial_velocity(init)) v.emplace_back(grid, std::move(c));
  const ArrayXcd& a = init.a0.values();
  return LimitState{std::move(v), ComplexField(grid, power(a, sigma)), init.a0, init.phi0,
                    RealField(grid, a.abs2()), 0.0};
}

LimitTrajectory evolve_limit(const InitialData& init, const LimitOptions& options) {
  options.validate();
  const Grid& grid = init.a0.grid();
  LimitRhs rhs(grid, options.sigma, options.focusing, options.dealias);
  Spectral& ops = rhs.ops();

  LimitTrajectory traj;
  traj.sigma = options.sigma;
  traj.focusing = options.focusing;
  traj.dealias = options.dealias;
  Fields s = to_fields(initial_limit_state(init, options.sigma));
  traj.reference_gradient = reference_gradient(ops, s);
  const double threshold = options.breakdown_factor * std::max(traj.reference_gradient, 1e-8);

  auto monitor = [&](double t) {
    MonitorSample m;
    m.time = t;
    ArrayXd jac, div;
    velocity_gradients(ops, s.v, jac, div);
    m.max_grad_v = jac.maxCoeff();
    m.max_div_v = div.abs().maxCoeff();
    m.total_pressure = integrate(ArrayXd(s.a.abs2().pow(options.sigma + 1)), grid);
    m.spectral_tail = spectral_tail(ops, s.v);
    traj.history.push_back(m);
    if (traj.breakdown) return;
    std::string reason;
    if (!s.finite() || !std::isfinite(m.max_grad_v))
      reason = "non-finite values";
    else if (m.max_grad_v > threshold)
      reason = "velocity gradient exceeded threshold";
    else if (m.spectral_tail > options.resolution_threshold)
      reason = "loss of spectral resolution";
    if (!reason.empty()) {
      traj.breakdown = true;
      traj.breakdown_time = t;
      traj.breakdown_reason = reason;
    }
  };

  const bool every_step = options.observation_count == 0;
  const int intervals = every_step ? 1 : options.observation_count;
  const double T = options.final_time;
  double t = 0.0;
  traj.states.push_back(to_state(grid, s, t));
  monitor(t);
  traj.dt = options.dt;

  for (int j = 1; j <= intervals; ++j) {
    const double target = T * j / intervals;
    while (t < target) {
      const double remaining = target - t;
      const double limit = cfl_step(grid, s, options.sigma, options.cfl);
      if (!(limit > 1e-12 * T))
        throw NumericalGuardError("limit_solver", "CFL violation: stable step collapsed at t = " +
                                                      std::to_string(t));
      const double hmax = std::min(options.dt, limit);
      const double count = std::ceil(remaining / hmax - 1e-9);
      const double h = count <= 1.0 ? remaining : remaining / count;

      const Fields k1 = rhs(s);
      Fields stage = s;
      stage.axpy(0.5 * h, k1);
      const Fields k2 = rhs(stage);
      stage = s;
      stage.axpy(0.5 * h, k2);
      const Fields k3 = rhs(stage);
      stage = s;
      stage.axpy(h, k3);
      const Fields k4 = rhs(stage);
      s.axpy(h / 6.0, k1);
      s.axpy(h / 3.0, k2);
      s.axpy(h / 3.0, k3);
      s.axpy(h / 6.0, k4);
      t = count <= 1.0 ? target : t + h;

      const bool was_broken = traj.breakdown;
      monitor(t);
      if (!s.finite() && !options.stop_on_breakdown)
        throw NumericalGuardError("limit_solver", "non-finite values at t = " + std::to_string(t));
      if (every_step || (traj.breakdown && !was_broken && options.stop_on_breakdown) || t >= target)
        traj.states.push_back(to_state(grid, s, t));
      if (traj.breakdown && options.stop_on_breakdown) return traj;
    }
  }
  return traj;
}

std::vector<ArrayXd> phase_gradient(const LimitState& state) {
  const Grid& grid = state.phi.grid();
  Spectral ops(grid);
  ArrayXd periodic = state.phi.values();
  std::vector<double> mean;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    mean.push_back(state.v[axis].values().mean());
    periodic -= mean.back() * grid.coordinate(axis);
  }
  auto grad = ops.gradient(periodic);
  for (int axis = 0; axis < grid.dim(); ++axis) grad[axis] += mean[axis];
  return grad;
}

std::vector<RealField> reconstruct_phase(const LimitTrajectory& trajectory) {
  std::vector<RealField> out;
  if (trajectory.states.empty()) return out;
  const Grid& grid = trajectory.states.front().phi.grid();
  Spectral ops(grid);
  const double sign = trajectory.focusing ? -1.0 : 1.0;
  auto head = [&](const LimitState& s) {
    ArrayXd h = sign * s.A.values().abs2();
    for (const auto& c : s.v) h += 0.5 * c.values().square();
    if (trajectory.dealias) ops.dealias(h);
    return h;
  };
  ArrayXd phi = trajectory.states.front().phi.values();
  ArrayXd previous = head(trajectory.states.front());
  out.emplace_back(grid, phi);
  for (std::size_t j = 1; j < trajectory.states.size(); ++j) {
    const ArrayXd current = head(trajectory.states[j]);
    const double h = trajectory.states[j].time - trajectory.states[j - 1].time;
    phi -= 0.5 * h * (previous + current);
    out.emplace_back(grid, phi);
    previous = current;
  }
  return out;
}

EulerInvariants euler_invariants(const LimitState& state, int sigma) {
  require_sigma(sigma);
  const Grid& grid = state.a.grid();
  const ArrayXd rho = state.a.values().abs2();
  const ArrayXd pressure = rho.pow(sigma + 1);
  const double t = state.time;

  EulerInvariants inv;
  inv.mass = integrate(rho, grid);
  inv.total_pressure = integrate(pressure, grid);
  ArrayXd speed2 = ArrayXd::Zero(grid.size());
  ArrayXd spread = ArrayXd::Zero(grid.size());
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const ArrayXd& v = state.v[axis].values();
    speed2 += v.square();
    const ArrayXd y = grid.coordinate(axis) - t * v;
    spread += y.square();
    inv.momentum.push_back(integrate(ArrayXd(rho * v), grid));
    inv.center_of_mass.push_back(integrate(ArrayXd(y * rho), grid));
  }
  inv.energy = integrate(ArrayXd(0.5 * rho * speed2), grid) + inv.total_pressure / (sigma + 1);
  inv.pseudo_conformal =
      integrate(ArrayXd(0.5 * spread * rho), grid) + t * t * inv.total_pressure / (sigma + 1);

  Eigen::Array<bool, Eigen::Dynamic, 1> strip =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(grid.size(), false);
  for (int axis = 0; axis < grid.dim(); ++axis)
    strip = strip || (grid.coordinate(axis).abs() >= 0.4 * grid.length(axis));
  const double total = rho.sum();
  inv.boundary_tail = total > 0.0 ? strip.select(rho, 0.0).sum() / total : 0.0;
  inv.support_warning = inv.boundary_tail > 1e-10;
  return inv;
}

BlowupReport blowup_monitor(const LimitTrajectory& trajectory) {
  BlowupReport r;
  r.breakdown_flag = trajectory.breakdown;
  r.t_estimate = trajectory.breakdown ? trajectory.breakdown_time
                                      : std::numeric_limits<double>::infinity();
  r.reason = trajectory.breakdown_reason;
  const auto& h = trajectory.history;
  double spacing = 0.0;
  for (std::size_t i = 1; i < h.size(); ++i) spacing = std::max(spacing, h[i].time - h[i - 1].time);
  r.t_uncertainty = 2.0 * spacing;
  double exponent = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i > 0)
      exponent += trajectory.sigma * std::max(h[i].max_div_v, h[i - 1].max_div_v) *
                  (h[i].time - h[i - 1].time);
    r.times.push_back(h[i].time);
    r.max_grad_v_history.push_back(h[i].max_grad_v);
    r.pressure_history.push_back(h[i].total_pressure);
    r.pressure_envelope.push_back(h.front().total_pressure * std::exp(exponent));
    const bool resolved = !trajectory.breakdown || h[i].time < trajectory.breakdown_time;
    if (resolved && h[i].total_pressure > r.pressure_envelope.back() * (1.0 + 1e-10))
      r.pressure_within_envelope = false;
  }
  return r;
}

std::vector<GrowthRow> focusing_demo(const InitialData& init, const std::vector<int>& modes,
                                     const FocusingOptions& options) {
  require_sigma(options.sigma);
  const Grid& grid = init.a0.grid();
  LimitOptions lo;
  lo.sigma = options.sigma;
  lo.final_time = options.final_time;
  lo.dt = options.dt;
  lo.observation_count = 1;
  lo.focusing = options.focusing;
  lo.stop_on_breakdown = false;

  const LimitTrajectory background = evolve_limit(init, lo);
  const double weight = 4.0 / options.sigma;
  auto norm = [&](const LimitState& s, const LimitState& b) {
    double acc = weight * std::pow(lp_norm(ArrayXcd(s.A.values() - b.A.values()), grid, 2.0), 2);
    for (int axis = 0; axis < grid.dim(); ++axis)
      acc += std::pow(lp_norm(ArrayXd(s.v[axis].values() - b.v[axis].values()), grid, 2.0), 2);
    return std::sqrt(acc);
  };
  const double peak = std::pow(init.a0.values().abs().maxCoeff(), options.sigma);

  std::vector<GrowthRow> rows;
  for (int k : modes) {
    GrowthRow row;
    row.mode = k;
    row.wavenumber = 2.0 * std::numbers::pi * k / grid.length(0);
    InitialData perturbed = init;
    const ArrayXd bump = options.perturbation_amplitude * (row.wavenumber * grid.coordinate(0)).cos();
    perturbed.a0 = ComplexField(grid, init.a0.values() + bump.cast<Complex>());
    const LimitTrajectory run = evolve_limit(perturbed, lo);
    const double n0 = norm(run.states.front(), background.states.front());
    const double n1 = norm(run.states.back(), background.states.back());
    row.growth_factor = n0 > 0.0 ? n1 / n0 : 0.0;
    const double r2 = row.growth_factor * row.growth_factor;
    row.growth_rate = r2 > 1.0 ? std::acosh(r2) / (2.0 * options.final_time) : 0.0;
    row.linear_rate = options.focusing ? std::sqrt(double(options.sigma)) * peak * row.wavenumber : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wkb
