#include "wkb/corrector.hpp"

#include "wkb/algebra.hpp"
#include "wkb/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace wkb {

double corrector_step(double final_time, const CorrectorOptions& options) {
  if (!(options.dt > 0.0)) throw std::invalid_argument("corrector: dt must be positive");
  if (options.observation_count < 0)
    throw std::invalid_argument("corrector: observation_count must be >= 0");
  const double interval =
      options.observation_count == 0 ? final_time : final_time / options.observation_count;
  const double count = std::max(1.0, std::ceil(interval / options.dt - 1e-9));
  return interval / count;
}

LimitOptions matched_limit_options(LimitOptions base, const CorrectorOptions& corrector) {
  base.dt = 0.5 * corrector_step(base.final_time, corrector);
  base.observation_count = 0;
  return base;
}

namespace {

// Coefficient fields of the corrector system at one limit time.
struct Coefficients {
  std::vector<ArrayXd> v;
  ArrayXd lap_phi;
  ArrayXcd a;
  std::vector<ArrayXcd> grad_a;
  ArrayXcd lap_a;
  ArrayXd weight;  // 2 sigma |a|^{2 sigma - 2}

  static Coefficients blend(const Coefficients& x, const Coefficients& y, double w) {
    Coefficients c;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      c.v.push_back((1.0 - w) * x.v[i] + w * y.v[i]);
      c.grad_a.push_back((1.0 - w) * x.grad_a[i] + w * y.grad_a[i]);
    }
    c.lap_phi = (1.0 - w) * x.lap_phi + w * y.lap_phi;
    c.a = (1.0 - w) * x.a + w * y.a;
    c.lap_a = (1.0 - w) * x.lap_a + w * y.lap_a;
    c.weight = (1.0 - w) * x.weight + w * y.weight;
    return c;
  }
};

class CoefficientCache {
 public:
  CoefficientCache(const LimitTrajectory& limit, double tolerance)
      : limit_(limit), ops_(limit.states.front().a.grid()), tolerance_(tolerance),
        cache_(limit.states.size()) {}

  Coefficients at(double t) {
    const auto& states = limit_.states;
    const double scale = std::max(1.0, std::abs(states.back().time));
    const double tol = tolerance_ * scale;
    if (t < states.front().time - tol || t > states.back().time + tol)
      throw std::invalid_argument("corrector: time " + std::to_string(t) +
                                  " lies outside the limit trajectory");
    auto it = std::lower_bound(states.begin(), states.end(), t,
                               [](const LimitState& s, double x) { return s.time < x; });
    std::size_t hi = std::min<std::size_t>(it - states.begin(), states.size() - 1);
    if (std::abs(states[hi].time - t) <= tol) return get(hi);
    if (hi > 0 && std::abs(states[hi - 1].time - t) <= tol) return get(hi - 1);
    const std::size_t lo = hi - 1;
    const double w = (t - states[lo].time) / (states[hi].time - states[lo].time);
    return Coefficients::blend(get(lo), get(hi), w);
  }

 private:
  const Coefficients& get(std::size_t i) {
    if (!cache_[i]) {
      const LimitState& s = limit_.states[i];
      Coefficients c;
      for (const auto& comp : s.v) c.v.push_back(comp.values());
      c.lap_phi = ops_.divergence(c.v);
      c.a = s.a.values();
      c.grad_a = ops_.gradient(c.a);
      c.lap_a = ops_.laplacian(c.a);
      const int sigma = limit_.sigma;
      c.weight = 2.0 * sigma * c.a.abs2().pow(sigma - 1);
      cache_[i] = std::move(c);
    }
    return *cache_[i];
  }

  const LimitTrajectory& limit_;
  Spectral ops_;
  double tolerance_;
  std::vector<std::optional<Coefficients>> cache_;
};

struct Unknowns {
  ArrayXd phi1;
  ArrayXcd a1;

  void axpy(double h, const Unknowns& d) {
    phi1 += h * d.phi1;
    a1 += h * d.a1;
  }
};

Unknowns rhs(Spectral& ops, const Unknowns& u, const Coefficients& c, bool dealias) {
  const int dim = ops.grid().dim();
  const Complex i(0.0, 1.0);
  ArrayXcd spectrum = u.phi1.cast<Complex>();
  ops.forward(spectrum);
  ArrayXcd lap1 = -ops.wavenumber_squared() * spectrum;
  ops.inverse(lap1);
  const auto grad_a1 = ops.gradient(u.a1);

  Unknowns d;
  d.phi1 = -c.weight * (c.a.conjugate() * u.a1).real();
  d.a1 = -0.5 * u.a1 * c.lap_phi - 0.5 * c.a * lap1.real() + 0.5 * i * c.lap_a;
  for (int axis = 0; axis < dim; ++axis) {
    ArrayXcd g1 = i * ops.odd_wavenumber(axis) * spectrum;
    ops.inverse(g1);
    d.phi1 -= c.v[axis] * g1.real();
    d.a1 -= c.v[axis] * grad_a1[axis] + g1.real() * c.grad_a[axis];
  }
  if (dealias) {
    ops.dealias(d.phi1);
    ops.dealias(d.a1);
  }
  return d;
}

}  // namespace

CorrectorTrajectory evolve_corrector(const LimitTrajectory& limit, const ComplexField& a1,
                                     const CorrectorOptions& options) {
  if (limit.states.empty()) throw std::invalid_argument("corrector: empty limit trajectory");
  const Grid& grid = limit.states.front().a.grid();
  require_same_grid(grid, a1.grid(), "corrector a1");
  const double t0 = limit.states.front().time;
  const double T = limit.states.back().time - t0;
  if (!(T > 0.0)) throw std::invalid_argument("corrector: limit trajectory spans no time");

  const double h = corrector_step(T, options);
  const int intervals = options.observation_count == 0 ? 1 : options.observation_count;
  const auto per_interval = static_cast<long>(std::llround(T / intervals / h));

  CoefficientCache coefficients(limit, options.time_tolerance);
  Spectral ops(grid);
  Unknowns u{ArrayXd::Zero(grid.size()), to_physical(a1).values()};

  CorrectorTrajectory traj;
  traj.dt = h;
  auto store = [&](double t) {
    traj.states.push_back(
        CorrectorState{RealField(grid, u.phi1), ComplexField(grid, u.a1), t});
  };
  store(t0);
  long step = 0;
  for (int j = 1; j <= intervals; ++j) {
    for (long s = 0; s < per_interval; ++s, ++step) {
      const double t = t0 + step * h;
      const Coefficients c0 = coefficients.at(t);
      const Coefficients cm = coefficients.at(t + 0.5 * h);
      const Coefficients c1 = coefficients.at(t + h);
      const Unknowns k1 = rhs(ops, u, c0, options.dealias);
      Unknowns stage = u;
      stage.axpy(0.5 * h, k1);
      const Unknowns k2 = rhs(ops, stage, cm, options.dealias);
      stage = u;
      stage.axpy(0.5 * h, k2);
      const Unknowns k3 = rhs(ops, stage, cm, options.dealias);
      stage = u;
      stage.axpy(h, k3);
      const Unknowns k4 = rhs(ops, stage, c1, options.dealias);
      u.axpy(h / 6.0, k1);
      u.axpy(h / 3.0, k2);
      u.axpy(h / 3.0, k3);
      u.axpy(h / 6.0, k4);
      if (!u.phi1.allFinite() || !u.a1.allFinite())
        throw NumericalGuardError("corrector_solver",
                                  "non-finite values at t = " + std::to_string(t + h));
      if (options.observation_count == 0 && s + 1 < per_interval) store(t + h);
    }
    store(j == intervals ? t0 + T : t0 + step * h);
  }
  return traj;
}

ComplexField tilde_amplitude(const LimitState& limit, const CorrectorState& corrector) {
  const double scale = std::max(1.0, std::abs(limit.time));
  if (std::abs(limit.time - corrector.time) > 1e-10 * scale)
    throw std::invalid_argument("tilde_amplitude: limit time " + std::to_string(limit.time) +
                                " differs from corrector time " + std::to_string(corrector.time));
  require_same_grid(limit.a.grid(), corrector.phi1.grid(), "tilde_amplitude");
  const ArrayXcd phase = (Complex(0.0, 1.0) * corrector.phi1.values().cast<Complex>()).exp();
  return ComplexField(limit.a.grid(), limit.a.values() * phase);
}

}  // namespace wkb
