#include "wkb/diagnostics.hpp"

#include "wkb/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace wkb {

namespace {

void require_same_time(double a, double b, const char* what) {
  if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
    throw std::invalid_argument(std::string(what) + ": time mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
}

ArrayXcd phase_factor(const RealField& phi, double epsilon, double sign) {
  return (Complex(0.0, sign / epsilon) * phi.values().cast<Complex>()).exp();
}

// Im(conj(f) grad f), one array per axis.
std::vector<ArrayXd> flux(Spectral& ops, const ArrayXcd& f) {
  std::vector<ArrayXd> out;
  for (auto& g : ops.gradient(f)) out.push_back((f.conjugate() * g).imag());
  return out;
}

void require_spacing(std::span<const DiagnosticsRecord> s, double dt) {
  if (s.size() != 3) throw std::invalid_argument("transport residual needs three snapshots");
  const double h1 = s[1].time - s[0].time;
  const double h2 = s[2].time - s[1].time;
  const double tol = 1e-9 * std::max(1.0, std::abs(dt));
  if (!(dt > 0.0) || std::abs(h1 - dt) > tol || std::abs(h2 - dt) > tol)
    throw std::invalid_argument("transport residual: snapshots must be equally spaced by dt");
  require_same_grid(s[0].a_eps.grid(), s[1].a_eps.grid(), "transport residual");
  require_same_grid(s[1].a_eps.grid(), s[2].a_eps.grid(), "transport residual");
}

}  // namespace

ComplexField modulate(const NlsState& u, const RealField& phi, double epsilon) {
  require_same_grid(u.u.grid(), phi.grid(), "modulate");
  return ComplexField(phi.grid(), to_physical(u.u).values() * phase_factor(phi, epsilon, -1.0));
}

ComplexField demodulate(const ComplexField& a_eps, const RealField& phi, double epsilon) {
  require_same_grid(a_eps.grid(), phi.grid(), "demodulate");
  return ComplexField(phi.grid(), to_physical(a_eps).values() * phase_factor(phi, epsilon, 1.0));
}

QG q_g_fields(const ComplexField& a_eps, const ComplexField& a, double epsilon, int sigma) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("q_g_fields: epsilon must be positive");
  require_same_grid(a_eps.grid(), a.grid(), "q_g_fields");
  const ArrayXd r1 = to_physical(a_eps).values().abs2();
  const ArrayXd r2 = to_physical(a).values().abs2();
  return QG{RealField(a.grid(), b_sigma(r1, r2, sigma) / epsilon),
            RealField(a.grid(), g_sigma(r1, r2, sigma))};
}

DiagnosticsRecord make_record(const NlsState& u, const LimitState& limit, double epsilon,
                              int sigma, int max_order) {
  require_same_time(u.time, limit.time, "make_record");
  const Grid& grid = limit.a.grid();
  Spectral ops(grid);
  const ComplexField a_eps = modulate(u, limit.phi, epsilon);
  const QG qg = q_g_fields(a_eps, limit.a, epsilon, sigma);

  DiagnosticsRecord r{u.time,
                      epsilon,
                      sigma,
                      a_eps,
                      {},
                      RealField(grid, epsilon * qg.q.values()),
                      qg.q,
                      qg.g,
                      RealField(grid, limit.a.values().abs2()),
                      {},
                      RealField(grid, to_physical(u.u).values().abs2()),
                      {},
                      0.0};
  for (auto& g : ops.gradient(a_eps.values())) r.psi_eps.emplace_back(grid, std::move(g));
  for (auto& j : flux(ops, to_physical(u.u).values())) r.current_density.emplace_back(grid, epsilon * j);
  for (int s = 0; s <= max_order; ++s) {
    r.sobolev_table["a_eps:H" + std::to_string(s)] = sobolev_norm(a_eps, s);
    r.sobolev_table["q_eps:H" + std::to_string(s)] = sobolev_norm(qg.q, s);
  }
  r.modulated_energy = modulated_energy(r);
  return r;
}

double modulated_energy(const DiagnosticsRecord& record) {
  const Grid& grid = record.a_eps.grid();
  double e = std::pow(lp_norm(record.a_eps.values(), grid, 2.0), 2) +
             std::pow(lp_norm(record.q_eps.values(), grid, 2.0), 2);
  for (const auto& p : record.psi_eps) e += std::pow(lp_norm(p.values(), grid, 2.0), 2);
  return e;
}

RealField transport_residual_field(std::span<const DiagnosticsRecord> s, const LimitState& middle,
                                   double dt) {
  require_spacing(s, dt);
  require_same_time(s[1].time, middle.time, "transport residual");
  const Grid& grid = s[1].a_eps.grid();
  Spectral ops(grid);
  const DiagnosticsRecord& m = s[1];
  const double eps = m.epsilon;
  const int sigma = m.sigma;
  std::vector<ArrayXd> v;
  for (const auto& c : middle.v) v.push_back(c.values());

  ArrayXd res = (s[2].beta_eps.values() - s[0].beta_eps.values()) / (2.0 * dt);
  res += eps * m.g_eps.values() * ops.divergence(flux(ops, m.a_eps.values()));
  const auto grad_beta = ops.gradient(m.beta_eps.values());
  for (int axis = 0; axis < grid.dim(); ++axis) res += v[axis] * grad_beta[axis];
  res += 0.5 * (sigma + 1) * m.beta_eps.values() * ops.divergence(v);
  return RealField(grid, std::move(res));
}

double residual_transport(std::span<const DiagnosticsRecord> snapshots, const LimitState& middle,
                          double dt) {
  return lebesgue_norm(transport_residual_field(snapshots, middle, dt), 2.0);
}

DensityDefects density_defects(std::span<const DiagnosticsRecord> s, const LimitState& middle,
                               double dt) {
  require_spacing(s, dt);
  require_same_time(s[1].time, middle.time, "density defects");
  const Grid& grid = s[1].a_eps.grid();
  Spectral ops(grid);
  const double eps = s[1].epsilon;
  const ArrayXd& rho = s[1].limit_density.values();
  const ArrayXd rho_eps = s[1].a_eps.values().abs2();
  const auto j = flux(ops, s[1].a_eps.values());

  std::vector<ArrayXd> limit_flux, eps_flux;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const ArrayXd& v = middle.v[axis].values();
    limit_flux.push_back(rho * v);
    eps_flux.push_back(eps * j[axis] + rho_eps * v);
  }
  ArrayXd r1 = (s[2].limit_density.values() - s[0].limit_density.values()) / (2.0 * dt) +
               ops.divergence(limit_flux);
  ArrayXd r3 = (s[2].a_eps.values().abs2() - s[0].a_eps.values().abs2()) / (2.0 * dt) +
               ops.divergence(eps_flux);
  return DensityDefects{RealField(grid, std::move(r1)), RealField(grid, std::move(r3))};
}

double envelope_rate(const LimitState& limit, int sigma) {
  const Grid& grid = limit.a.grid();
  Spectral ops(grid);
  std::vector<ArrayXd> v;
  for (const auto& c : limit.v) v.push_back(c.values());
  const ArrayXd div = ops.divergence(v);
  ArrayXd jac = ArrayXd::Zero(grid.size());
  for (const auto& c : v)
    for (const auto& g : ops.gradient(c)) jac += g.square();
  const ArrayXd grad_div = pointwise_modulus(ops.gradient(div));
  return sigma * div.abs().maxCoeff() + 2.0 * jac.sqrt().maxCoeff() + grad_div.maxCoeff() + 1.0;
}

DensityMetrics density_metrics(const DiagnosticsRecord& record, const LimitState& limit, int sigma,
                               double epsilon) {
  require_same_time(record.time, limit.time, "density_metrics");
  const Grid& grid = record.a_eps.grid();
  Spectral ops(grid);
  const double p = sigma + 1.0;
  const ArrayXd diff = record.a_eps.values().abs2() - limit.a.values().abs2();

  DensityMetrics m;
  m.pos_err_lsp1 = lp_norm(diff, grid, p);
  std::vector<ArrayXd> weighted;
  for (auto& g : phase_gradient(limit)) weighted.push_back(diff * g);
  m.cur_err_weighted = lp_norm(pointwise_modulus(weighted), grid, p);
  std::vector<ArrayXd> j;
  for (auto& c : flux(ops, record.a_eps.values())) j.push_back(epsilon * c);
  m.cur_err_l1 = lp_norm(pointwise_modulus(j), grid, 1.0);
  return m;
}

}  // namespace wkb
