#pragma once

// Filtered amplitude a_eps = u e^{-i phi/eps} and the quantities built on it:
// beta = B(|a_eps|^2, |a|^2), q = beta/eps, g = G(|a_eps|^2, |a|^2),
// psi = grad a_eps, the transport residual for beta, the modulated energy
// int |a_eps|^2 + |psi|^2 + |q|^2, and density/current convergence metrics.

#include "wkb/grid.hpp"
#include "wkb/limit.hpp"
#include "wkb/nls.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace wkb {

struct DiagnosticsRecord {
  double time = 0.0;
  double epsilon = 0.0;
  int sigma = 1;
  ComplexField a_eps;
  std::vector<ComplexField> psi_eps;
  RealField beta_eps;
  RealField q_eps;
  RealField g_eps;
  RealField limit_density;                // |a|^2
  std::vector<RealField> current_density;  // Im(eps conj(u) grad u)
  RealField position_density;             // |u|^2
  // "a_eps:H<s>" and "q_eps:H<s>" for s = 0..max_order.
  std::map<std::string, double> sobolev_table;
  double modulated_energy = 0.0;
};

ComplexField modulate(const NlsState& u, const RealField& phi, double epsilon);
// Inverse of modulate: a_eps e^{i phi/eps}.
ComplexField demodulate(const ComplexField& a_eps, const RealField& phi, double epsilon);

struct QG {
  RealField q;
  RealField g;
};

QG q_g_fields(const ComplexField& a_eps, const ComplexField& a, double epsilon, int sigma);

// Throws std::invalid_argument when the NLS and limit times differ.
DiagnosticsRecord make_record(const NlsState& u, const LimitState& limit, double epsilon,
                              int sigma, int max_order = 2);

double modulated_energy(const DiagnosticsRecord& record);

// Pointwise residual of
//   beta_t + eps g div Im(conj(a_eps) grad a_eps) + v.grad beta + ((sigma+1)/2) beta div v
// at the middle of three equally spaced records, beta_t by central difference.
RealField transport_residual_field(std::span<const DiagnosticsRecord> snapshots,
                                   const LimitState& middle, double dt);

// L^2 norm of transport_residual_field.
double residual_transport(std::span<const DiagnosticsRecord> snapshots, const LimitState& middle,
                          double dt);

// Density balance defects for the same three snapshots (central differences):
//   r1 = rho_t + div(rho v),  r3 = rho_eps_t + div(eps Im(conj(a_eps) grad a_eps) + rho_eps v).
struct DensityDefects {
  RealField r1;
  RealField r3;
};

DensityDefects density_defects(std::span<const DiagnosticsRecord> snapshots,
                               const LimitState& middle, double dt);

// sigma ||div v||_inf + 2 ||grad v||_inf + ||grad div v||_inf + 1 at one limit state.
double envelope_rate(const LimitState& limit, int sigma);

struct DensityMetrics {
  double pos_err_lsp1 = 0.0;      // || |a_eps|^2 - |a|^2 ||_{L^{sigma+1}}
  double cur_err_weighted = 0.0;  // || (|a_eps|^2 - |a|^2) grad phi ||_{L^{sigma+1}}
  double cur_err_l1 = 0.0;        // || Im(eps conj(a_eps) grad a_eps) ||_{L^1}
};

DensityMetrics density_metrics(const DiagnosticsRecord& record, const LimitState& limit, int sigma,
                               double epsilon);

}  // namespace wkb
