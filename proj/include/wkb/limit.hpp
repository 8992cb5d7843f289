#pragma once

// Limit (eikonal + transport) system in the unknowns v = grad phi, A = a^sigma:
//
//   v_t + v.grad v + grad |A|^2 = 0
//   A_t + v.grad A + (sigma/2) A div v = 0
//   a_t + v.grad a + (1/2) a div v = 0
//   phi_t + |v|^2/2 + |A|^2 = 0
//
// The velocity equation is integrated in gradient form, v_t = -grad(|v|^2/2 + |A|^2),
// which equals the advective form for curl-free v and keeps grad phi = v to
// roundoff when phi rides along in the same RK4 stages. The density is
// rho = |a|^2 (Euler pressure rho^{sigma+1} up to constants).

#include "wkb/grid.hpp"
#include "wkb/initial_data.hpp"

#include <string>
#include <vector>

namespace wkb {

struct LimitState {
  std::vector<RealField> v;
  ComplexField A;
  ComplexField a;
  RealField phi;
  RealField rho;
  double time = 0.0;
};

struct LimitOptions {
  int sigma = 2;
  double final_time = 0.25;
  // Largest step; shrunk when the CFL bound is tighter.
  double dt = 1e-3;
  // Stored states at j T / observation_count. 0 stores every solver step.
  int observation_count = 20;
  double cfl = 0.5;
  bool dealias = true;
  // Flips the pressure sign (ill-posed focusing system).
  bool focusing = false;
  // Stop at the first breakdown signal instead of integrating to final_time.
  bool stop_on_breakdown = true;
  // max|grad v| above this multiple of the reference gradient counts as breakdown.
  double breakdown_factor = 10.0;
  // Relative spectral energy of v in the upper half of the retained band.
  double resolution_threshold = 1e-4;

  void validate() const;
};

struct MonitorSample {
  double time = 0.0;
  double max_grad_v = 0.0;
  double max_div_v = 0.0;
  double total_pressure = 0.0;
  double spectral_tail = 0.0;
};

struct LimitTrajectory {
  std::vector<LimitState> states;
  // One sample per solver step (including t = 0).
  std::vector<MonitorSample> history;
  // max(max|grad v(0)|, sqrt(max|Hess |A0|^2|)): a gradient scale set by the data.
  double reference_gradient = 0.0;
  bool breakdown = false;
  double breakdown_time = 0.0;
  std::string breakdown_reason;
  double dt = 0.0;
  int sigma = 2;
  bool focusing = false;
  bool dealias = true;
};

// Throws NumericalGuardError on a CFL collapse or, when stop_on_breakdown is
// false, on non-finite values.
LimitTrajectory evolve_limit(const InitialData& init, const LimitOptions& options);

// Limit state with A = a0^sigma, rho = |a0|^2, v = grad phi0 at time 0.
LimitState initial_limit_state(const InitialData& init, int sigma);

// grad phi, allowing phi = (mean velocity).x + periodic.
std::vector<ArrayXd> phase_gradient(const LimitState& state);

// phi(t_j) = phi0 - int_0^{t_j} (|v|^2/2 + |A|^2) by the trapezoidal rule over
// the stored states (store every step for solver-step accuracy).
std::vector<RealField> reconstruct_phase(const LimitTrajectory& trajectory);

struct EulerInvariants {
  double mass = 0.0;
  double energy = 0.0;
  std::vector<double> momentum;
  double pseudo_conformal = 0.0;
  std::vector<double> center_of_mass;  // int (x - t v) rho
  double total_pressure = 0.0;         // int rho^{sigma+1}
  double boundary_tail = 0.0;
  bool support_warning = false;
};

EulerInvariants euler_invariants(const LimitState& state, int sigma);

struct BlowupReport {
  bool breakdown_flag = false;
  double t_estimate = 0.0;
  // +- 2 dt_output: the heuristic threshold is only located to the sampling.
  double t_uncertainty = 0.0;
  std::string reason;
  std::vector<double> times;
  std::vector<double> max_grad_v_history;
  std::vector<double> pressure_history;
  // P(0) exp(sigma int_0^t ||div v||_inf): total pressure never exceeds it.
  std::vector<double> pressure_envelope;
  bool pressure_within_envelope = true;
};

BlowupReport blowup_monitor(const LimitTrajectory& trajectory);

struct FocusingOptions {
  int sigma = 1;
  double final_time = 0.25;
  double dt = 1e-3;
  double perturbation_amplitude = 1e-8;
  bool focusing = true;
};

struct GrowthRow {
  int mode = 0;              // integer lattice index k
  double wavenumber = 0.0;   // 2 pi k / L
  double growth_factor = 0.0;  // N(T)/N(0) in the symmetrizer norm
  // acosh((N(T)/N(0))^2) / (2T): the exponent of a single focusing mode
  // (for which N(t) = N(0) sqrt(cosh(2 gamma t))); 0 when N does not grow.
  double growth_rate = 0.0;
  double linear_rate = 0.0;  // sqrt(sigma) max|a0|^sigma xi (focusing); 0 otherwise
};

// Perturbs a0 by amplitude * cos(2 pi k x / L) for each mode k and measures the
// growth of the perturbation in sqrt(||dv||^2 + (4/sigma)||dA||^2), the norm
// the linearized defocusing system conserves.
std::vector<GrowthRow> focusing_demo(const InitialData& init, const std::vector<int>& modes,
                                     const FocusingOptions& options);

}  // namespace wkb
