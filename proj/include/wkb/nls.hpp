#pragma once

// Time-splitting spectral integrator for the semiclassical defocusing NLS
//
//   i eps u_t + (eps^2/2) Lap u = |u|^{2 sigma} u,   u(0) = a0^eps e^{i phi0/eps}.
//
// Strang splitting: half kinetic step (exact in Fourier space), full
// nonlinear step (exact pointwise phase rotation, |u| is invariant under it),
// half kinetic step. Adjacent half steps are fused.

#include "wkb/grid.hpp"
#include "wkb/initial_data.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wkb {

enum class SelfCheckPolicy { off, report, enforce };

struct NlsConfig {
  double epsilon = 0.125;
  int sigma = 2;
  double final_time = 0.25;
  double dt0 = 0.01;
  double dt_exponent = 1.5;
  int observation_count = 20;
  SelfCheckPolicy self_check = SelfCheckPolicy::enforce;
  // The halving-dt check fails when ||u_dt(T) - u_{dt/2}(T)|| > tolerance * eps * ||u(T)||.
  double self_check_tolerance = 0.05;
  std::optional<double> dt_override;

  // dt0 * eps^p unless overridden.
  double target_dt() const;
  void validate() const;
};

struct NlsState {
  ComplexField u;
  double time = 0.0;
};

struct SelfCheckReport {
  bool performed = false;
  bool passed = true;
  double difference = 0.0;
  double threshold = 0.0;
};

struct NlsRun {
  // States at t_j = j T / observation_count, j = 0..observation_count.
  std::vector<NlsState> snapshots;
  double dt = 0.0;
  std::int64_t steps = 0;
  SelfCheckReport self_check;
};

using NlsObserver = std::function<void(const NlsState&)>;

// u(0) = (a0 + eps a1) e^{i phi0 / eps}.
NlsState build_initial_data(const InitialData& data, double epsilon);

// Fixed-step Strang integrator. Owns its FFT plans; one instance per run.
class NlsStepper {
 public:
  NlsStepper(const Grid& grid, double epsilon, int sigma, double dt);

  // Advances `u` (physical samples) by `steps` Strang steps.
  void advance(ArrayXcd& u, std::int64_t steps);
  double dt() const noexcept { return dt_; }

 private:
  void nonlinear(ArrayXcd& u) const;

  Spectral ops_;
  double epsilon_;
  int sigma_;
  double dt_;
  ArrayXcd half_kinetic_;
  ArrayXcd full_kinetic_;
};

// Runs to config.final_time, recording every observation time and invoking
// the observers on each recorded snapshot. Throws NumericalGuardError on
// non-finite samples, or on a failed self-check under the enforce policy.
NlsRun evolve_nls(const NlsState& initial, const NlsConfig& config,
                  std::span<const NlsObserver> observers = {});

struct NlsInvariants {
  double mass = 0.0;  // ||u||_{L^2}
  double energy = 0.0;
  std::vector<double> momentum;
  double pseudo_conformal = 0.0;
  std::vector<double> mass_center;  // Re int conj(u) (x + i eps t grad) u
  double potential_term = 0.0;      // ||u||_{L^{2 sigma+2}}^{2 sigma+2}
  // Fraction of |u|^2 in the outer 10% strip of each axis.
  double boundary_tail = 0.0;
  bool support_warning = false;
};

inline constexpr double support_tail_threshold = 1e-10;

NlsInvariants nls_invariants(const NlsState& state, double epsilon, int sigma);

}  // namespace wkb
