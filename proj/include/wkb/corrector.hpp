#pragma once

// First corrector (phi1, a1) on top of a limit trajectory (phi, a):
//
//   phi1_t + grad phi.grad phi1 + 2 sigma Re(conj(a) a1) |a|^{2 sigma - 2} = 0
//   a1_t + grad phi.grad a1 + grad phi1.grad a + a1 Lap phi / 2 + a Lap phi1 / 2 = (i/2) Lap a
//
// with phi1(0) = 0, a1(0) = a1. The corrected amplitude is a~ = a e^{i phi1}.

#include "wkb/grid.hpp"
#include "wkb/limit.hpp"

#include <vector>

namespace wkb {

struct CorrectorState {
  RealField phi1;
  ComplexField a1f;
  double time = 0.0;
};

struct CorrectorOptions {
  double dt = 2e-3;
  // Stored states at j T / observation_count; 0 stores every step.
  int observation_count = 20;
  bool dealias = true;
  // Largest allowed distance from a requested time to the nearest limit
  // state when that state is used without interpolation.
  double time_tolerance = 1e-10;
};

struct CorrectorTrajectory {
  std::vector<CorrectorState> states;
  double dt = 0.0;
};

// RK4 with stage coefficients read from the limit trajectory; a stage time
// between stored limit states is served by linear interpolation. The window
// is [first, last] limit time. Throws std::invalid_argument when a stage
// falls outside the trajectory and NumericalGuardError on non-finite values.
CorrectorTrajectory evolve_corrector(const LimitTrajectory& limit, const ComplexField& a1,
                                     const CorrectorOptions& options);

// Step actually taken by a corrector run over [0, final_time]: the largest
// step <= options.dt that divides every observation interval.
double corrector_step(double final_time, const CorrectorOptions& options);

// Limit options storing every half step of the matching corrector run, so the
// RK4 stages never need interpolation.
LimitOptions matched_limit_options(LimitOptions base, const CorrectorOptions& corrector);

// a e^{i phi1}. Throws when the two states are at different times.
ComplexField tilde_amplitude(const LimitState& limit, const CorrectorState& corrector);

}  // namespace wkb
