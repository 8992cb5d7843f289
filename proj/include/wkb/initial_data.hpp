#pragma once

#include "wkb/grid.hpp"

#include <string>
#include <vector>

namespace wkb {

// WKB data a0^eps = a0 + eps a1 with real phase phi0.
struct InitialData {
  ComplexField a0;
  ComplexField a1;
  RealField phi0;
  // Analytic gradient of phi0 when phi0 is not periodic (plane waves);
  // empty means "differentiate phi0 spectrally".
  std::vector<RealField> grad_phi0;
  std::string preset;
};

struct PresetParams {
  std::string a0 = "gaussian";  // gaussian | compact_bump | plane_wave | constant
  std::string a1 = "zero";      // zero | gaussian | imag_gaussian
  std::string phi0 = "zero";    // zero | cosine | compact_bump | plane_wave
  double amplitude = 1.0;
  double width = 1.0;        // gaussian e^{-(x/w)^2}
  double radius = 1.0;       // compact bump support radius
  double a0_tilt = 0.0;      // a0 *= (1 + i tilt x/w): genuinely complex amplitude
  double a1_scale = 1.0;
  double phase_scale = 0.0;  // strength of the cosine / bump phase
  double wavenumber = 0.0;   // requested plane-wave k, snapped to the lattice

  friend bool operator==(const PresetParams&, const PresetParams&) = default;
};

// exp(1 - 1/(1 - s^2)) for |s| < 1, else 0: C-infinity, compact support, peak 1.
double compact_bump(double s);

// Nearest k with k/eps on the torus lattice 2 pi Z / L.
double snap_wavenumber(double k, double epsilon, double length);

InitialData make_initial_data(const Grid& grid, const PresetParams& params, double epsilon);

// grad phi0: the stored analytic gradient when present, else spectral.
std::vector<ArrayXd> initial_velocity(const InitialData& data);

void validate(const InitialData& data);

}  // namespace wkb
