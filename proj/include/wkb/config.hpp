#pragma once

// INI-style run configuration.
//
//   [grid]     dim, N, L
//   [physics]  sigma, epsilon | epsilon_list
//   [time]     T, dt0, dt_exponent, observation_count, corrector_dt, horizon, self_check
//   [initial]  a0, a1, phi0, amplitude, width, radius, a0_tilt, a1_scale, phase_scale,
//              wavenumber, perturbation_wavenumbers, perturbation_amplitude
//   [output]   directory, formats
//
// Unknown sections or keys are rejected; every error names its key.

#include "wkb/initial_data.hpp"
#include "wkb/nls.hpp"
#include "wkb/sweep.hpp"

#include <string>
#include <vector>

namespace wkb {

struct RunConfig {
  int dim = 1;
  int points = 512;
  double length = 16.0;

  int sigma = 2;
  // A single epsilon is stored as a one-element list.
  std::vector<double> epsilons{0.125};
  bool epsilon_list_given = false;

  double final_time = 0.25;
  double dt0 = 0.01;
  double dt_exponent = 1.5;
  int observation_count = 20;
  double corrector_dt = 2.5e-3;
  // Time horizon of breakdown runs.
  double horizon = 20.0;
  SelfCheckPolicy self_check = SelfCheckPolicy::report;

  PresetParams preset;
  std::vector<int> perturbation_wavenumbers{4, 8, 16, 32};
  double perturbation_amplitude = 1e-8;

  std::string output_directory = "wkbench-out";
  std::vector<std::string> formats{"csv", "json"};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  Grid grid() const;
  double epsilon() const { return epsilons.front(); }
};

// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical INI text with every key spelled out; parse_config inverts it.
std::string serialize(const RunConfig& config);

SweepPlan make_sweep_plan(const RunConfig& config);

const char* to_string(SelfCheckPolicy policy);

}  // namespace wkb
