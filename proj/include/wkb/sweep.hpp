#pragma once

// epsilon sweeps: one NLS run per epsilon against one shared limit run and one
// shared corrector run, WKB error curves, uniformity tables and rate fits.

#include "wkb/grid.hpp"
#include "wkb/initial_data.hpp"
#include "wkb/nls.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace wkb {

struct SweepPlan {
  std::vector<double> epsilons{0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  int sigma = 2;
  Grid grid = Grid::line(512, 16.0);
  double final_time = 0.25;
  int observation_count = 20;
  double dt0 = 0.01;
  double dt_exponent = 1.5;
  // Corrector step; the limit run stores every half step of it.
  double corrector_dt = 2.5e-3;
  PresetParams preset;
  SelfCheckPolicy self_check = SelfCheckPolicy::report;
  // Rows evaluated concurrently; results never depend on it.
  int workers = 1;
  // Free-form description echoed into reports (the effective config).
  std::string config_echo;

  void validate() const;
};

// Sobolev index of the uniform bounds: sigma for sigma >= 3, 2 for
// sigma = 2 in one dimension, 1 otherwise.
int uniform_order(int sigma, int dim);

// Exponent of the pointwise WKB norm: infinity in 1-D, 6 in 2-D.
double wkb_sup_exponent(int dim);

struct SweepRow {
  double epsilon = 0.0;
  double dt = 0.0;
  long long steps = 0;
  SelfCheckReport self_check;
  bool flagged = false;
  std::string flag_reason;

  // sup over observation times
  double err_one_l2 = 0.0;   // || u - a e^{i phi/eps} ||_{L^2}
  double err_one_sup = 0.0;  // same in L^p, p = wkb_sup_exponent
  double err_two_l2 = 0.0;   // || u - a~ e^{i phi/eps} ||_{L^2}
  double err_two_sup = 0.0;
  double a_eps_hk = 0.0;     // max_t || a_eps ||_{H^k}
  double q_eps_hkm1 = 0.0;   // max_t || q_eps ||_{H^{k-1}}
  double q0_hsm1 = 0.0;      // || q_eps(0) ||_{H^{sigma-1}}
  double pos_err = 0.0;      // max_t || |a_eps|^2 - |a|^2 ||_{L^{sigma+1}}
  double pos_err_pow = 0.0;  // pos_err^{sigma+1}
  double cur_err_weighted = 0.0;
  double cur_err_l1 = 0.0;
  double energy0 = 0.0;      // int e_eps(0)
  double envelope_rate = 0.0;
  // max_t e(t) / (e(0) exp(C t)); <= 1 means the envelope holds.
  double envelope_ratio = 0.0;
  double residual_max = 0.0;  // max over interior observation times
};

struct RateFit {
  std::string metric;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool noisy = false;
};

// Least-squares fit of log(err) against log(eps). Needs >= 3 points, all positive.
RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& errors,
                 std::string metric = {});

struct SweepResult {
  SweepPlan plan;
  std::vector<SweepRow> rows;
  std::vector<RateFit> fits;
  double phi1_sup = 0.0;  // max_t ||phi1||_inf from the shared corrector run
};

SweepResult run_sweep(const SweepPlan& plan);

// Column order of the CSV table.
const std::vector<std::string>& sweep_columns();

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_json(std::ostream& out, const SweepResult& result);

}  // namespace wkb
