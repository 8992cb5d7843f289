#include "wkb/algebra.hpp"

#include <cmath>

namespace wkb {

namespace {

double simplex_ratio(double t, int sigma) {
  const double r1 = t;
  const double r2 = 1.0 - t;
  return q_sigma(r1, r2, sigma) / (std::pow(r1, sigma - 1) + std::pow(r2, sigma - 1));
}

}  // namespace

double c_sigma_bound(int sigma) {
  require_sigma(sigma);
  constexpr int nodes = 100000;
  int best = 0;
  double best_value = simplex_ratio(0.0, sigma);
  for (int i = 1; i <= nodes; ++i) {
    const double value = simplex_ratio(static_cast<double>(i) / nodes, sigma);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  double lo = std::max(0.0, (best - 1.0) / nodes);
  double hi = std::min(1.0, (best + 1.0) / nodes);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = simplex_ratio(x1, sigma);
  double f2 = simplex_ratio(x2, sigma);
  for (int iter = 0; iter < 80; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = simplex_ratio(x1, sigma);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = simplex_ratio(x2, sigma);
    }
  }
  return std::min({best_value, f1, f2, simplex_ratio(lo, sigma), simplex_ratio(hi, sigma)});
}

}  // namespace wkb
