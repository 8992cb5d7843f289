#include "wkb/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wkb {

double compact_bump(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s2));
}

double snap_wavenumber(double k, double epsilon, double length) {
  const double lattice = 2.0 * std::numbers::pi / length;
  return epsilon * lattice * std::round(k / (epsilon * lattice));
}

namespace {

ArrayXd radius_squared(const Grid& grid) {
  ArrayXd r2 = ArrayXd::Zero(grid.size());
  for (int axis = 0; axis < grid.dim(); ++axis) r2 += grid.coordinate(axis).square();
  return r2;
}

ArrayXd bump_profile(const Grid& grid, double radius) {
  const ArrayXd r = radius_squared(grid).sqrt() / radius;
  return r.unaryExpr([](double s) { return compact_bump(s); });
}

}  // namespace

InitialData make_initial_data(const Grid& grid, const PresetParams& p, double epsilon) {
  const auto n = grid.size();
  const ArrayXd x = grid.coordinate(0);
  const ArrayXd gauss = (-radius_squared(grid) / (p.width * p.width)).exp();

  ArrayXcd a0(n);
  if (p.a0 == "gaussian") {
    a0 = p.amplitude * gauss.cast<Complex>() *
         (1.0 + Complex(0.0, p.a0_tilt) * (x / p.width).cast<Complex>());
  } else if (p.a0 == "compact_bump") {
    a0 = (p.amplitude * bump_profile(grid, p.radius)).cast<Complex>();
  } else if (p.a0 == "plane_wave" || p.a0 == "constant") {
    a0 = ArrayXcd::Constant(n, Complex(p.amplitude, 0.0));
  } else {
    throw std::invalid_argument("unknown a0 preset '" + p.a0 + "'");
  }

  ArrayXcd a1(n);
  if (p.a1 == "zero") {
    a1.setZero();
  } else if (p.a1 == "gaussian") {
    a1 = (p.a1_scale * gauss).cast<Complex>();
  } else if (p.a1 == "imag_gaussian") {
    a1 = Complex(0.0, p.a1_scale) * gauss.cast<Complex>();
  } else {
    throw std::invalid_argument("unknown a1 preset '" + p.a1 + "'");
  }

  const std::string phase = p.a0 == "plane_wave" ? std::string("plane_wave") : p.phi0;
  ArrayXd phi0 = ArrayXd::Zero(n);
  std::vector<RealField> grad;
  if (phase == "zero") {
  } else if (phase == "cosine") {
    for (int axis = 0; axis < grid.dim(); ++axis) {
      const double kappa = 2.0 * std::numbers::pi / grid.length(axis);
      const ArrayXd xa = grid.coordinate(axis);
      phi0 -= p.phase_scale * (kappa * xa).cos();
      grad.emplace_back(grid, p.phase_scale * kappa * (kappa * xa).sin());
    }
  } else if (phase == "compact_bump") {
    phi0 = p.phase_scale * bump_profile(grid, p.radius);
  } else if (phase == "plane_wave") {
    const double k = snap_wavenumber(p.wavenumber, epsilon, grid.length(0));
    phi0 = k * x;
    grad.emplace_back(grid, ArrayXd::Constant(n, k));
    for (int axis = 1; axis < grid.dim(); ++axis) grad.emplace_back(grid, ArrayXd::Zero(n));
  } else {
    throw std::invalid_argument("unknown phi0 preset '" + p.phi0 + "'");
  }

  std::string tag = p.a0 + "/" + p.a1 + "/" + phase;
  return InitialData{ComplexField(grid, std::move(a0)), ComplexField(grid, std::move(a1)),
                     RealField(grid, std::move(phi0)), std::move(grad), std::move(tag)};
}

std::vector<ArrayXd> initial_velocity(const InitialData& data) {
  std::vector<ArrayXd> v;
  if (!data.grad_phi0.empty()) {
    for (const auto& g : data.grad_phi0) v.push_back(g.values());
    return v;
  }
  Spectral ops(data.phi0.grid());
  return ops.gradient(data.phi0.values());
}

void validate(const InitialData& data) {
  const Grid& g = data.a0.grid();
  require_same_grid(g, data.a1.grid(), "initial data a1");
  require_same_grid(g, data.phi0.grid(), "initial data phi0");
  if (!data.grad_phi0.empty() && static_cast<int>(data.grad_phi0.size()) != g.dim())
    throw std::invalid_argument("initial data: phase gradient needs one component per axis");
  for (const auto& c : data.grad_phi0) require_same_grid(g, c.grid(), "initial data grad phi0");
  if (!data.phi0.values().allFinite() || !data.a0.values().allFinite() ||
      !data.a1.values().allFinite())
    throw std::invalid_argument("initial data contains non-finite samples");
}

}  // namespace wkb
