#include "wkb/grid.hpp"

#include <cmath>
#include <numbers>

namespace wkb {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_axis(int points, double length) {
  if (points < 16 || !is_power_of_two(points))
    throw std::invalid_argument("grid points per axis must be a power of two >= 16, got " +
                                std::to_string(points));
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid length must be positive and finite");
}

// Signed mode index for storage slot j of an N-point FFT.
int signed_mode(int j, int n) { return j < n / 2 ? j : j - n; }

}  // namespace

Grid::Grid(int dim, std::array<int, 2> points, std::array<double, 2> lengths)
    : dim_(dim), points_(points), lengths_(lengths) {}

Grid Grid::line(int points, double length) {
  validate_axis(points, length);
  return Grid(1, {points, 1}, {length, 1.0});
}

Grid Grid::plane(std::array<int, 2> points, std::array<double, 2> lengths) {
  validate_axis(points[0], lengths[0]);
  validate_axis(points[1], lengths[1]);
  return Grid(2, points, lengths);
}

int Grid::check_axis(int axis) const {
  if (axis < 0 || axis >= dim_)
    throw std::out_of_range("axis " + std::to_string(axis) + " out of range for a " +
                            std::to_string(dim_) + "-d grid");
  return axis;
}

Eigen::Index Grid::size() const noexcept {
  return dim_ == 1 ? points_[0] : Eigen::Index(points_[0]) * points_[1];
}

double Grid::cell_volume() const noexcept {
  double v = lengths_[0] / points_[0];
  if (dim_ == 2) v *= lengths_[1] / points_[1];
  return v;
}

double Grid::domain_volume() const noexcept {
  return dim_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1];
}

Eigen::ArrayXi Grid::mode_index(int axis) const {
  check_axis(axis);
  Eigen::ArrayXi k(size());
  const int n0 = points_[0];
  for (Eigen::Index idx = 0; idx < size(); ++idx) {
    const int i0 = static_cast<int>(idx % n0);
    const int i1 = static_cast<int>(idx / n0);
    k[idx] = axis == 0 ? signed_mode(i0, n0) : signed_mode(i1, points_[1]);
  }
  return k;
}

ArrayXd Grid::wavenumber(int axis) const {
  return mode_index(axis).cast<double>() * (2.0 * std::numbers::pi / length(axis));
}

ArrayXd Grid::coordinate(int axis) const {
  check_axis(axis);
  ArrayXd x(size());
  const int n0 = points_[0];
  const double h = spacing(axis);
  const double left = -0.5 * length(axis);
  for (Eigen::Index idx = 0; idx < size(); ++idx) {
    const auto i = axis == 0 ? idx % n0 : idx / n0;
    x[idx] = left + h * static_cast<double>(i);
  }
  return x;
}

// ---------------------------------------------------------------------------

Spectral::Spectral(const Grid& grid) : grid_(grid) {
  const auto n = grid.size();
  xi2_ = ArrayXd::Zero(n);
  keep_ = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, true);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const Eigen::ArrayXi k = grid.mode_index(axis);
    const ArrayXd xi = grid.wavenumber(axis);
    const int nyquist = -grid.points(axis) / 2;
    xi_.push_back(xi);
    odd_xi_.push_back((k == nyquist).select(0.0, xi));
    xi2_ += xi.square();
    const int cutoff = grid.points(axis) / 3;
    keep_ = keep_ && (k.abs() <= cutoff);
  }
  int longest = grid.points(0);
  if (grid.dim() == 2) longest = std::max(longest, grid.points(1));
  line_in_.resize(longest);
  line_out_.resize(longest);
}

void Spectral::transform(ArrayXcd& data, bool inverse) {
  const int n0 = grid_.points(0);
  if (grid_.dim() == 1) {
    std::copy(data.data(), data.data() + n0, line_in_.begin());
    if (inverse)
      fft_.inv(line_out_.data(), line_in_.data(), n0);
    else
      fft_.fwd(line_out_.data(), line_in_.data(), n0);
    std::copy(line_out_.begin(), line_out_.begin() + n0, data.data());
    return;
  }
  const int n1 = grid_.points(1);
  for (int i1 = 0; i1 < n1; ++i1) {
    Complex* row = data.data() + Eigen::Index(i1) * n0;
    std::copy(row, row + n0, line_in_.begin());
    if (inverse)
      fft_.inv(line_out_.data(), line_in_.data(), n0);
    else
      fft_.fwd(line_out_.data(), line_in_.data(), n0);
    std::copy(line_out_.begin(), line_out_.begin() + n0, row);
  }
  for (int i0 = 0; i0 < n0; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) line_in_[i1] = data[i0 + Eigen::Index(i1) * n0];
    if (inverse)
      fft_.inv(line_out_.data(), line_in_.data(), n1);
    else
      fft_.fwd(line_out_.data(), line_in_.data(), n1);
    for (int i1 = 0; i1 < n1; ++i1) data[i0 + Eigen::Index(i1) * n0] = line_out_[i1];
  }
}

void Spectral::forward(ArrayXcd& data) { transform(data, false); }
void Spectral::inverse(ArrayXcd& data) { transform(data, true); }

ArrayXcd Spectral::derivative(const ArrayXcd& f, int axis) {
  ArrayXcd g = f;
  forward(g);
  g *= Complex(0.0, 1.0) * odd_xi_.at(axis);
  inverse(g);
  return g;
}

ArrayXd Spectral::derivative(const ArrayXd& f, int axis) {
  ArrayXcd g = f.cast<Complex>();
  return derivative(g, axis).real();
}

ArrayXcd Spectral::laplacian(const ArrayXcd& f) {
  ArrayXcd g = f;
  forward(g);
  g *= -xi2_;
  inverse(g);
  return g;
}

ArrayXd Spectral::laplacian(const ArrayXd& f) {
  ArrayXcd g = f.cast<Complex>();
  return laplacian(g).real();
}

ArrayXd Spectral::divergence(const std::vector<ArrayXd>& components) {
  if (static_cast<int>(components.size()) != grid_.dim())
    throw std::invalid_argument("divergence: component count must equal grid dimension");
  ArrayXcd acc = ArrayXcd::Zero(grid_.size());
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    ArrayXcd g = components[axis].cast<Complex>();
    forward(g);
    acc += Complex(0.0, 1.0) * odd_xi_[axis] * g;
  }
  inverse(acc);
  return acc.real();
}

std::vector<ArrayXcd> Spectral::gradient(const ArrayXcd& f) {
  ArrayXcd spectrum = f;
  forward(spectrum);
  std::vector<ArrayXcd> out;
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    ArrayXcd g = Complex(0.0, 1.0) * odd_xi_[axis] * spectrum;
    inverse(g);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<ArrayXd> Spectral::gradient(const ArrayXd& f) {
  std::vector<ArrayXd> out;
  for (auto& g : gradient(ArrayXcd(f.cast<Complex>()))) out.push_back(g.real());
  return out;
}

void Spectral::apply_quadratic_phase(ArrayXcd& f, Complex factor) {
  forward(f);
  f *= (factor * xi2_.cast<Complex>()).exp();
  inverse(f);
}

void Spectral::dealias(ArrayXcd& f) {
  forward(f);
  f = keep_.select(f, Complex(0.0));
  inverse(f);
}

void Spectral::dealias(ArrayXd& f) {
  ArrayXcd g = f.cast<Complex>();
  dealias(g);
  f = g.real();
}

// ---------------------------------------------------------------------------

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

ComplexField to_spectral(const ComplexField& f) {
  if (f.representation() == Representation::spectral) return f;
  Spectral ops(f.grid());
  ArrayXcd g = f.values();
  ops.forward(g);
  return ComplexField(f.grid(), std::move(g), Representation::spectral);
}

ComplexField to_physical(const ComplexField& f) {
  if (f.representation() == Representation::physical) return f;
  Spectral ops(f.grid());
  ArrayXcd g = f.values();
  ops.inverse(g);
  return ComplexField(f.grid(), std::move(g), Representation::physical);
}

ComplexField as_complex(const RealField& f) {
  return ComplexField(f.grid(), f.values().cast<Complex>(), f.representation());
}

RealField real_part(const ComplexField& f) {
  return RealField(f.grid(), to_physical(f).values().real());
}

RealField imag_part(const ComplexField& f) {
  return RealField(f.grid(), to_physical(f).values().imag());
}

ComplexField spectral_derivative(const ComplexField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim())
    throw std::out_of_range("spectral_derivative: axis " + std::to_string(axis) +
                            " out of range");
  Spectral ops(f.grid());
  return ComplexField(f.grid(), ops.derivative(to_physical(f).values(), axis));
}

RealField spectral_derivative(const RealField& f, int axis) {
  return real_part(spectral_derivative(as_complex(f), axis));
}

ComplexField laplacian(const ComplexField& f) {
  Spectral ops(f.grid());
  return ComplexField(f.grid(), ops.laplacian(to_physical(f).values()));
}

double sobolev_norm(const ComplexField& f, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("sobolev_norm: order must be nonnegative");
  const ComplexField spectrum = to_spectral(f);
  const Grid& g = f.grid();
  const ArrayXd weight = (1.0 + Spectral(g).wavenumber_squared()).pow(s);
  const double n = static_cast<double>(g.size());
  const double sum = (weight * spectrum.values().abs2()).sum();
  return std::sqrt(g.domain_volume() * sum) / n;
}

double sobolev_norm(const RealField& f, double s) { return sobolev_norm(as_complex(f), s); }

double lp_norm(const ArrayXcd& values, const Grid& grid, double p) {
  return lp_norm(ArrayXd(values.abs()), grid, p);
}

double lp_norm(const ArrayXd& values, const Grid& grid, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lebesgue_norm: exponent must be >= 1");
  const ArrayXd m = values.abs();
  if (std::isinf(p)) return m.size() ? m.maxCoeff() : 0.0;
  const double peak = m.maxCoeff();
  if (peak == 0.0) return 0.0;
  // Scale by the peak so large exponents neither overflow nor underflow.
  const double sum = (m / peak).pow(p).sum() * grid.cell_volume();
  return peak * std::pow(sum, 1.0 / p);
}

double lebesgue_norm(const ComplexField& f, double p) {
  return lp_norm(to_physical(f).values(), f.grid(), p);
}

double lebesgue_norm(const RealField& f, double p) {
  return lp_norm(f.values(), f.grid(), p);
}

double integrate(const ArrayXd& values, const Grid& grid) {
  return values.sum() * grid.cell_volume();
}

Complex integrate(const ArrayXcd& values, const Grid& grid) {
  return values.sum() * grid.cell_volume();
}

ArrayXd pointwise_modulus(const std::vector<ArrayXd>& components) {
  ArrayXd acc = ArrayXd::Zero(components.empty() ? 0 : components.front().size());
  for (const auto& c : components) acc += c.square();
  return acc.sqrt();
}

ArrayXd pointwise_modulus(const std::vector<ArrayXcd>& components) {
  ArrayXd acc = ArrayXd::Zero(components.empty() ? 0 : components.front().size());
  for (const auto& c : components) acc += c.abs2();
  return acc.sqrt();
}

}  // namespace wkb
