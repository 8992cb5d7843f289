#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <array>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wkb {

using Complex = std::complex<double>;
using ArrayXd = Eigen::ArrayXd;
using ArrayXcd = Eigen::ArrayXcd;

// Periodic tensor-product grid on the torus [-L/2, L/2)^dim, dim in {1, 2}.
//
// Samples are stored flat with axis 0 running fastest: index = i0 + n0 * i1.
class Grid {
 public:
  static Grid line(int points, double length);
  static Grid plane(std::array<int, 2> points, std::array<double, 2> lengths);

  int dim() const noexcept { return dim_; }
  int points(int axis) const { return points_.at(check_axis(axis)); }
  double length(int axis) const { return lengths_.at(check_axis(axis)); }
  Eigen::Index size() const noexcept;
  double spacing(int axis) const { return length(axis) / points(axis); }
  double cell_volume() const noexcept;
  double domain_volume() const noexcept;

  // Physical coordinate of every flat sample along `axis`.
  ArrayXd coordinate(int axis) const;
  // Angular wavenumber 2*pi*k/L of every flat spectral index along `axis`,
  // k in {-N/2, ..., N/2 - 1}.
  ArrayXd wavenumber(int axis) const;
  // Integer mode index k along `axis` for every flat spectral index.
  Eigen::ArrayXi mode_index(int axis) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(int dim, std::array<int, 2> points, std::array<double, 2> lengths);
  int check_axis(int axis) const;

  int dim_ = 1;
  std::array<int, 2> points_{16, 1};
  std::array<double, 2> lengths_{1.0, 1.0};
};

enum class Representation { physical, spectral };

// Samples of a scalar function on a Grid. Immutable once built; every
// operation below returns a new field.
template <typename Scalar>
class GridField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  GridField(Grid grid, Values values,
            Representation representation = Representation::physical)
      : grid_(std::move(grid)),
        values_(std::move(values)),
        representation_(representation) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("field sample count " +
                                  std::to_string(values_.size()) +
                                  " does not match grid size " +
                                  std::to_string(grid_.size()));
  }

  static GridField constant(const Grid& grid, Scalar value) {
    return GridField(grid, Values::Constant(grid.size(), value));
  }
  static GridField zero(const Grid& grid) { return constant(grid, Scalar(0)); }

  const Grid& grid() const noexcept { return grid_; }
  const Values& values() const noexcept { return values_; }
  Representation representation() const noexcept { return representation_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }

 private:
  Grid grid_;
  Values values_;
  Representation representation_;
};

using ComplexField = GridField<Complex>;
using RealField = GridField<double>;

// FFT plans, wavenumber tables and scratch space for one grid.
//
// Not thread-safe: the underlying FFT caches plans. Each solver run owns its
// own instance.
class Spectral {
 public:
  explicit Spectral(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }

  // Unnormalized forward DFT (spectral coefficient F_k = sum_j f_j e^{-i k x_j}
  // up to the constant phase of the cell offset, which cancels on inversion).
  void forward(ArrayXcd& data);
  // Inverse of forward(), including the 1/N scaling.
  void inverse(ArrayXcd& data);

  ArrayXcd derivative(const ArrayXcd& f, int axis);
  ArrayXd derivative(const ArrayXd& f, int axis);
  ArrayXcd laplacian(const ArrayXcd& f);
  ArrayXd laplacian(const ArrayXd& f);
  ArrayXd divergence(const std::vector<ArrayXd>& components);
  std::vector<ArrayXcd> gradient(const ArrayXcd& f);
  std::vector<ArrayXd> gradient(const ArrayXd& f);

  // Applies exp(factor * |xi|^2) in spectral space (kinetic propagator).
  void apply_quadratic_phase(ArrayXcd& f, Complex factor);

  // 2/3-rule truncation of a physical-space field.
  void dealias(ArrayXcd& f);
  void dealias(ArrayXd& f);

  // Multiplier i*xi along `axis`, Nyquist entry zeroed.
  const ArrayXd& odd_wavenumber(int axis) const { return odd_xi_.at(axis); }
  const ArrayXd& wavenumber(int axis) const { return xi_.at(axis); }
  const ArrayXd& wavenumber_squared() const noexcept { return xi2_; }
  const Eigen::Array<bool, Eigen::Dynamic, 1>& dealias_mask() const noexcept {
    return keep_;
  }

 private:
  void transform(ArrayXcd& data, bool inverse);

  Grid grid_;
  Eigen::FFT<double> fft_;
  std::vector<ArrayXd> xi_;
  std::vector<ArrayXd> odd_xi_;
  ArrayXd xi2_;
  Eigen::Array<bool, Eigen::Dynamic, 1> keep_;
  std::vector<Complex> line_in_;
  std::vector<Complex> line_out_;
};

// ---------------------------------------------------------------------------
// Free functions on fields.

ComplexField to_spectral(const ComplexField& f);
ComplexField to_physical(const ComplexField& f);

ComplexField as_complex(const RealField& f);
RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);

// d f / d x_axis by multiplication with i*xi; Nyquist mode zeroed.
ComplexField spectral_derivative(const ComplexField& f, int axis);
RealField spectral_derivative(const RealField& f, int axis);
ComplexField laplacian(const ComplexField& f);

// Discrete H^s norm: (L/N^2 sum (1+|xi|^2)^s |F_k|^2)^{1/2} per axis
// normalization, so s = 0 reproduces the rectangle-rule L^2 norm.
double sobolev_norm(const ComplexField& f, double s);
double sobolev_norm(const RealField& f, double s);

// Rectangle-rule L^p norm (spectrally accurate for periodic fields);
// p = infinity returns the largest modulus.
double lebesgue_norm(const ComplexField& f, double p);
double lebesgue_norm(const RealField& f, double p);

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// Rectangle-rule integral of the samples.
double integrate(const ArrayXd& values, const Grid& grid);
Complex integrate(const ArrayXcd& values, const Grid& grid);

// L^p norm of raw samples on a grid (p may be infinity).
double lp_norm(const ArrayXcd& values, const Grid& grid, double p);
double lp_norm(const ArrayXd& values, const Grid& grid, double p);

// Pointwise Euclidean modulus of a vector field given by components.
ArrayXd pointwise_modulus(const std::vector<ArrayXd>& components);
ArrayXd pointwise_modulus(const std::vector<ArrayXcd>& components);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace wkb
