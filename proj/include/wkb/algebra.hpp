#pragma once

// Nonlinear symmetrization algebra for the power nonlinearity |u|^{2 sigma} u.
//
// With r1 = |a_eps|^2 and r2 = |a|^2:
//   P(r1, r2) = sum_{l<sigma} r1^{sigma-1-l} r2^l        = (r1^sigma - r2^sigma)/(r1 - r2)
//   Q(r1, r2) = 2 sigma int_0^1 (1-s) (r2 + s (r1 - r2))^{sigma-1} ds
//   B(r1, r2) = (r1 - r2) sqrt(Q)
//   G(r1, r2) = P / sqrt(Q)                             so that  G * B = r1^sigma - r2^sigma
//   B^2 = 2/(sigma+1) (r1^{sigma+1} - r2^{sigma+1}) - 2 r2^sigma (r1 - r2).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <stdexcept>
#include <string>

namespace wkb {

inline constexpr int max_sigma = 6;

inline void require_sigma(int sigma) {
  if (sigma < 1)
    throw std::invalid_argument("sigma must be a positive integer, got " + std::to_string(sigma));
}

template <std::floating_point Real>
void require_nonnegative(Real r1, Real r2) {
  if (r1 < Real(0) || r2 < Real(0))
    throw std::domain_error("density arguments must be nonnegative");
}

// sum_{l=0}^{sigma-1} r1^{sigma-1-l} r2^l
template <std::floating_point Real>
Real p_sigma(Real r1, Real r2, int sigma) {
  require_sigma(sigma);
  Real acc(0);
  for (int l = 0; l < sigma; ++l) acc = acc * r1 + std::pow(r2, l);
  return acc;
}

// Closed form of the Taylor-remainder weight. Expanding the integrand in the
// Bernstein basis gives only nonnegative coefficients:
//   Q = 2/(sigma+1) * sum_{j=0}^{sigma-1} (sigma - j) r1^j r2^{sigma-1-j}.
template <std::floating_point Real>
Real q_sigma(Real r1, Real r2, int sigma) {
  require_sigma(sigma);
  require_nonnegative(r1, r2);
  Real acc(0);
  for (int j = sigma - 1; j >= 0; --j) acc = acc * r1 + Real(sigma - j) * std::pow(r2, sigma - 1 - j);
  return Real(2) / Real(sigma + 1) * acc;
}

template <std::floating_point Real>
Real b_sigma(Real r1, Real r2, int sigma) {
  return (r1 - r2) * std::sqrt(q_sigma(r1, r2, sigma));
}

// Continuous extension G(0,0) = 0 for sigma >= 2; G_1 = 1.
template <std::floating_point Real>
Real g_sigma(Real r1, Real r2, int sigma) {
  require_sigma(sigma);
  require_nonnegative(r1, r2);
  if (sigma == 1) return Real(1);
  const Real q = q_sigma(r1, r2, sigma);
  if (q == Real(0)) return Real(0);
  return p_sigma(r1, r2, sigma) / std::sqrt(q);
}

// F(z, z') = z G(|z|^2, |z'|^2); homogeneous of degree sigma.
template <std::floating_point Real>
std::complex<Real> f_sigma(std::complex<Real> z, std::complex<Real> z2, int sigma) {
  return z * g_sigma(std::norm(z), std::norm(z2), sigma);
}

// Right-hand side of the squared identity for B.
template <std::floating_point Real>
Real b_squared_identity(Real r1, Real r2, int sigma) {
  return Real(2) / Real(sigma + 1) * (std::pow(r1, sigma + 1) - std::pow(r2, sigma + 1)) -
         Real(2) * std::pow(r2, sigma) * (r1 - r2);
}

// Largest C with Q(r1, r2) >= C (r1^{sigma-1} + r2^{sigma-1}). By homogeneity
// it suffices to search the segment r1 + r2 = 1: a 1e-5 grid scan followed by
// golden-section refinement around the best node.
double c_sigma_bound(int sigma);

// Fieldwise versions (coefficient-wise over Eigen arrays).

template <typename Derived1, typename Derived2>
Eigen::ArrayXd q_sigma(const Eigen::ArrayBase<Derived1>& r1, const Eigen::ArrayBase<Derived2>& r2,
                       int sigma) {
  Eigen::ArrayXd out(r1.size());
  for (Eigen::Index i = 0; i < r1.size(); ++i) out[i] = q_sigma<double>(r1[i], r2[i], sigma);
  return out;
}

template <typename Derived1, typename Derived2>
Eigen::ArrayXd b_sigma(const Eigen::ArrayBase<Derived1>& r1, const Eigen::ArrayBase<Derived2>& r2,
                       int sigma) {
  Eigen::ArrayXd out(r1.size());
  for (Eigen::Index i = 0; i < r1.size(); ++i) out[i] = b_sigma<double>(r1[i], r2[i], sigma);
  return out;
}

template <typename Derived1, typename Derived2>
Eigen::ArrayXd g_sigma(const Eigen::ArrayBase<Derived1>& r1, const Eigen::ArrayBase<Derived2>& r2,
                       int sigma) {
  Eigen::ArrayXd out(r1.size());
  for (Eigen::Index i = 0; i < r1.size(); ++i) out[i] = g_sigma<double>(r1[i], r2[i], sigma);
  return out;
}

}  // namespace wkb
