#include "generators.hpp"

#include "wkb/algebra.hpp"

#include <doctest.h>

#include <cmath>

using namespace wkb;
using Complex = std::complex<double>;

namespace {

// Composite Simpson rule for 2 sigma int_0^1 (1-s)(r2 + s(r1-r2))^{sigma-1} ds.
double q_quadrature(double r1, double r2, int sigma) {
  const int n = 2000;
  const double h = 1.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * (1 - s) * std::pow(r2 + s * (r1 - r2), sigma - 1);
  }
  return 2.0 * sigma * acc * h / 3.0;
}

double brute_force_bound(int sigma) {
  double best = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    const double r1 = i / 200000.0, r2 = 1.0 - r1;
    best = std::min(best, q_sigma(r1, r2, sigma) /
                              (std::pow(r1, sigma - 1) + std::pow(r2, sigma - 1)));
  }
  return best;
}

}  // namespace

TEST_CASE("Q closed form agrees with quadrature") {
  Gen gen(1);
  for (int sigma = 1; sigma <= max_sigma; ++sigma)
    for (int trial = 0; trial < 200; ++trial) {
      const auto [r1, r2] = gen.density_pair();
      const double q = q_sigma(r1, r2, sigma);
      CHECK(q == doctest::Approx(q_quadrature(r1, r2, sigma)).epsilon(1e-11).scale(1.0));
    }
}

TEST_CASE("Q on the diagonal is the derivative of r^sigma") {
  Gen gen(2);
  for (int sigma = 1; sigma <= max_sigma; ++sigma)
    for (int trial = 0; trial < 100; ++trial) {
      const double r = gen.uniform(0.0, 4.0);
      CHECK(q_sigma(r, r, sigma) ==
            doctest::Approx(sigma * std::pow(r, sigma - 1)).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("G B reproduces the difference of powers") {
  Gen gen(3);
  for (int sigma = 1; sigma <= max_sigma; ++sigma)
    for (int trial = 0; trial < 500; ++trial) {
      const auto [r1, r2] = gen.density_pair();
      const double lhs = g_sigma(r1, r2, sigma) * b_sigma(r1, r2, sigma);
      const double rhs = std::pow(r1, sigma) - std::pow(r2, sigma);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::pow(std::max(r1, r2), sigma)));
    }
}

TEST_CASE("squared identity for B") {
  Gen gen(4);
  for (int sigma = 1; sigma <= max_sigma; ++sigma)
    for (int trial = 0; trial < 500; ++trial) {
      const auto [r1, r2] = gen.density_pair();
      const double b = b_sigma(r1, r2, sigma);
      CHECK(std::abs(b * b - b_squared_identity(r1, r2, sigma)) <=
            1e-12 * (1 + std::pow(std::max(r1, r2), sigma + 1)));
    }
}

TEST_CASE("sign and vanishing of B") {
  Gen gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int sigma = gen.integer(1, max_sigma);
    const auto [r1, r2] = gen.density_pair();
    const double b = b_sigma(r1, r2, sigma);
    if (r1 > r2) CHECK(b >= 0.0);
    if (r1 < r2) CHECK(b <= 0.0);
    CHECK(b_sigma(r1, r1, sigma) == 0.0);
  }
}

TEST_CASE("sigma = 1 reduces to the plain density difference") {
  Gen gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [r1, r2] = gen.density_pair();
    CHECK(q_sigma(r1, r2, 1) == 1.0);
    CHECK(g_sigma(r1, r2, 1) == 1.0);
    CHECK(b_sigma(r1, r2, 1) == doctest::Approx(r1 - r2));
  }
}

TEST_CASE("lower bound constant") {
  CHECK(c_sigma_bound(1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(c_sigma_bound(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  for (int sigma = 1; sigma <= max_sigma; ++sigma) {
    const double c = c_sigma_bound(sigma);
    CHECK(c > 0.0);
    CHECK(c == doctest::Approx(brute_force_bound(sigma)).epsilon(1e-8));
  }
  Gen gen(8);
  for (int sigma = 1; sigma <= max_sigma; ++sigma) {
    const double c = c_sigma_bound(sigma);
    for (int trial = 0; trial < 300; ++trial) {
      const auto [r1, r2] = gen.density_pair();
      CHECK(q_sigma(r1, r2, sigma) >=
            c * (std::pow(r1, sigma - 1) + std::pow(r2, sigma - 1)) * (1 - 1e-12));
    }
  }
}

TEST_CASE("F is homogeneous of degree sigma") {
  Gen gen(9);
  for (int sigma = 1; sigma <= max_sigma; ++sigma)
    for (int trial = 0; trial < 100; ++trial) {
      const Complex z(gen.uniform(-1.5, 1.5), gen.uniform(-1.5, 1.5));
      const Complex w(gen.uniform(-1.5, 1.5), gen.uniform(-1.5, 1.5));
      const Complex lambda = std::polar(gen.uniform(0.1, 3.0), gen.uniform(-3.1, 3.1));
      const Complex lhs = f_sigma(lambda * z, lambda * w, sigma);
      const Complex rhs = lambda * std::pow(std::abs(lambda), sigma - 1) * f_sigma(z, w, sigma);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs)));
    }
}


TEST_CASE("G extends continuously to the origin") {
  for (int sigma = 2; sigma <= max_sigma; ++sigma) {
    CHECK(g_sigma(0.0, 0.0, sigma) == 0.0);
    CHECK(std::abs(g_sigma(1e-12, 1e-12, sigma)) < 1e-5);
  }
}

TEST_CASE("fieldwise versions match the scalar ones") {
  Gen gen(10);
  Eigen::ArrayXd r1(50), r2(50);
  for (int i = 0; i < 50; ++i) std::tie(r1[i], r2[i]) = gen.density_pair();
  for (int sigma = 1; sigma <= 4; ++sigma) {
    const Eigen::ArrayXd q = q_sigma(r1, r2, sigma), b = b_sigma(r1, r2, sigma),
                         g = g_sigma(r1, r2, sigma);
    for (int i = 0; i < 50; ++i) {
      CHECK(q[i] == q_sigma(r1[i], r2[i], sigma));
      CHECK(b[i] == b_sigma(r1[i], r2[i], sigma));
      CHECK(g[i] == g_sigma(r1[i], r2[i], sigma));
    }
  }
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(q_sigma(1.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(q_sigma(-1.0, 1.0, 2), std::domain_error);
  CHECK_THROWS_AS(g_sigma(1.0, -1e-3, 2), std::domain_error);
}
