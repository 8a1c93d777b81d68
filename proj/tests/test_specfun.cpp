#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htsim/specfun.hpp"

using namespace htsim;

TEST_CASE("regularized incomplete beta: endpoints and symmetry") {
  CHECK(specfun::regularized_inc_beta(0.0, 2.0, 3.0) == doctest::Approx(0.0));
  CHECK(specfun::regularized_inc_beta(1.0, 2.0, 3.0) == doctest::Approx(1.0));
  // I_x(a,b) = 1 - I_{1-x}(b,a)
  for (double x : {0.1, 0.37, 0.5, 0.93})
    CHECK(specfun::regularized_inc_beta(x, 1.5, 2.5) ==
          doctest::Approx(1.0 - specfun::regularized_inc_beta(1.0 - x, 2.5, 1.5)).epsilon(1e-12));
}

TEST_CASE("regularized incomplete beta: closed forms") {
  // I_x(1, b) = 1 - (1-x)^b; I_x(a, 1) = x^a
  for (double x : {0.05, 0.3, 0.8}) {
    CHECK(specfun::regularized_inc_beta(x, 1.0, 4.0) ==
          doctest::Approx(1.0 - std::pow(1.0 - x, 4.0)).epsilon(1e-13));
    CHECK(specfun::regularized_inc_beta(x, 3.0, 1.0) ==
          doctest::Approx(std::pow(x, 3.0)).epsilon(1e-13));
  }
  // I_{1/2}(a, a) = 1/2
  CHECK(specfun::regularized_inc_beta(0.5, 2.7, 2.7) == doctest::Approx(0.5).epsilon(1e-13));
  // half-integer case against a quadrature-free reference:
  // I_x(1/2, 1/2) = (2/pi) asin(sqrt(x))
  for (double x : {0.2, 0.5, 0.9})
    CHECK(specfun::regularized_inc_beta(x, 0.5, 0.5) ==
          doctest::Approx(2.0 / M_PI * std::asin(std::sqrt(x))).epsilon(1e-12));
}

TEST_CASE("normal cdf / quantile round trip") {
  CHECK(specfun::std_normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(specfun::std_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6})
    CHECK(specfun::std_normal_cdf(specfun::std_normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-12));
  CHECK(specfun::std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("bessel K: half-integer closed forms") {
  // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
  for (double x : {0.3, 1.0, 4.0})
    CHECK(specfun::bessel_k(0.5, x) ==
          doctest::Approx(std::sqrt(M_PI / (2.0 * x)) * std::exp(-x)).epsilon(1e-12));
  // K_{3/2}(x) = sqrt(pi/(2x)) e^{-x} (1 + 1/x)
  for (double x : {0.5, 2.0})
    CHECK(specfun::bessel_k(1.5, x) ==
          doctest::Approx(std::sqrt(M_PI / (2.0 * x)) * std::exp(-x) * (1.0 + 1.0 / x))
              .epsilon(1e-12));
}

TEST_CASE("bessel K0/K1 reference values") {
  // Abramowitz & Stegun 9.8 tables
  CHECK(specfun::bessel_k(0.0, 1.0) == doctest::Approx(0.4210244382).epsilon(1e-7));
  CHECK(specfun::bessel_k(1.0, 1.0) == doctest::Approx(0.6019072302).epsilon(1e-7));
  CHECK(specfun::bessel_k(0.0, 2.0) == doctest::Approx(0.1138938727).epsilon(1e-7));
  CHECK(specfun::bessel_k(2.0, 1.0) == doctest::Approx(1.6248388986).epsilon(1e-7));
}

TEST_CASE("kolmogorov survival function") {
  // Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2); reference values
  CHECK(specfun::kolmogorov_sf(0.5) == doctest::Approx(0.9639452436).epsilon(1e-9));
  CHECK(specfun::kolmogorov_sf(1.0) == doctest::Approx(0.2699996717).epsilon(1e-9));
  CHECK(specfun::kolmogorov_sf(2.0) == doctest::Approx(0.00067092).epsilon(1e-4));
  CHECK(specfun::kolmogorov_sf(0.0) == doctest::Approx(1.0));
  CHECK(specfun::kolmogorov_sf(10.0) == doctest::Approx(0.0));
}

TEST_CASE("normal quantile symmetric") {
  for (double p : {0.01, 0.2, 0.4})
    CHECK(specfun::std_normal_quantile(p) ==
          doctest::Approx(-specfun::std_normal_quantile(1.0 - p)).epsilon(1e-12));
}
