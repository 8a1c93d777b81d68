#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "htsim/covmodel.hpp"
#include "htsim/rng.hpp"

using namespace htsim;

namespace {

const std::vector<TaperFamily> kAllTapers = {
    TaperFamily::Spherical, TaperFamily::Cubic,     TaperFamily::Penta,
    TaperFamily::Bohman,    TaperFamily::Wendland0, TaperFamily::Wendland1,
    TaperFamily::Wendland2};

// f(s) = (1/(2 pi^2 s)) int_0^1 phi(r) r sin(s r) dr, Simpson on the
// compact support; independent of the closed-form table.
double density_by_quadrature(const Taper& t, double s) {
  const int n = 20000;  // even
  const double h = 1.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * taper_value(t, r) * r * std::sin(s * r);
  }
  return acc * h / 3.0 / (2.0 * M_PI * M_PI * s);
}

double moment_integral(const Taper& t) {  // int_0^1 phi(r) r^2 dr
  const int n = 20000;
  const double h = 1.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * taper_value(t, r) * r * r;
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("correlation basics") {
  for (CovFamily f : {CovFamily::Exponential, CovFamily::Gaussian, CovFamily::Spherical,
                      CovFamily::Cubic, CovFamily::Penta, CovFamily::Matern,
                      CovFamily::Cauchy}) {
    CovarianceSpec c{f, 2.0, 0.7, 1.5, 1.0};
    CHECK(correlation(c, 0.0) == doctest::Approx(1.0));
    CHECK(cov_value(c, 0.0) == doctest::Approx(2.0));
    double prev = 1.0;
    for (double r = 0.05; r < 2.0; r += 0.05) {
      const double v = correlation(c, r);
      CHECK(v <= prev + 1e-12);
      CHECK(v <= 1.0 + 1e-12);
      prev = v;
    }
  }
  // compact covariances vanish beyond the range
  for (CovFamily f : {CovFamily::Spherical, CovFamily::Cubic, CovFamily::Penta}) {
    CovarianceSpec c{f, 1.0, 0.7};
    CHECK(correlation(c, 0.7) == 0.0);
    CHECK(correlation(c, 5.0) == 0.0);
  }
  CHECK_THROWS_AS(correlation(CovarianceSpec{}, -0.1), std::invalid_argument);
}

TEST_CASE("taper hand values and support") {
  CHECK(taper_value({TaperFamily::Spherical, 1.0}, 0.5) == doctest::Approx(0.3125));
  CHECK(taper_value({TaperFamily::Wendland1, 1.0}, 0.5) == doctest::Approx(0.1875));
  CHECK(taper_value({TaperFamily::Wendland0, 2.0}, 1.0) == doctest::Approx(0.25));
  for (TaperFamily f : kAllTapers) {
    Taper t{f, 0.4};
    CHECK(taper_value(t, 0.0) == doctest::Approx(1.0));
    CHECK(taper_value(t, 0.4) == 0.0);
    CHECK(taper_value(t, 10.0) == 0.0);
    for (double r = 0.0; r < 0.4; r += 0.01) {
      CHECK(taper_value(t, r) >= 0.0);
      CHECK(taper_value(t, r) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("tapered value is the pointwise product") {
  TaperedCovariance tc{{CovFamily::Exponential, 3.0, 1.0}, {TaperFamily::Wendland1, 0.8}};
  for (double r : {0.0, 0.2, 0.5, 0.79})
    CHECK(tapered_value(tc, r) ==
          doctest::Approx(3.0 * std::exp(-r) * taper_value(tc.taper, r)));
  CHECK(tapered_value(tc, 0.8) == 0.0);
  CHECK(tapered_value(tc, 2.0) == 0.0);
}

TEST_CASE("taper spectral densities agree with quadrature") {
  for (TaperFamily f : kAllTapers) {
    Taper t{f, 1.0};
    for (double s : {0.5, 3.0, 7.0, 20.0}) {
      const double ref = density_by_quadrature(t, s);
      CHECK(spectral_density_r3(t, s) == doctest::Approx(ref).epsilon(1e-6));
    }
    // small-s limit constant f(0) = (1/(2 pi^2)) int phi r^2 dr
    const double f0 = moment_integral(t) / (2.0 * M_PI * M_PI);
    CHECK(spectral_density_r3(t, 1e-6) == doctest::Approx(f0).epsilon(1e-5));
    // positive on a frequency grid
    for (double s = 0.1; s < 40.0; s += 0.37)
      CHECK(spectral_density_r3(t, s) >= -1e-15);
  }
  // Bohman removable singularity at s = 2 pi
  Taper bo{TaperFamily::Bohman, 1.0};
  CHECK(spectral_density_r3(bo, 2.0 * M_PI) ==
        doctest::Approx(density_by_quadrature(bo, 2.0 * M_PI)).epsilon(1e-5));
}

TEST_CASE("covariance spectral densities: closed forms vs quadrature") {
  // exponential: 1/(pi^2 (1+s^2)^2)
  CovarianceSpec e{CovFamily::Exponential, 1.0, 1.0};
  CHECK(spectral_density_r3(e, 2.0) == doctest::Approx(1.0 / (M_PI * M_PI * 25.0)));
  // matern nu=1/2 is exponential
  CovarianceSpec m{CovFamily::Matern, 1.0, 1.0, 0.5};
  for (double r : {0.1, 0.7, 2.3})
    CHECK(correlation(m, r) == doctest::Approx(std::exp(-r)).epsilon(1e-10));
  for (double s : {0.5, 2.0, 9.0})
    CHECK(spectral_density_r3(m, s) == doctest::Approx(spectral_density_r3(e, s)).epsilon(1e-10));
}

TEST_CASE("effective range hits the 0.05 level") {
  for (auto c : {CovarianceSpec{CovFamily::Exponential, 1.0, 0.9},
                 CovarianceSpec{CovFamily::Gaussian, 1.0, 2.0},
                 CovarianceSpec{CovFamily::Matern, 1.0, 0.5, 1.0},
                 CovarianceSpec{CovFamily::Spherical, 1.0, 1.3},
                 CovarianceSpec{CovFamily::Cauchy, 1.0, 1.0, 1.0, 1.0}}) {
    const double eff = effective_range(c);
    CHECK(correlation(c, eff) == doctest::Approx(0.05).epsilon(1e-6));
  }
  CHECK(effective_range({CovFamily::Exponential, 1.0, 1.0}) ==
        doctest::Approx(std::log(20.0)).epsilon(1e-9));
}

TEST_CASE("tail screen verdicts") {
  auto verdict = [](const CovarianceSpec& c, TaperFamily f) {
    return tail_screen(c, {f, 1.0}).satisfied;
  };
  CovarianceSpec expo{CovFamily::Exponential, 1.0, 1.0};
  CHECK(verdict(expo, TaperFamily::Spherical) == TailVerdict::Yes);
  CHECK(verdict(expo, TaperFamily::Wendland0) == TailVerdict::Yes);
  CovarianceSpec m1{CovFamily::Matern, 1.0, 1.0, 1.0};  // s^-5
  CHECK(verdict(m1, TaperFamily::Spherical) == TailVerdict::No);
  CHECK(verdict(m1, TaperFamily::Wendland1) == TailVerdict::Yes);
  CHECK(verdict(m1, TaperFamily::Cubic) == TailVerdict::Yes);
  CHECK(verdict({CovFamily::Gaussian, 1.0, 1.0}, TaperFamily::Penta) == TailVerdict::No);
  CHECK(verdict({CovFamily::Cauchy, 1.0, 1.0, 1.0, 0.5}, TaperFamily::Penta) ==
        TailVerdict::No);
}

TEST_CASE("matern smoothness column stored verbatim") {
  CHECK(spectral_profile(CovarianceSpec{CovFamily::Matern, 1, 1, 0.5}).smoothness == 0);
  CHECK(spectral_profile(CovarianceSpec{CovFamily::Matern, 1, 1, 1.0}).smoothness == 0);
  CHECK(spectral_profile(CovarianceSpec{CovFamily::Matern, 1, 1, 1.5}).smoothness == 2);
  CHECK(spectral_profile(CovarianceSpec{CovFamily::Matern, 1, 1, 2.5}).smoothness == 4);
  CHECK(spectral_profile(CovarianceSpec{CovFamily::Matern, 1, 1, 1.0}).exponent ==
        doctest::Approx(5.0));
}

TEST_CASE("parse and print round trip") {
  const CovarianceSpec c = parse_covariance("Matern(nu=1.5, range=0.4, sill=2)");
  CHECK(c.family == CovFamily::Matern);
  CHECK(c.nu == doctest::Approx(1.5));
  CHECK(c.range == doctest::Approx(0.4));
  CHECK(c.sill == doctest::Approx(2.0));
  const CovarianceSpec c2 = parse_covariance(to_string(c));
  CHECK(c2.nu == doctest::Approx(c.nu));
  CHECK(c2.range == doctest::Approx(c.range));
  const Taper t = parse_taper("wendland2(theta=0.25)");
  CHECK(t.family == TaperFamily::Wendland2);
  CHECK(t.theta == doctest::Approx(0.25));
  CHECK_THROWS_AS(parse_covariance("nosuch(range=1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_covariance("matern(range=0)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_taper("spherical(theta=-1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_covariance("matern(nu=0.7,range=1)"), std::invalid_argument);
}

TEST_CASE("tapered matrices stay positive semidefinite") {
  Rng rng(42);
  for (TaperFamily f : kAllTapers) {
    const int n = 60;
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) pts(i, j) = rng.uniform();
    TaperedCovariance tc{{CovFamily::Matern, 1.0, 0.3, 1.5}, {f, 0.45}};
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        K(i, j) = tapered_value(tc, (pts.row(i) - pts.row(j)).norm());
    const double lambda_min =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues().minCoeff();
    CHECK(lambda_min >= -1e-10);
  }
}
