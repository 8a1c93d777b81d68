#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "htsim/field.hpp"
#include "htsim/sparsity.hpp"

using namespace htsim;

TEST_CASE("d = 1 closed form r - r^2/4") {
  for (double r = 0.0; r <= 2.0; r += 0.01)
    CHECK(sparsity::distance_cdf(1, r) == doctest::Approx(r - r * r / 4.0).epsilon(1e-10));
}

TEST_CASE("distance cdf endpoints and monotonicity") {
  for (int d : {1, 2, 3}) {
    CHECK(sparsity::distance_cdf(d, 0.0) == doctest::Approx(0.0));
    CHECK(sparsity::distance_cdf(d, 2.0) == doctest::Approx(1.0));
    CHECK(sparsity::distance_cdf(d, 5.0) == doctest::Approx(1.0));
    double prev = 0.0;
    for (double r = 0.0; r <= 2.0; r += 0.02) {
      const double v = sparsity::distance_cdf(d, r);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("distance cdf vs Monte Carlo") {
  for (int d : {1, 2, 3}) {
    const auto dist = random_disk_pairs(200000, d, 17);
    auto sorted = dist;
    std::sort(sorted.begin(), sorted.end());
    double sup = 0.0;
    for (double r = 0.05; r < 2.0; r += 0.05) {
      const double emp =
          static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), r) -
                              sorted.begin()) /
          static_cast<double>(sorted.size());
      sup = std::max(sup, std::fabs(emp - sparsity::distance_cdf(d, r)));
    }
    CHECK(sup < 0.005);
  }
}

TEST_CASE("worked 2D example: theta = 0.21, S near 0.96") {
  // square side 10, theta_phys = 1.2 -> theta_norm = 1.2 sqrt(pi) / 10
  BoxDomain square{2, {10.0, 10.0, 1.0}};
  const double theta_norm = sparsity::equivalent_theta(1.2, square);
  CHECK(theta_norm == doctest::Approx(0.2127).epsilon(1e-3));
  const auto fc = sparsity::forecast({TaperFamily::Spherical, 1.2}, square, 1000);
  CHECK(fc.cdf == doctest::Approx(0.04).epsilon(0.1));
  CHECK(fc.index == doctest::Approx(0.96).epsilon(0.005));
}

TEST_CASE("3D equivalent theta follows the formula, not the printed 0.13") {
  // cube side 10, theta_phys = 1.2: theta = 1.2 (4 pi / 3)^{1/3} / 10
  BoxDomain cube{3, {10.0, 10.0, 10.0}};
  const double theta_norm = sparsity::equivalent_theta(1.2, cube);
  CHECK(theta_norm == doctest::Approx(1.2 * std::cbrt(4.0 * M_PI / 3.0) / 10.0).epsilon(1e-12));
  CHECK(theta_norm == doctest::Approx(0.193).epsilon(5e-3));
  CHECK(sparsity::forecast({TaperFamily::Spherical, 1.2}, cube, 1000).index > 0.99);
}

TEST_CASE("sparsity index limits") {
  // theta covering the whole ball: S -> 0 within the 1/n correction
  CHECK(sparsity::sparsity_index(2.0, 100, 2) == doctest::Approx(0.0).epsilon(1e-12));
  // vanishing theta: only the diagonal survives, S -> 1 - 1/n
  CHECK(sparsity::sparsity_index(1e-12, 100, 2) == doctest::Approx(0.99).epsilon(1e-9));
  // larger n => larger S at fixed theta
  CHECK(sparsity::sparsity_index(0.3, 1000, 2) > sparsity::sparsity_index(0.3, 10, 2));
}

TEST_CASE("forecast matches experimental sparsity in the unit ball") {
  for (int d : {2, 3}) {
    const int n = 1500;
    const PointSet pts = sample_unit_ball(n, d, 23);
    for (double theta : {0.2, 0.5, 1.0}) {
      const auto pairs = neighbors_within(pts, theta);
      const double exp_sparsity =
          1.0 - (n + 2.0 * static_cast<double>(pairs.size())) / (static_cast<double>(n) * n);
      CHECK(sparsity::sparsity_index(theta, n, d) == doctest::Approx(exp_sparsity).epsilon(0.03));
    }
  }
}

TEST_CASE("1D convention: theta_norm = 2 theta / length") {
  BoxDomain seg{1, {10.0, 1.0, 1.0}};
  CHECK(sparsity::equivalent_theta(1.0, seg) == doctest::Approx(0.2));
}
