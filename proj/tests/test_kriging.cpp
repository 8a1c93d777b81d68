#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "htsim/kriging.hpp"
#include "htsim/rng.hpp"

using namespace htsim;

namespace {

PointSet random_points(int n, int dim, std::uint64_t seed) {
  BoxDomain box{dim, {1.0, 1.0, 1.0}};
  return draw_sample({DesignKind::PurelyRandom}, n, box, seed);
}

}  // namespace

TEST_CASE("kriging weights: 3x3 hand-checkable system") {
  // colinear points at 0, 1, 2 with exponential covariance; solve K w = k
  // against an explicit inverse
  PointSet pts;
  pts.dim = 1;
  pts.coords.resize(3, 1);
  pts.coords << 0.0, 1.0, 2.0;
  CovarianceSpec cov{CovFamily::Exponential, 1.0, 1.0};
  const KrigingSystem sys = build_system(cov, pts);
  Eigen::VectorXd x(1);
  x << 0.5;
  const Eigen::VectorXd w = weights(sys, x);
  Eigen::Matrix3d k;
  const double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
  k << 1.0, e1, e2, e1, 1.0, e1, e2, e1, 1.0;
  Eigen::Vector3d rhs(std::exp(-0.5), std::exp(-0.5), std::exp(-1.5));
  const Eigen::Vector3d expect = k.inverse() * rhs;
  CHECK((w - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("kriging is an exact interpolator at data sites") {
  const PointSet pts = random_points(50, 2, 31);
  CovarianceSpec cov{CovFamily::Matern, 2.0, 0.3, 1.5};
  const KrigingSystem sys = build_system(cov, pts);
  for (int i : {0, 7, 49}) {
    const Eigen::VectorXd w = weights(sys, pts.coords.row(i).transpose());
    for (int j = 0; j < pts.n(); ++j)
      CHECK(w(j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-7));
    CHECK(kriging_variance(sys, pts.coords.row(i).transpose()) ==
          doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("kriging variance between sill and zero, far-field limit") {
  const PointSet pts = random_points(30, 2, 32);
  CovarianceSpec cov{CovFamily::Exponential, 1.7, 0.1};
  const KrigingSystem sys = build_system(cov, pts);
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  const double v = kriging_variance(sys, x);
  CHECK(v >= 0.0);
  CHECK(v <= 1.7);
  x << 50.0, 50.0;  // effectively uncorrelated with all data
  CHECK(kriging_variance(sys, x) == doctest::Approx(1.7).epsilon(1e-8));
}

TEST_CASE("plug-in MSE against the quadratic-form oracle") {
  // MSE(x, C1) = sigma0^2 - 2 l1'k0 + l1'K0 l1, assembled explicitly
  const PointSet pts = random_points(40, 2, 33);
  CovarianceSpec cov{CovFamily::Exponential, 1.0, 0.25};
  TaperedCovariance tc{cov, {TaperFamily::Spherical, 0.3}};
  const KrigingSystem sys0 = build_system(cov, pts);
  const KrigingSystem sys1 = build_system(tc, pts, false);
  Eigen::VectorXd x(2);
  x << 0.4, 0.6;
  const Eigen::VectorXd l1 = weights(sys1, x);
  const Eigen::MatrixXd k0m = assemble_dense(cov, pts).values;
  Eigen::VectorXd k0(pts.n());
  for (int i = 0; i < pts.n(); ++i)
    k0(i) = cov_value(cov, (pts.coords.row(i).transpose() - x).norm());
  const double oracle = 1.0 - 2.0 * l1.dot(k0) + l1.dot(k0m * l1);
  CHECK(plugin_mse(sys0, sys1, x) == doctest::Approx(oracle).epsilon(1e-10));
  // and the delta identity (l1 - l0)' K0 (l1 - l0)
  const Eigen::VectorXd l0 = weights(sys0, x);
  const Eigen::VectorXd d = l1 - l0;
  CHECK(plugin_mse(sys0, sys1, x) - kriging_variance(sys0, x) ==
        doctest::Approx(d.dot(k0m * d)).epsilon(1e-8));
}

TEST_CASE("propositions 1 and 2 over random geometries") {
  Rng rng(99);
  for (int rep = 0; rep < 30; ++rep) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    const int n = 5 + static_cast<int>(rng.below(60));
    const PointSet pts = random_points(n, dim, 1000 + rep);
    CovarianceSpec cov{CovFamily::Exponential, 1.0, 0.1 + 0.4 * rng.uniform()};
    const double eff = effective_range(cov);
    TaperedCovariance tc{cov, {TaperFamily::Wendland1, (0.25 + 2.75 * rng.uniform()) * eff}};
    const KrigingSystem sys0 = build_system(cov, pts);
    const KrigingSystem sys1 = build_system(tc, pts, false);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(dim, 0.5);
    CHECK(plugin_mse(sys0, sys1, x) >= kriging_variance(sys0, x) - 1e-9);
    CHECK(kriging_variance(sys1, x) >= kriging_variance(sys0, x) - 1e-9);
  }
}

TEST_CASE("mse report wiring and identities") {
  const PointSet pts = random_points(25, 1, 34);
  CovarianceSpec cov{CovFamily::Exponential, 1.0, 0.2};
  Eigen::VectorXd x(1);
  x << 0.37;
  const MseReport rep = mse_report(cov, {TaperFamily::Spherical, 0.25}, pts, x);
  CHECK(rep.mses_f == doctest::Approx(2.0 * rep.sk_var_c0));
  CHECK(rep.mses_t == doctest::Approx(rep.mse_plugin + rep.sk_var_c1));
  CHECK(rep.mses_ht == doctest::Approx(2.0 * rep.mse_plugin));
  CHECK(rep.ratio_t == doctest::Approx(rep.mses_t / rep.mses_f));
  CHECK(rep.ratio_ht == doctest::Approx(rep.mses_ht / rep.mses_f));
  CHECK(rep.delta == doctest::Approx(rep.mse_plugin - rep.sk_var_c0));
  CHECK(rep.delta >= -1e-12);
  CHECK(rep.ratio_ht >= 1.0 - 1e-9);
}

TEST_CASE("huge taper makes C1 collapse onto C0") {
  const PointSet pts = random_points(30, 2, 35);
  CovarianceSpec cov{CovFamily::Exponential, 1.0, 0.15};
  Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.5);
  const MseReport rep = mse_report(cov, {TaperFamily::Spherical, 1e4}, pts, x);
  CHECK(rep.ratio_t == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.ratio_ht == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(rep.mse_plugin == doctest::Approx(rep.sk_var_c0).epsilon(1e-6));
}

TEST_CASE("sparse and dense kriging weights agree") {
  for (int rep = 0; rep < 10; ++rep) {
    const PointSet pts = random_points(200, 2, 60 + rep);
    TaperedCovariance tc{{CovFamily::Exponential, 1.0, 0.2}, {TaperFamily::Spherical, 0.25}};
    const KrigingSystem dense = build_system(tc, pts, false);
    const KrigingSystem sparse = build_system(tc, pts, true);
    Eigen::VectorXd x(2);
    x << 0.31, 0.59;
    CHECK((weights(dense, x) - weights(sparse, x)).cwiseAbs().maxCoeff() < 1e-8);
  }
}
