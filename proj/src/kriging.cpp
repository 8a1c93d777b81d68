#include "htsim/kriging.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace htsim {

namespace {
constexpr double kNegVarTol = 1e-9;  // times sill
}

double KrigingSystem::model_value(double r) const {
  return std::visit([r](const auto& m) { return cov_value(m, r); }, model);
}

Eigen::VectorXd KrigingSystem::k_vector(const Eigen::VectorXd& x) const {
  const int n = points.n();
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i)
    k(i) = model_value((points.coords.row(i).transpose() - x).norm());
  return k;
}

KrigingSystem build_system(const CovarianceSpec& cov, const PointSet& points) {
  if (points.n() < 1) throw std::invalid_argument("build_system: need at least one point");
  cov.validate();
  return {points, cov, cholesky(assemble_dense(cov, points)), cov.sill};
}

KrigingSystem build_system(const TaperedCovariance& tc, const PointSet& points,
                           bool sparse_if_tapered) {
  if (points.n() < 1) throw std::invalid_argument("build_system: need at least one point");
  tc.base.validate();
  tc.taper.validate();
  CholFactor f = sparse_if_tapered ? sparse_cholesky(assemble_sparse_tapered(tc, points))
                                   : cholesky(assemble_dense(tc, points));
  return {points, tc, std::move(f), tc.base.sill};
}

Eigen::VectorXd weights(const KrigingSystem& sys, const Eigen::VectorXd& x) {
  return sys.factor.solve(sys.k_vector(x));
}

double kriging_variance(const KrigingSystem& sys, const Eigen::VectorXd& x) {
  const Eigen::VectorXd k = sys.k_vector(x);
  const double v = sys.sill - k.dot(sys.factor.solve(k));
  if (v < -kNegVarTol * sys.sill)
    throw std::runtime_error("kriging_variance: negative beyond tolerance");
  return std::max(v, 0.0);
}

double plugin_mse(const KrigingSystem& sys0, const KrigingSystem& sys1,
                  const Eigen::VectorXd& x) {
  const int n = sys0.points.n();
  if (n != sys1.points.n() || (sys0.points.coords - sys1.points.coords).cwiseAbs().maxCoeff() > 0)
    throw std::invalid_argument("plugin_mse: systems must share the same point set");
  const Eigen::VectorXd lambda1 = weights(sys1, x);
  const Eigen::VectorXd k0 = sys0.k_vector(x);
  // quad = lambda1' K0 lambda1 with K0 rows generated on the fly
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = sys0.sill * lambda1(i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      row += sys0.model_value(sys0.points.distance(i, j)) * lambda1(j);
    }
    quad += lambda1(i) * row;
  }
  return sys0.sill - 2.0 * lambda1.dot(k0) + quad;
}

MseReport mse_report(const KrigingSystem& sys0, const KrigingSystem& sys1,
                     const Eigen::VectorXd& x) {
  MseReport rep;
  rep.target = x;
  rep.sk_var_c0 = kriging_variance(sys0, x);
  rep.sk_var_c1 = kriging_variance(sys1, x);
  rep.mse_plugin = plugin_mse(sys0, sys1, x);
  rep.delta = rep.mse_plugin - rep.sk_var_c0;
  rep.mses_f = 2.0 * rep.sk_var_c0;
  rep.mses_t = rep.mse_plugin + rep.sk_var_c1;
  rep.mses_ht = 2.0 * rep.mse_plugin;
  rep.ratio_t = rep.mses_t / rep.mses_f;
  rep.ratio_ht = rep.mses_ht / rep.mses_f;
  rep.plugin_exceeds_c1_variance = rep.mse_plugin > rep.sk_var_c1;
  return rep;
}

MseReport mse_report(const CovarianceSpec& cov0, const Taper& taper, const PointSet& points,
                     const Eigen::VectorXd& x) {
  const KrigingSystem sys0 = build_system(cov0, points);
  const KrigingSystem sys1 = build_system(TaperedCovariance{cov0, taper}, points);
  return mse_report(sys0, sys1, x);
}

void write_mse_report_row(std::ostream& os, double theta_ratio, const MseReport& rep) {
  os << theta_ratio << "," << rep.ratio_t << "," << rep.ratio_ht << "\n";
}

}  // namespace htsim
