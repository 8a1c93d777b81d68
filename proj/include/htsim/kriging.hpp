#pragma once

#include <variant>

#include "htsim/covmodel.hpp"
#include "htsim/field.hpp"
#include "htsim/linalg.hpp"

namespace htsim {

// Simple-kriging system: assembled and factorized once, reusable for many
// targets and right-hand sides.
struct KrigingSystem {
  PointSet points;
  std::variant<CovarianceSpec, TaperedCovariance> model;
  CholFactor factor;
  double sill = 1.0;

  double model_value(double r) const;
  // covariance vector k(x) between the target and the data sites
  Eigen::VectorXd k_vector(const Eigen::VectorXd& x) const;
};

KrigingSystem build_system(const CovarianceSpec& cov, const PointSet& points);
// sparse_if_tapered selects the sparse assembly/factorization path
KrigingSystem build_system(const TaperedCovariance& tc, const PointSet& points,
                           bool sparse_if_tapered = true);

Eigen::VectorXd weights(const KrigingSystem& sys, const Eigen::VectorXd& x);

double kriging_variance(const KrigingSystem& sys, const Eigen::VectorXd& x);

// MSE(x, C1) of Eq.-(3) form: prediction with plug-in covariance C1 while
// the field truly follows C0 (sys0). K0 * lambda1 is streamed row by row.
double plugin_mse(const KrigingSystem& sys0, const KrigingSystem& sys1,
                  const Eigen::VectorXd& x);

struct MseReport {
  Eigen::VectorXd target;
  double sk_var_c0 = 0.0;   // sigma^2_k under C0
  double sk_var_c1 = 0.0;   // sigma^2_k under C1
  double mse_plugin = 0.0;  // MSE(x, C1)
  double delta = 0.0;       // MSE(x, C1) - MSE(x, C0)
  double mses_f = 0.0;      // 2 sigma^2_{k,C0}
  double mses_t = 0.0;      // MSE(x,C1) + sigma^2_{k,C1}
  double mses_ht = 0.0;     // 2 MSE(x,C1)
  double ratio_t = 0.0;     // mses_t / mses_f
  double ratio_ht = 0.0;    // mses_ht / mses_f
  bool plugin_exceeds_c1_variance = false;  // rare, flagged not fatal
};

MseReport mse_report(const KrigingSystem& sys0, const KrigingSystem& sys1,
                     const Eigen::VectorXd& x);
MseReport mse_report(const CovarianceSpec& cov0, const Taper& taper, const PointSet& points,
                     const Eigen::VectorXd& x);

// one CSV row per target: theta_ratio, ratio_t, ratio_ht (figure subtitles)
void write_mse_report_row(std::ostream& os, double theta_ratio, const MseReport& rep);

}  // namespace htsim
