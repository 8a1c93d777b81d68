#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "htsim/config.hpp"
#include "htsim/kriging.hpp"
#include "htsim/simulate.hpp"
#include "htsim/sparsity.hpp"
#include "htsim/stats.hpp"

namespace htsim::experiments {

// Mean plug-in MSE ratio vs taper range for the reference covariance /
// taper grid (spherical, exponential, cubic, Matern-1 against the five
// compact tapers). Emits covariance,taper,theta_ratio,mean_ratio rows.
void mse_sweep(const ExperimentConfig& cfg, std::ostream& os);

// Theoretical S(theta) next to the experimental matrix sparsity for the
// unit disk/sphere and for the four sampling designs on a box of the
// same measure. One row per (dim, theta).
void sparsity_table(const ExperimentConfig& cfg, std::ostream& os);

struct ForecastReport {
  sparsity::SparsityForecast sparsity;
  TailReport tail;
  std::string line;  // the one-line rendition
};

ForecastReport forecast(const CovarianceSpec& cov, const Taper& taper,
                        const BoxDomain& domain, int n);

// One response distribution: a (response, mode, theta_ratio) cell of the
// boxplot figures. F is taper-free, stored with theta_ratio = 0.
struct ResponseCell {
  std::string response;
  ConditioningMode mode = ConditioningMode::F;
  double theta_ratio = 0.0;
  std::vector<double> values;  // realization order
};

struct KsRow {
  std::string response;
  double theta_ratio = 0.0;
  std::string comparison;  // "T_vs_F" or "HT_vs_F"
  stats::KsResult ks;
};

struct SubtitleRow {
  double theta_ratio = 0.0;
  MseReport mse;          // ratio_t / ratio_ht at the domain-center target
  double sparsity = 0.0;  // forecast S(theta) for the conditioning matrix
};

struct ExperimentResult {
  std::vector<ResponseCell> cells;
  std::vector<KsRow> ks;
  std::vector<SubtitleRow> subtitles;
};

// Runs the F ensemble once and the T/HT ensembles per theta-ratio, applies
// the responses of cfg.kind, and (when write_outputs) writes
// responses_<kind>.csv, ks_<kind>.csv, boxplot_<kind>.csv and
// subtitles_<kind>.csv into cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_outputs = true);

const std::vector<std::string>& response_names(ExperimentKind kind);

}  // namespace htsim::experiments
