#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "htsim/covmodel.hpp"
#include "htsim/field.hpp"
#include "htsim/kriging.hpp"
#include "htsim/linalg.hpp"

namespace htsim {

enum class ConditioningMode { F, T, HT };

const char* mode_name(ConditioningMode m);

// Reusable L factor of the covariance at a fixed site set; one draw is a
// single lower-triangular multiply against a fresh normal vector.
class GaussianSampler {
 public:
  GaussianSampler(const CovarianceSpec& cov, const PointSet& sites);
  // prefer_sparse: use the sparse factor when the taper support makes the
  // matrix sparse enough for a simplicial factorization to pay off
  GaussianSampler(const TaperedCovariance& tc, const PointSet& sites,
                  bool prefer_sparse = true);

  Eigen::VectorXd draw(Rng& rng) const;
  long n() const { return factor_.n(); }
  const CholFactor& factor() const { return factor_; }

 private:
  CholFactor factor_;
};

// One-shot unconditional simulation at the stacked site set.
Eigen::VectorXd unconditional(const CovarianceSpec& cov, const PointSet& sites,
                              std::uint64_t seed);
Eigen::VectorXd unconditional(const TaperedCovariance& tc, const PointSet& sites,
                              std::uint64_t seed);

// Joint unconditional realization split into grid part and data-site part.
struct Realization {
  GridSpec grid;
  Eigen::VectorXd grid_values;
  PointSet data_sites;
  Eigen::VectorXd data_site_values;
};

struct ConditionalRealization {
  Eigen::VectorXd grid_values;
  ConditioningMode mode = ConditioningMode::F;
  std::uint64_t seed = 0;
  int sample_id = 0;
  int realization_id = 0;
};

// Post-conditioning operator Z_cs = Z* + (Z_s - Z_s*), built once per
// (data sites, conditioning covariance) and shared across realizations.
class Conditioner {
 public:
  Conditioner(KrigingSystem sys, const PointSet& targets);

  // grid_uncond / data_uncond come from one joint unconditional draw
  Eigen::VectorXd condition(const Eigen::VectorXd& grid_uncond,
                            const Eigen::VectorXd& data_uncond,
                            const Eigen::VectorXd& data_values) const;
  const KrigingSystem& system() const { return sys_; }

 private:
  KrigingSystem sys_;
  Eigen::MatrixXd k_targets_;  // n_targets x n_data
};

ConditionalRealization post_condition(const Realization& u, const Eigen::VectorXd& data_values,
                                      const Conditioner& cond, ConditioningMode mode);

struct EnsembleSpec {
  CovarianceSpec cov0;
  Taper taper;
  GridSpec grid;
  int n_data = 10;       // forced corner/endpoint nodes included in the count
  int n_real = 100;      // scheme A: total; scheme B: per sample
  int n_samples = 1;     // scheme B only
  ConditioningMode mode = ConditioningMode::F;
  std::uint64_t seed = 0;
  // scheme A (new parent + new sample per realization, 1D experiments) vs
  // scheme B (fixed samples, many realizations per sample, 2D/3D)
  bool per_realization_samples = true;
  int workers = 1;  // thread count; sink calls are serialized either way
  // optional precomputed C0 factor at the grid nodes, shared across the
  // F/T/HT runs of one experiment to avoid refactorizing the large matrix
  std::shared_ptr<const GaussianSampler> shared_parent;
};

struct Ensemble {
  std::vector<ConditionalRealization> realizations;
  ConditioningMode mode = ConditioningMode::F;
  GridSpec grid;
  std::string config_digest;
};

// Streaming runner; data sites are grid nodes (forced domain corners /
// endpoints plus a random subset). The sink also receives the parent
// truth values so responses can be compared against the reference field.
struct EnsembleItem {
  const ConditionalRealization& conditional;
  const Eigen::VectorXd& parent_grid_values;
};
void run_ensemble(const EnsembleSpec& spec,
                  const std::function<void(const EnsembleItem&)>& sink);

Ensemble run_ensemble(const EnsembleSpec& spec);

// grid-node data site selection used by run_ensemble: corner/endpoint
// nodes first, then a seeded random subset of interior nodes
std::vector<long> pick_data_nodes(const GridSpec& grid, int n_data, std::uint64_t seed);

// Ensemble export: CSV (realization id, grid index, value) and a raw
// little-endian float64 block with a JSON sidecar header.
void write_ensemble_csv(std::ostream& os, const Ensemble& e);
void write_ensemble_raw(const std::string& path_prefix, const Ensemble& e);

}  // namespace htsim
