#include "htsim/simulate.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "htsim/parallel.hpp"

#include <json.hpp>

namespace htsim {

namespace {

constexpr long kPackedThreshold = 6000;
constexpr double kSparseDensityCutoff = 0.03;

CholFactor factor_for(const CovarianceSpec& cov, const PointSet& sites) {
  cov.validate();
  if (sites.n() > kPackedThreshold) {
    const Eigen::MatrixXd coords = sites.coords;  // owned copy for the generator
    return packed_cholesky(sites.n(), [cov, coords](long i, long j) {
      if (i == j) return cov.sill;
      return cov_value(cov, (coords.row(i) - coords.row(j)).norm());
    });
  }
  return cholesky(assemble_dense(cov, sites));
}

// cheap pair-density estimate from a point subsample
double estimate_pair_density(const PointSet& sites, double radius) {
  const int n = sites.n();
  const int probes = std::min(n, 128);
  long hits = 0;
  for (int p = 0; p < probes; ++p) {
    const int i = static_cast<int>(static_cast<long>(p) * n / probes);
    for (int j = 0; j < n; ++j)
      if (j != i && sites.distance(i, j) < radius) ++hits;
  }
  return static_cast<double>(hits) / (static_cast<double>(probes) * n);
}

CholFactor factor_for(const TaperedCovariance& tc, const PointSet& sites, bool prefer_sparse) {
  tc.base.validate();
  tc.taper.validate();
  const long n = sites.n();
  if (prefer_sparse && estimate_pair_density(sites, tc.taper.theta) < kSparseDensityCutoff)
    return sparse_cholesky(assemble_sparse_tapered(tc, sites));
  if (n > kPackedThreshold) {
    const Eigen::MatrixXd coords = sites.coords;
    return packed_cholesky(n, [tc, coords](long i, long j) {
      if (i == j) return tc.base.sill;
      return cov_value(tc, (coords.row(i) - coords.row(j)).norm());
    });
  }
  return cholesky(assemble_dense(tc, sites));
}

}  // namespace

const char* mode_name(ConditioningMode m) {
  switch (m) {
    case ConditioningMode::F: return "F";
    case ConditioningMode::T: return "T";
    case ConditioningMode::HT: return "HT";
  }
  return "?";
}

GaussianSampler::GaussianSampler(const CovarianceSpec& cov, const PointSet& sites)
    : factor_(factor_for(cov, sites)) {}

GaussianSampler::GaussianSampler(const TaperedCovariance& tc, const PointSet& sites,
                                 bool prefer_sparse)
    : factor_(factor_for(tc, sites, prefer_sparse)) {}

Eigen::VectorXd GaussianSampler::draw(Rng& rng) const {
  Eigen::VectorXd eps(factor_.n());
  for (long i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
  return factor_.mult_lower(eps);
}

Eigen::VectorXd unconditional(const CovarianceSpec& cov, const PointSet& sites,
                              std::uint64_t seed) {
  GaussianSampler sampler(cov, sites);
  Rng rng(seed);
  return sampler.draw(rng);
}

Eigen::VectorXd unconditional(const TaperedCovariance& tc, const PointSet& sites,
                              std::uint64_t seed) {
  GaussianSampler sampler(tc, sites);
  Rng rng(seed);
  return sampler.draw(rng);
}

Conditioner::Conditioner(KrigingSystem sys, const PointSet& targets) : sys_(std::move(sys)) {
  const int n = sys_.points.n();
  k_targets_.resize(targets.n(), n);
  for (int t = 0; t < targets.n(); ++t) {
    const Eigen::VectorXd x = targets.coords.row(t).transpose();
    k_targets_.row(t) = sys_.k_vector(x).transpose();
  }
}

Eigen::VectorXd Conditioner::condition(const Eigen::VectorXd& grid_uncond,
                                       const Eigen::VectorXd& data_uncond,
                                       const Eigen::VectorXd& data_values) const {
  if (data_values.size() != sys_.points.n() || data_uncond.size() != data_values.size())
    throw std::invalid_argument("condition: data vector length mismatch");
  // Z* - Z_s* = k(x)' K^{-1} (Z_n - Z_s,n), shared factor for both krigings
  const Eigen::VectorXd a = sys_.factor.solve(Eigen::VectorXd(data_values - data_uncond));
  return grid_uncond + k_targets_ * a;
}

ConditionalRealization post_condition(const Realization& u, const Eigen::VectorXd& data_values,
                                      const Conditioner& cond, ConditioningMode mode) {
  ConditionalRealization out;
  out.mode = mode;
  out.grid_values = cond.condition(u.grid_values, u.data_site_values, data_values);
  return out;
}

std::vector<long> pick_data_nodes(const GridSpec& grid, int n_data, std::uint64_t seed) {
  grid.validate();
  const long total = grid.node_count();
  // corner nodes (axis index 0 or count-1 on every axis), row-major strides
  std::vector<long> corners;
  const int ncorner = 1 << grid.dim;
  for (int c = 0; c < ncorner; ++c) {
    long idx = 0;
    for (int a = 0; a < grid.dim; ++a) {
      const long k = (c >> a) & 1 ? grid.counts[a] - 1 : 0;
      idx = idx * grid.counts[a] + k;
    }
    corners.push_back(idx);
  }
  std::sort(corners.begin(), corners.end());
  corners.erase(std::unique(corners.begin(), corners.end()), corners.end());
  if (n_data < static_cast<int>(corners.size()))
    throw std::invalid_argument("pick_data_nodes: n_data smaller than the forced corner count");
  if (n_data > total) throw std::invalid_argument("pick_data_nodes: n_data exceeds grid size");

  std::vector<long> nodes = corners;
  Rng rng(hash_combine(seed, 0xda7a));
  while (static_cast<int>(nodes.size()) < n_data) {
    const long cand = static_cast<long>(rng.below(static_cast<std::uint64_t>(total)));
    if (std::find(nodes.begin(), nodes.end(), cand) == nodes.end()) nodes.push_back(cand);
  }
  std::sort(nodes.begin() + corners.size(), nodes.end());
  return nodes;
}

void run_ensemble(const EnsembleSpec& spec,
                  const std::function<void(const EnsembleItem&)>& sink) {
  spec.grid.validate();
  spec.cov0.validate();
  spec.taper.validate();
  if (spec.n_real < 0) throw std::invalid_argument("run_ensemble: n_real must be >= 0");
  if (spec.n_real == 0) return;

  const PointSet grid_nodes = spec.grid.nodes();
  const TaperedCovariance c1{spec.cov0, spec.taper};

  std::shared_ptr<const GaussianSampler> parent_holder = spec.shared_parent;
  if (!parent_holder) parent_holder = std::make_shared<GaussianSampler>(spec.cov0, grid_nodes);
  const GaussianSampler& parent_sampler = *parent_holder;
  if (parent_sampler.n() != grid_nodes.n())
    throw std::invalid_argument("run_ensemble: shared parent sampler size mismatch");
  // F and HT simulate unconditionally under C0; T under C1
  std::optional<GaussianSampler> taper_sampler;
  if (spec.mode == ConditioningMode::T) taper_sampler.emplace(c1, grid_nodes);
  const GaussianSampler& uncond_sampler =
      spec.mode == ConditioningMode::T ? *taper_sampler : parent_sampler;

  const int n_samples = spec.per_realization_samples ? spec.n_real : spec.n_samples;
  const int reals_per_sample = spec.per_realization_samples ? 1 : spec.n_real;

  const long n_nodes = grid_nodes.n();
  constexpr int kBatch = 128;  // draw columns per BLAS-3 pass

  std::mutex sink_mutex;
  for (int s0 = 0; s0 < n_samples; s0 += kBatch) {
    // parent truth fields for a block of samples, one batched L * eps
    const int sw = std::min(kBatch, n_samples - s0);
    Eigen::MatrixXd parent_eps(n_nodes, sw);
    for (int c = 0; c < sw; ++c) {
      Rng rng(hash_combine(hash_combine(spec.seed, 0xbead), static_cast<std::uint64_t>(s0 + c)));
      for (long i = 0; i < n_nodes; ++i) parent_eps(i, c) = rng.normal();
    }
    const Eigen::MatrixXd parents = parent_sampler.factor().mult_lower(parent_eps);

    for (int c = 0; c < sw; ++c) {
      const int s = s0 + c;
      const std::vector<long> data_nodes =
          pick_data_nodes(spec.grid, spec.n_data, hash_combine(spec.seed, 0x700 + s));
      const Eigen::VectorXd parent = parents.col(c);
      Eigen::VectorXd data_values(data_nodes.size());
      for (size_t i = 0; i < data_nodes.size(); ++i) data_values(i) = parent(data_nodes[i]);

      PointSet data_sites;
      data_sites.dim = spec.grid.dim;
      data_sites.coords.resize(data_nodes.size(), spec.grid.dim);
      for (size_t i = 0; i < data_nodes.size(); ++i)
        data_sites.coords.row(i) = spec.grid.node(data_nodes[i]).transpose();

      // conditioning under C0 for F, under C1 (sparse path) for T and HT
      KrigingSystem sys = spec.mode == ConditioningMode::F
                              ? build_system(spec.cov0, data_sites)
                              : build_system(c1, data_sites, /*sparse_if_tapered=*/true);
      const Conditioner cond(std::move(sys), grid_nodes);

      for (int r0 = 0; r0 < reals_per_sample; r0 += kBatch) {
        const int rw = std::min(kBatch, reals_per_sample - r0);
        Eigen::MatrixXd eps(n_nodes, rw);
        std::vector<std::uint64_t> rseeds(rw);
        for (int k = 0; k < rw; ++k) {
          rseeds[k] = hash_combine(hash_combine(hash_combine(spec.seed, 0x5eed), s),
                                   static_cast<std::uint64_t>(r0 + k));
          Rng rng(rseeds[k]);
          for (long i = 0; i < n_nodes; ++i) eps(i, k) = rng.normal();
        }
        const Eigen::MatrixXd zs_block = uncond_sampler.factor().mult_lower(eps);

        parallel_for(rw, spec.workers, [&](long k) {
          const Eigen::VectorXd zs = zs_block.col(k);
          Eigen::VectorXd zs_data(data_nodes.size());
          for (size_t i = 0; i < data_nodes.size(); ++i) zs_data(i) = zs(data_nodes[i]);

          ConditionalRealization cr;
          cr.mode = spec.mode;
          cr.seed = rseeds[k];
          cr.sample_id = s;
          cr.realization_id = s * reals_per_sample + r0 + static_cast<int>(k);
          cr.grid_values = cond.condition(zs, zs_data, data_values);
          std::scoped_lock lk(sink_mutex);
          sink(EnsembleItem{cr, parent});
        });
      }
    }
  }
}

Ensemble run_ensemble(const EnsembleSpec& spec) {
  Ensemble e;
  e.mode = spec.mode;
  e.grid = spec.grid;
  run_ensemble(spec, [&e](const EnsembleItem& item) {
    e.realizations.push_back(item.conditional);
  });
  std::sort(e.realizations.begin(), e.realizations.end(),
            [](const ConditionalRealization& a, const ConditionalRealization& b) {
              return a.realization_id < b.realization_id;
            });
  return e;
}

void write_ensemble_csv(std::ostream& os, const Ensemble& e) {
  os << "realization,grid_index,value\n";
  os.precision(17);
  for (const auto& r : e.realizations)
    for (long i = 0; i < r.grid_values.size(); ++i)
      os << r.realization_id << "," << i << "," << r.grid_values(i) << "\n";
}

void write_ensemble_raw(const std::string& path_prefix, const Ensemble& e) {
  std::ofstream raw(path_prefix + ".f64", std::ios::binary);
  for (const auto& r : e.realizations)
    raw.write(reinterpret_cast<const char*>(r.grid_values.data()),
              static_cast<std::streamsize>(r.grid_values.size() * sizeof(double)));
  nlohmann::json sidecar;
  sidecar["format"] = "little-endian float64, realization-major";
  sidecar["n_realizations"] = e.realizations.size();
  sidecar["n_nodes"] = e.grid.node_count();
  sidecar["mode"] = mode_name(e.mode);
  sidecar["grid"] = {{"dim", e.grid.dim},
                     {"counts", {e.grid.counts[0], e.grid.counts[1], e.grid.counts[2]}},
                     {"spacing", {e.grid.spacing[0], e.grid.spacing[1], e.grid.spacing[2]}},
                     {"origin", {e.grid.origin[0], e.grid.origin[1], e.grid.origin[2]}}};
  sidecar["config_digest"] = e.config_digest;
  std::ofstream side(path_prefix + ".json");
  side << sidecar.dump(2) << "\n";
}

}  // namespace htsim
