#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htsim/covmodel.hpp"
#include "htsim/field.hpp"

namespace htsim {

inline constexpr const char* kVersion = "htsim 0.1.0";

enum class ExperimentKind {
  MseSweep,        // prediction MSE ratio vs taper range
  SparsityCurve,   // theoretical vs experimental sparsity
  Profile1D,       // 1D max slope + profile length
  Connectivity2D,  // 2D g(p)
  Transit2D,       // 2D fastest transit time
  Connectivity3D,  // 3D g(p)
};

ExperimentKind parse_experiment_kind(const std::string& name);
const char* to_string(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Profile1D;
  CovarianceSpec cov;
  TaperFamily taper_family = TaperFamily::Spherical;
  std::vector<double> theta_ratios{0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  GridSpec grid;
  BoxDomain domain;
  int n_data = 10;
  int n_real = 500;     // per sample for the fixed-sample scheme
  int n_samples = 1;    // > 1 selects the fixed-sample scheme
  double proportion = 0.3;  // connectivity threshold proportion
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = ".";

  // populate grid/model defaults for the chosen kind, then apply overrides
  static ExperimentConfig defaults_for(ExperimentKind kind);
  static ExperimentConfig from_json_file(const std::string& path,
                                         const std::vector<std::string>& overrides = {});
  void apply_override(const std::string& key_eq_value);
  void validate() const;

  std::string to_json() const;
  std::string digest() const;  // stable hash of the canonical form + seed
};

// "# htsim <version>\n# digest=<hex>\n" comment header for every output
std::string csv_header_comment(const ExperimentConfig& cfg);

}  // namespace htsim
