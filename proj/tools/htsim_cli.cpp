#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "htsim/config.hpp"
#include "htsim/experiments.hpp"
#include "htsim/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
  std::string config_path;
  std::string kind = "profile_1d";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file (defaults used when absent)");
  cmd->add_option("--kind", o.kind, "experiment kind when no config file is given");
  cmd->add_option("--seed", o.seed, "RNG seed override");
  cmd->add_option("--workers", o.workers, "worker thread count");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--set", o.overrides, "config override key=value (repeatable)");
}

htsim::ExperimentConfig load_config(const CommonOpts& o, htsim::ExperimentKind fallback_kind) {
  htsim::ExperimentConfig cfg =
      o.config_path.empty()
          ? htsim::ExperimentConfig::defaults_for(
                o.kind.empty() ? fallback_kind : htsim::parse_experiment_kind(o.kind))
          : htsim::ExperimentConfig::from_json_file(o.config_path, o.overrides);
  if (o.config_path.empty())
    for (const auto& kv : o.overrides) cfg.apply_override(kv);
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const htsim::ExperimentConfig& cfg, const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const fs::path p = fs::path(cfg.out_dir) / name;
  std::ofstream os(p);
  if (!os) throw std::invalid_argument("cannot open output file " + p.string());
  std::cout << p.string() << "\n";
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(htsim::kVersion) +
               " - conditional simulation with covariance tapering"};
  app.require_subcommand(1);

  CommonOpts mse_o, spar_o, exp_o, sim_o;
  auto* mse_cmd = app.add_subcommand("mse-sweep", "prediction MSE ratio vs taper range");
  add_common(mse_cmd, mse_o);
  auto* spar_cmd = app.add_subcommand("sparsity-table", "theoretical vs experimental sparsity");
  add_common(spar_cmd, spar_o);
  auto* exp_cmd = app.add_subcommand("experiment", "F/T/HT ensembles with response diagnostics");
  exp_o.kind.clear();
  add_common(exp_cmd, exp_o);

  std::string fc_cov = "exponential(range=1,sill=1)";
  std::string fc_taper = "spherical(theta=0.3)";
  std::vector<double> fc_lengths{1.0, 1.0};
  int fc_n = 1000;
  auto* fc_cmd = app.add_subcommand("forecast", "sparsity and tail-condition forecast");
  fc_cmd->add_option("--cov", fc_cov, "covariance, e.g. matern(nu=1,range=0.5,sill=1)");
  fc_cmd->add_option("--taper", fc_taper, "taper, e.g. wendland1(theta=0.3)");
  fc_cmd->add_option("--domain", fc_lengths, "box side lengths (1 to 3 values)")
      ->expected(1, 3);
  fc_cmd->add_option("--n", fc_n, "number of data points");

  auto* sim_cmd = app.add_subcommand("simulate", "one-shot conditional ensemble to CSV");
  add_common(sim_cmd, sim_o);
  std::string sim_mode = "F";
  double sim_ratio = 1.0;
  sim_cmd->add_option("--mode", sim_mode, "conditioning mode: F, T or HT");
  sim_cmd->add_option("--theta-ratio", sim_ratio, "taper range / effective range");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mse_cmd) {
      const auto cfg = load_config(mse_o, htsim::ExperimentKind::MseSweep);
      auto os = open_out(cfg, "mse_sweep.csv");
      htsim::experiments::mse_sweep(cfg, os);
    } else if (*spar_cmd) {
      const auto cfg = load_config(spar_o, htsim::ExperimentKind::SparsityCurve);
      auto os = open_out(cfg, "sparsity_table.csv");
      htsim::experiments::sparsity_table(cfg, os);
    } else if (*exp_cmd) {
      const auto cfg = load_config(exp_o, htsim::ExperimentKind::Profile1D);
      htsim::experiments::run_experiment(cfg);
      std::cout << "wrote responses/ks/boxplot/subtitles CSVs to " << cfg.out_dir << "\n";
    } else if (*fc_cmd) {
      htsim::BoxDomain domain{static_cast<int>(fc_lengths.size()), {1.0, 1.0, 1.0}};
      for (size_t a = 0; a < fc_lengths.size(); ++a) domain.lengths[a] = fc_lengths[a];
      const auto rep = htsim::experiments::forecast(htsim::parse_covariance(fc_cov),
                                                    htsim::parse_taper(fc_taper), domain, fc_n);
      std::cout << rep.line << "\n";
    } else if (*sim_cmd) {
      const auto cfg = load_config(sim_o, htsim::ExperimentKind::Profile1D);
      htsim::EnsembleSpec es;
      es.cov0 = cfg.cov;
      const double eff = htsim::effective_range(cfg.cov);
      es.taper = {cfg.taper_family, sim_ratio * eff};
      es.grid = cfg.grid;
      es.n_data = cfg.n_data;
      es.n_real = cfg.n_real;
      es.n_samples = cfg.n_samples;
      es.seed = cfg.seed;
      es.workers = cfg.workers;
      es.per_realization_samples = cfg.n_samples <= 1;
      if (sim_mode == "F") es.mode = htsim::ConditioningMode::F;
      else if (sim_mode == "T") es.mode = htsim::ConditioningMode::T;
      else if (sim_mode == "HT") es.mode = htsim::ConditioningMode::HT;
      else throw std::invalid_argument("unknown mode '" + sim_mode + "'");
      htsim::Ensemble e = htsim::run_ensemble(es);
      e.config_digest = cfg.digest();
      auto os = open_out(cfg, std::string("ensemble_") + htsim::mode_name(es.mode) + ".csv");
      os << htsim::csv_header_comment(cfg);
      htsim::write_ensemble_csv(os, e);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
