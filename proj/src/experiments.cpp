#include "htsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "htsim/responses.hpp"

namespace htsim::experiments {

namespace {

struct RefCov {
  std::string name;
  CovarianceSpec spec;
};

// Reference grid of the MSE-ratio sweep: unit range or unit effective range.
std::vector<RefCov> reference_covariances() {
  CovarianceSpec matern{CovFamily::Matern, 1.0, 1.0, 1.0};
  matern.range = 1.0 / effective_range(matern);
  return {
      {"spherical", {CovFamily::Spherical, 1.0, 1.0}},
      {"exponential", {CovFamily::Exponential, 1.0, 1.0 / 3.0}},
      {"cubic", {CovFamily::Cubic, 1.0, 1.0}},
      {"matern1", matern},
  };
}

const std::vector<std::pair<std::string, TaperFamily>> kSweepTapers = {
    {"spherical", TaperFamily::Spherical}, {"cubic", TaperFamily::Cubic},
    {"penta", TaperFamily::Penta},         {"bohman", TaperFamily::Bohman},
    {"wendland1", TaperFamily::Wendland1},
};

Eigen::VectorXd box_center(const BoxDomain& domain) {
  Eigen::VectorXd x(domain.dim);
  for (int a = 0; a < domain.dim; ++a) x(a) = domain.lengths[a] / 2.0;
  return x;
}

Eigen::VectorXd grid_center(const GridSpec& grid) {
  Eigen::VectorXd x(grid.dim);
  for (int a = 0; a < grid.dim; ++a)
    x(a) = grid.origin[a] + grid.spacing[a] * (grid.counts[a] - 1) / 2.0;
  return x;
}

// fraction of exactly-zero entries of the tapered matrix at range theta
double experimental_sparsity(const PointSet& pts, double theta) {
  const auto pairs = neighbors_within(pts, theta);
  const double n = static_cast<double>(pts.n());
  return 1.0 - (n + 2.0 * static_cast<double>(pairs.size())) / (n * n);
}

const char* verdict_name(TailVerdict v) {
  switch (v) {
    case TailVerdict::Yes: return "yes";
    case TailVerdict::No: return "no";
    case TailVerdict::Unknown: return "unknown";
  }
  return "?";
}

}  // namespace

void mse_sweep(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  const auto covs = reference_covariances();
  const auto& thetas = cfg.theta_ratios;  // unit effective range: ratio == theta

  os << csv_header_comment(cfg);
  os << "covariance,taper,theta_ratio,mean_ratio\n";
  os << std::setprecision(10);

  for (const auto& rc : covs) {
    // sum of plug-in MSEs / sum of kriging variances over the samples
    std::map<std::pair<int, int>, double> mse_sum;
    double var0_sum = 0.0;
    for (int s = 0; s < cfg.n_samples; ++s) {
      const PointSet pts = draw_sample({DesignKind::RandomStratified}, cfg.n_data, cfg.domain,
                                       hash_combine(cfg.seed, 0x3a3 + s));
      const Eigen::VectorXd x = box_center(cfg.domain);
      const KrigingSystem sys0 = build_system(rc.spec, pts);
      var0_sum += kriging_variance(sys0, x);
      for (int t = 0; t < static_cast<int>(kSweepTapers.size()); ++t)
        for (int k = 0; k < static_cast<int>(thetas.size()); ++k) {
          const TaperedCovariance c1{rc.spec, {kSweepTapers[t].second, thetas[k]}};
          const KrigingSystem sys1 = build_system(c1, pts, /*sparse_if_tapered=*/false);
          mse_sum[{t, k}] += plugin_mse(sys0, sys1, x);
        }
    }
    for (int t = 0; t < static_cast<int>(kSweepTapers.size()); ++t)
      for (int k = 0; k < static_cast<int>(thetas.size()); ++k)
        os << rc.name << "," << kSweepTapers[t].first << "," << thetas[k] << ","
           << mse_sum[{t, k}] / var0_sum << "\n";
  }
}

void sparsity_table(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  os << csv_header_comment(cfg);
  os << "dim,theta,cdf,s_theory,sparsity_ball,sparsity_regular,sparsity_stratified,"
        "sparsity_random,sparsity_cox\n";
  os << std::setprecision(10);

  const std::array<DesignKind, 4> designs = {DesignKind::RegularGrid,
                                             DesignKind::RandomStratified,
                                             DesignKind::PurelyRandom, DesignKind::CoxProcess};
  for (int dim = 2; dim <= 3; ++dim) {
    // box with the measure of the unit disk / sphere, so physical theta is
    // already on the normalized scale
    const double side = dim == 2 ? std::sqrt(std::numbers::pi)
                                 : std::cbrt(4.0 * std::numbers::pi / 3.0);
    BoxDomain box{dim, {side, side, side}};
    const int n_design = dim == 2 ? 2500 : 3375;  // 50 x 50 and 15^3

    const PointSet ball =
        sample_unit_ball(cfg.n_data, dim, hash_combine(cfg.seed, 0xba11 + dim));
    std::array<PointSet, 4> design_pts;
    for (int d = 0; d < 4; ++d)
      design_pts[d] = draw_sample({designs[d]}, n_design, box,
                                  hash_combine(hash_combine(cfg.seed, 0xde5 + dim), d));

    for (double theta : cfg.theta_ratios) {
      os << dim << "," << theta << "," << sparsity::distance_cdf(dim, theta) << ","
         << sparsity::sparsity_index(theta, cfg.n_data, dim) << ","
         << experimental_sparsity(ball, theta);
      for (int d = 0; d < 4; ++d) os << "," << experimental_sparsity(design_pts[d], theta);
      os << "\n";
    }
  }
}

ForecastReport forecast(const CovarianceSpec& cov, const Taper& taper,
                        const BoxDomain& domain, int n) {
  ForecastReport rep;
  rep.sparsity = sparsity::forecast(taper, domain, n);
  rep.tail = tail_screen(cov, taper);
  std::ostringstream line;
  line << std::setprecision(4) << "cov=" << to_string(cov) << " taper=" << to_string(taper)
       << " theta_norm=" << rep.sparsity.theta_norm << " F_d=" << rep.sparsity.cdf
       << " S=" << rep.sparsity.index << " tail=" << verdict_name(rep.tail.satisfied);
  rep.line = line.str();
  return rep;
}

const std::vector<std::string>& response_names(ExperimentKind kind) {
  static const std::vector<std::string> profile = {"max_slope", "profile_length"};
  static const std::vector<std::string> conn = {"connectivity"};
  static const std::vector<std::string> transit = {"transit_time"};
  static const std::vector<std::string> none = {};
  switch (kind) {
    case ExperimentKind::Profile1D: return profile;
    case ExperimentKind::Connectivity2D:
    case ExperimentKind::Connectivity3D: return conn;
    case ExperimentKind::Transit2D: return transit;
    default: return none;
  }
}

namespace {

std::vector<double> eval_responses(const ExperimentConfig& cfg, const Eigen::VectorXd& v) {
  switch (cfg.kind) {
    case ExperimentKind::Profile1D:
      return {responses::max_consec_diff(v), responses::profile_length(v, cfg.grid.spacing[0])};
    case ExperimentKind::Connectivity2D:
    case ExperimentKind::Connectivity3D:
      return {responses::connectivity(v, cfg.grid, cfg.proportion)};
    case ExperimentKind::Transit2D:
      return {responses::transit_time(v, cfg.grid)};
    default:
      throw std::invalid_argument("run_experiment: not an ensemble experiment kind");
  }
}

// one mode run at a fixed taper: responses in realization order
std::vector<std::vector<double>> run_mode(const ExperimentConfig& cfg, ConditioningMode mode,
                                          double theta,
                                          std::shared_ptr<const GaussianSampler> parent) {
  EnsembleSpec es;
  es.cov0 = cfg.cov;
  es.taper = {cfg.taper_family, theta};
  es.grid = cfg.grid;
  es.n_data = cfg.n_data;
  es.n_real = cfg.n_real;
  es.n_samples = cfg.n_samples;
  es.mode = mode;
  es.seed = cfg.seed;
  es.per_realization_samples = cfg.n_samples <= 1;
  es.workers = cfg.workers;
  es.shared_parent = std::move(parent);

  const size_t n_resp = response_names(cfg.kind).size();
  std::vector<std::pair<int, std::vector<double>>> rows;
  run_ensemble(es, [&](const EnsembleItem& item) {
    rows.emplace_back(item.conditional.realization_id,
                      eval_responses(cfg, item.conditional.grid_values));
  });
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<double>> out(n_resp);
  for (auto& o : out) o.reserve(rows.size());
  for (const auto& [id, vals] : rows)
    for (size_t i = 0; i < n_resp; ++i) out[i].push_back(vals[i]);
  return out;
}

BoxDomain grid_box(const GridSpec& grid) {
  BoxDomain box{grid.dim, {1.0, 1.0, 1.0}};
  for (int a = 0; a < grid.dim; ++a) box.lengths[a] = grid.spacing[a] * (grid.counts[a] - 1);
  return box;
}

void write_cell(std::ostream& responses_os, std::ostream& box_os, const ResponseCell& cell) {
  for (size_t i = 0; i < cell.values.size(); ++i)
    responses_os << cell.response << "," << mode_name(cell.mode) << "," << cell.theta_ratio
                 << "," << i << "," << cell.values[i] << "\n";
  const stats::DistSummary s = stats::summarize(cell.values);
  box_os << cell.response << "," << mode_name(cell.mode) << "," << cell.theta_ratio << ","
         << s.min << "," << s.q1 << "," << s.median << "," << s.q3 << "," << s.max << ","
         << s.whisker_lo << "," << s.whisker_hi << "," << s.outliers.size() << ","
         << cell.values.size() << "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_outputs) {
  cfg.validate();
  const auto& names = response_names(cfg.kind);
  if (names.empty())
    throw std::invalid_argument("run_experiment: not an ensemble experiment kind");
  const double eff = effective_range(cfg.cov);
  const PointSet grid_nodes = cfg.grid.nodes();
  auto parent = std::make_shared<const GaussianSampler>(cfg.cov, grid_nodes);

  std::ofstream responses_os, ks_os, box_os, sub_os;
  if (write_outputs) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string stem = std::string("_") + to_string(cfg.kind) + ".csv";
    const std::string head = csv_header_comment(cfg);
    responses_os.open(fs::path(cfg.out_dir) / ("responses" + stem));
    responses_os << head << "response,mode,theta_ratio,realization,value\n"
                 << std::setprecision(12);
    ks_os.open(fs::path(cfg.out_dir) / ("ks" + stem));
    ks_os << head << "response,theta_ratio,comparison,d_stat,p_value,n1,n2,small_sample\n"
          << std::setprecision(12);
    box_os.open(fs::path(cfg.out_dir) / ("boxplot" + stem));
    box_os << head
           << "response,mode,theta_ratio,min,q1,median,q3,max,whisker_lo,whisker_hi,"
              "n_outliers,n\n"
           << std::setprecision(12);
    sub_os.open(fs::path(cfg.out_dir) / ("subtitles" + stem));
    sub_os << head << "theta_ratio,ratio_t,ratio_ht,sparsity\n" << std::setprecision(12);
  }

  ExperimentResult result;
  const auto f_vals = run_mode(cfg, ConditioningMode::F, eff, parent);
  for (size_t i = 0; i < names.size(); ++i) {
    result.cells.push_back({names[i], ConditioningMode::F, 0.0, f_vals[i]});
    if (write_outputs) write_cell(responses_os, box_os, result.cells.back());
  }

  // data geometry of the first sample, reused for the subtitle diagnostics
  const std::vector<long> data_nodes =
      pick_data_nodes(cfg.grid, cfg.n_data, hash_combine(cfg.seed, 0x700));
  PointSet data_sites;
  data_sites.dim = cfg.grid.dim;
  data_sites.coords.resize(static_cast<long>(data_nodes.size()), cfg.grid.dim);
  for (size_t i = 0; i < data_nodes.size(); ++i)
    data_sites.coords.row(static_cast<long>(i)) = cfg.grid.node(data_nodes[i]).transpose();
  const Eigen::VectorXd center = grid_center(cfg.grid);
  const BoxDomain box = grid_box(cfg.grid);

  for (double ratio : cfg.theta_ratios) {
    const double theta = ratio * eff;
    const auto t_vals = run_mode(cfg, ConditioningMode::T, theta, parent);
    const auto ht_vals = run_mode(cfg, ConditioningMode::HT, theta, parent);
    for (size_t i = 0; i < names.size(); ++i) {
      result.cells.push_back({names[i], ConditioningMode::T, ratio, t_vals[i]});
      if (write_outputs) write_cell(responses_os, box_os, result.cells.back());
      result.cells.push_back({names[i], ConditioningMode::HT, ratio, ht_vals[i]});
      if (write_outputs) write_cell(responses_os, box_os, result.cells.back());

      result.ks.push_back({names[i], ratio, "T_vs_F", stats::ks_two_sample(t_vals[i], f_vals[i])});
      result.ks.push_back(
          {names[i], ratio, "HT_vs_F", stats::ks_two_sample(ht_vals[i], f_vals[i])});
      if (write_outputs)
        for (size_t k = result.ks.size() - 2; k < result.ks.size(); ++k) {
          const KsRow& row = result.ks[k];
          ks_os << row.response << "," << row.theta_ratio << "," << row.comparison << ","
                << row.ks.d_stat << "," << row.ks.p_value << "," << row.ks.n1 << ","
                << row.ks.n2 << "," << (row.ks.small_sample_warning ? 1 : 0) << "\n";
        }
    }

    SubtitleRow sub;
    sub.theta_ratio = ratio;
    sub.mse = mse_report(cfg.cov, Taper{cfg.taper_family, theta}, data_sites, center);
    sub.sparsity = sparsity::forecast({cfg.taper_family, theta}, box,
                                      static_cast<int>(data_nodes.size()))
                       .index;
    result.subtitles.push_back(sub);
    if (write_outputs) {
      sub_os << ratio << "," << sub.mse.ratio_t << "," << sub.mse.ratio_ht << ","
             << sub.sparsity << "\n";
      responses_os.flush();
      ks_os.flush();
      box_os.flush();
      sub_os.flush();
    }
  }
  return result;
}

}  // namespace htsim::experiments
