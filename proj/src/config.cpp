#include "htsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "htsim/covmodel.hpp"

namespace htsim {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const char* taper_family_name(TaperFamily f) {
  switch (f) {
    case TaperFamily::Spherical: return "spherical";
    case TaperFamily::Cubic: return "cubic";
    case TaperFamily::Penta: return "penta";
    case TaperFamily::Bohman: return "bohman";
    case TaperFamily::Wendland0: return "wendland0";
    case TaperFamily::Wendland1: return "wendland1";
    case TaperFamily::Wendland2: return "wendland2";
  }
  return "?";
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "mse_sweep") return ExperimentKind::MseSweep;
  if (name == "sparsity_curve") return ExperimentKind::SparsityCurve;
  if (name == "profile_1d") return ExperimentKind::Profile1D;
  if (name == "connectivity_2d") return ExperimentKind::Connectivity2D;
  if (name == "transit_2d") return ExperimentKind::Transit2D;
  if (name == "connectivity_3d") return ExperimentKind::Connectivity3D;
  throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::MseSweep: return "mse_sweep";
    case ExperimentKind::SparsityCurve: return "sparsity_curve";
    case ExperimentKind::Profile1D: return "profile_1d";
    case ExperimentKind::Connectivity2D: return "connectivity_2d";
    case ExperimentKind::Transit2D: return "transit_2d";
    case ExperimentKind::Connectivity3D: return "connectivity_3d";
  }
  return "?";
}

ExperimentConfig ExperimentConfig::defaults_for(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::MseSweep:
      c.cov = parse_covariance("exponential(range=1,sill=1)");
      c.taper_family = TaperFamily::Spherical;
      c.domain = {2, {1.0, 1.0, 1.0}};
      c.n_data = 400;
      c.n_samples = 50;
      c.theta_ratios = {0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0};
      break;
    case ExperimentKind::SparsityCurve:
      c.domain = {2, {1.0, 1.0, 1.0}};
      c.n_data = 2000;
      c.theta_ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
      break;
    case ExperimentKind::Profile1D: {
      // 100 regularly spaced points; exponential effective range = 1/3 of
      // the profile length
      c.grid = {1, {0, 0, 0}, {1, 1, 1}, {100, 1, 1}};
      const double length = 99.0;
      c.cov = CovarianceSpec{CovFamily::Exponential, 1.0, length / 9.0};
      c.taper_family = TaperFamily::Spherical;
      c.n_data = 10;
      c.n_real = 500;
      c.n_samples = 1;
      c.theta_ratios = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
      break;
    }
    case ExperimentKind::Connectivity2D:
    case ExperimentKind::Transit2D: {
      // Matern nu=1 with effective range = half the simulated length
      c.grid = {2, {0, 0, 0}, {1, 1, 1}, {50, 50, 1}};
      CovarianceSpec base{CovFamily::Matern, 1.0, 1.0, 1.0};
      const double unit_eff = effective_range(base);
      base.range = 0.5 * 49.0 / unit_eff;
      c.cov = base;
      c.taper_family = TaperFamily::Wendland1;
      c.n_data = 100;
      c.n_real = 10;
      c.n_samples = 10;
      c.proportion = 0.3;
      c.theta_ratios = {0.25, 0.5, 0.75, 1.0};
      break;
    }
    case ExperimentKind::Connectivity3D: {
      // desk-scale 30^3 stand-in for the 50^3 grid over a side-50 cube
      c.grid = {3, {0, 0, 0}, {50.0 / 29, 50.0 / 29, 50.0 / 29}, {30, 30, 30}};
      c.cov = CovarianceSpec{CovFamily::Exponential, 1.0, (50.0 / 3.0) / 3.0};
      c.taper_family = TaperFamily::Spherical;
      c.n_data = 100;
      c.n_real = 8;
      c.n_samples = 8;
      c.proportion = 0.2;
      // one ratio keeps the sparse tapered factorization count down; the
      // 30^3 parent factorization already dominates the run
      c.theta_ratios = {0.25};
      break;
    }
  }
  return c;
}

void ExperimentConfig::apply_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  if (key == "covariance") {
    cov = parse_covariance(value);
  } else if (key == "taper_family") {
    taper_family = parse_taper(value + "(theta=1)").family;
  } else if (key == "theta_ratios") {
    theta_ratios.clear();
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ';')) theta_ratios.push_back(std::stod(tok));
  } else if (key == "n_data") {
    n_data = std::stoi(value);
  } else if (key == "n_real") {
    n_real = std::stoi(value);
  } else if (key == "n_samples") {
    n_samples = std::stoi(value);
  } else if (key == "proportion") {
    proportion = std::stod(value);
  } else if (key == "seed") {
    seed = std::stoull(value);
  } else if (key == "workers") {
    workers = std::stoi(value);
  } else if (key == "out_dir") {
    out_dir = value;
  } else if (key == "grid_counts") {
    std::stringstream ss(value);
    std::string tok;
    int a = 0;
    while (std::getline(ss, tok, ';') && a < 3) grid.counts[a++] = std::stoi(tok);
  } else if (key == "grid_spacing") {
    std::stringstream ss(value);
    std::string tok;
    int a = 0;
    while (std::getline(ss, tok, ';') && a < 3) grid.spacing[a++] = std::stod(tok);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path,
                                                  const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json j;
  in >> j;
  ExperimentConfig c = defaults_for(parse_experiment_kind(j.at("experiment").get<std::string>()));
  if (j.contains("covariance")) c.cov = parse_covariance(j["covariance"].get<std::string>());
  if (j.contains("taper_family"))
    c.taper_family = parse_taper(j["taper_family"].get<std::string>() + "(theta=1)").family;
  if (j.contains("theta_ratios")) c.theta_ratios = j["theta_ratios"].get<std::vector<double>>();
  if (j.contains("n_data")) c.n_data = j["n_data"].get<int>();
  if (j.contains("n_real")) c.n_real = j["n_real"].get<int>();
  if (j.contains("n_samples")) c.n_samples = j["n_samples"].get<int>();
  if (j.contains("proportion")) c.proportion = j["proportion"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("counts")) {
      auto v = g["counts"].get<std::vector<int>>();
      for (size_t a = 0; a < v.size() && a < 3; ++a) c.grid.counts[a] = v[a];
    }
    if (g.contains("spacing")) {
      auto v = g["spacing"].get<std::vector<double>>();
      for (size_t a = 0; a < v.size() && a < 3; ++a) c.grid.spacing[a] = v[a];
    }
  }
  for (const auto& kv : overrides) c.apply_override(kv);
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  cov.validate();
  if (theta_ratios.empty()) throw std::invalid_argument("config: theta_ratios is empty");
  for (double r : theta_ratios)
    if (!(r > 0.0)) throw std::invalid_argument("config: theta ratios must be positive");
  if (n_data < 1) throw std::invalid_argument("config: n_data must be >= 1");
  if (n_real < 0) throw std::invalid_argument("config: n_real must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("config: n_samples must be >= 1");
  if (!(proportion > 0.0 && proportion < 1.0))
    throw std::invalid_argument("config: proportion must be in (0,1)");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (kind != ExperimentKind::MseSweep && kind != ExperimentKind::SparsityCurve)
    grid.validate();
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = to_string(kind);
  j["covariance"] = htsim::to_string(cov);
  j["taper_family"] = taper_family_name(taper_family);
  j["theta_ratios"] = theta_ratios;
  j["grid"] = {{"dim", grid.dim},
               {"counts", {grid.counts[0], grid.counts[1], grid.counts[2]}},
               {"spacing", {grid.spacing[0], grid.spacing[1], grid.spacing[2]}}};
  j["n_data"] = n_data;
  j["n_real"] = n_real;
  j["n_samples"] = n_samples;
  j["proportion"] = proportion;
  j["seed"] = seed;
  return j.dump();
}

std::string ExperimentConfig::digest() const {
  std::ostringstream os;
  os << std::hex << fnv1a(to_json());
  return os.str();
}

std::string csv_header_comment(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# " << kVersion << "\n# digest=" << cfg.digest() << "\n";
  return os.str();
}

}  // namespace htsim
