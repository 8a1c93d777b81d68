#include "htsim/field.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace htsim {

namespace {

constexpr double kMinSepFrac = 1e-9;  // of the domain diameter

int cells_per_axis(int n, int dim) {
  return std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 1.0 / dim) - 1e-9)));
}

void decode_cell(long c, int m, int dim, int* idx) {
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(c % m);
    c /= m;
  }
}

bool well_separated(const Eigen::MatrixXd& coords, int count, const Eigen::RowVectorXd& p,
                    double min_sep) {
  for (int i = 0; i < count; ++i)
    if ((coords.row(i) - p).norm() < min_sep) return false;
  return true;
}

// Cached Cholesky of the Cox log-intensity grid covariance: the factor
// only depends on (dim, covariance, domain), not on the seed.
struct CoxModel {
  Eigen::MatrixXd chol;     // lower factor
  Eigen::MatrixXd centers;  // cell centers, ncells x dim
  std::array<int, 3> counts;
  std::array<double, 3> cell;
};

const CoxModel& cox_model(const CovarianceSpec& cov, const BoxDomain& domain) {
  static std::mutex mu;
  static std::map<std::string, CoxModel> cache;
  std::ostringstream key;
  key << domain.dim << "|" << domain.lengths[0] << "," << domain.lengths[1] << ","
      << domain.lengths[2] << "|" << to_string(cov);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;

  // grid resolution: fine enough for range ~0.3 x side, cheap to factorize
  const int per_axis = domain.dim == 1 ? 512 : (domain.dim == 2 ? 48 : 14);
  CoxModel model;
  long ncells = 1;
  for (int a = 0; a < domain.dim; ++a) {
    model.counts[a] = per_axis;
    model.cell[a] = domain.lengths[a] / per_axis;
    ncells *= per_axis;
  }
  model.centers.resize(ncells, domain.dim);
  int idx[3];
  for (long c = 0; c < ncells; ++c) {
    decode_cell(c, per_axis, domain.dim, idx);
    for (int a = 0; a < domain.dim; ++a)
      model.centers(c, a) = (idx[a] + 0.5) * model.cell[a];
  }
  Eigen::MatrixXd k(ncells, ncells);
  for (long i = 0; i < ncells; ++i) {
    k(i, i) = cov.sill;
    for (long j = 0; j < i; ++j) {
      const double v = cov_value(cov, (model.centers.row(i) - model.centers.row(j)).norm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  k.diagonal().array() += 1e-8 * cov.sill;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cox intensity covariance not positive definite");
  model.chol = llt.matrixL();
  return cache.emplace(key.str(), std::move(model)).first->second;
}

}  // namespace

void BoxDomain::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("domain: dim must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a)
    if (!(lengths[a] > 0.0)) throw std::invalid_argument("domain: extents must be positive");
}

double BoxDomain::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += lengths[a] * lengths[a];
  return std::sqrt(s);
}

double BoxDomain::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim; ++a) m *= lengths[a];
  return m;
}

void GridSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (counts[a] < 1) throw std::invalid_argument("grid: counts must be >= 1");
    if (!(spacing[a] > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
  }
}

long GridSpec::node_count() const {
  long n = 1;
  for (int a = 0; a < dim; ++a) n *= counts[a];
  return n;
}

Eigen::VectorXd GridSpec::node(long index) const {
  Eigen::VectorXd x(dim);
  for (int a = dim - 1; a >= 0; --a) {
    x(a) = origin[a] + spacing[a] * static_cast<double>(index % counts[a]);
    index /= counts[a];
  }
  return x;
}

PointSet GridSpec::nodes() const {
  PointSet ps;
  ps.dim = dim;
  const long n = node_count();
  ps.coords.resize(n, dim);
  for (long i = 0; i < n; ++i) ps.coords.row(i) = node(i).transpose();
  return ps;
}

PointSet draw_sample(const SamplingDesign& design, int n, const BoxDomain& domain,
                     std::uint64_t seed) {
  domain.validate();
  if (n < 1) throw std::invalid_argument("draw_sample: n must be >= 1");
  Rng rng(hash_combine(seed, 0x5a3d));
  const double min_sep = kMinSepFrac * domain.diameter();
  const int dim = domain.dim;

  PointSet ps;
  ps.dim = dim;
  ps.coords.resize(n, dim);

  switch (design.kind) {
    case DesignKind::RegularGrid: {
      const int m = cells_per_axis(n, dim);
      int idx[3];
      for (int i = 0; i < n; ++i) {
        decode_cell(i, m, dim, idx);
        for (int a = 0; a < dim; ++a)
          ps.coords(i, a) = (idx[a] + 0.5) * domain.lengths[a] / m;
      }
      break;
    }
    case DesignKind::RandomStratified: {
      const int m = cells_per_axis(n, dim);
      long ncells = 1;
      for (int a = 0; a < dim; ++a) ncells *= m;
      std::vector<long> cells(ncells);
      std::iota(cells.begin(), cells.end(), 0L);
      if (ncells > n) {  // not a perfect power: drop a random subset of cells
        for (long i = ncells - 1; i > 0; --i)
          std::swap(cells[i], cells[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        cells.resize(n);
        std::sort(cells.begin(), cells.end());
      }
      int idx[3];
      for (int i = 0; i < n; ++i) {
        decode_cell(cells[i], m, dim, idx);
        for (int a = 0; a < dim; ++a)
          ps.coords(i, a) = (idx[a] + rng.uniform()) * domain.lengths[a] / m;
      }
      break;
    }
    case DesignKind::PurelyRandom: {
      for (int i = 0; i < n; ++i) {
        Eigen::RowVectorXd p(dim);
        do {
          for (int a = 0; a < dim; ++a) p(a) = rng.uniform() * domain.lengths[a];
        } while (!well_separated(ps.coords, i, p, min_sep));
        ps.coords.row(i) = p;
      }
      break;
    }
    case DesignKind::CoxProcess: {
      CovarianceSpec cov;
      if (design.cox_cov) {
        cov = *design.cox_cov;
      } else {
        cov.family = CovFamily::Exponential;
        cov.sill = 1.0;
        // practical range 0.3 x side length; exponential effective range is 3a
        cov.range = 0.3 * domain.lengths[0] / 3.0;
      }
      const CoxModel& model = cox_model(cov, domain);
      const long ncells = model.centers.rows();
      Eigen::VectorXd eps(ncells);
      for (long c = 0; c < ncells; ++c) eps(c) = rng.normal();
      const Eigen::VectorXd z = model.chol.triangularView<Eigen::Lower>() * eps;
      std::vector<double> cum(ncells);
      double total = 0.0;
      for (long c = 0; c < ncells; ++c) {
        total += std::exp(z(c));
        cum[c] = total;
      }
      for (int i = 0; i < n; ++i) {
        Eigen::RowVectorXd p(dim);
        do {
          const double u = rng.uniform() * total;
          const long c = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
          for (int a = 0; a < dim; ++a)
            p(a) = model.centers(c, a) + (rng.uniform() - 0.5) * model.cell[a];
        } while (!well_separated(ps.coords, i, p, min_sep));
        ps.coords.row(i) = p;
      }
      break;
    }
  }
  return ps;
}

PointSet sample_unit_ball(int n, int dim, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_unit_ball: n must be >= 1");
  if (dim < 1 || dim > 3) throw std::invalid_argument("sample_unit_ball: dim must be 1-3");
  Rng rng(hash_combine(seed, 0xba11));
  PointSet ps;
  ps.dim = dim;
  ps.coords.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    double r2;
    Eigen::RowVectorXd p(dim);
    do {  // rejection from the bounding cube
      r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        p(a) = rng.uniform(-1.0, 1.0);
        r2 += p(a) * p(a);
      }
    } while (r2 > 1.0);
    ps.coords.row(i) = p;
  }
  return ps;
}

std::vector<double> random_disk_pairs(long n_pairs, int dim, std::uint64_t seed) {
  if (n_pairs < 1) throw std::invalid_argument("random_disk_pairs: n_pairs must be >= 1");
  Rng rng(hash_combine(seed, 0xd15c));
  std::vector<double> out;
  out.reserve(n_pairs);
  double p[2][3];
  for (long k = 0; k < n_pairs; ++k) {
    for (int which = 0; which < 2; ++which) {
      double r2;
      do {
        r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          p[which][a] = rng.uniform(-1.0, 1.0);
          r2 += p[which][a] * p[which][a];
        }
      } while (r2 > 1.0);
    }
    double d2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double d = p[0][a] - p[1][a];
      d2 += d * d;
    }
    out.push_back(std::sqrt(d2));
  }
  return out;
}

std::vector<NeighborPair> neighbors_within(const PointSet& points, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("neighbors_within: radius must be > 0");
  const int n = points.n();
  const int dim = points.dim;

  // uniform binning with cell size = radius
  Eigen::RowVectorXd lo = points.coords.colwise().minCoeff();
  std::array<long, 3> counts{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    const double extent = points.coords.col(a).maxCoeff() - lo(a);
    counts[a] = std::max(1L, static_cast<long>(std::floor(extent / radius)) + 1);
  }
  auto cell_of = [&](int i) {
    long c = 0;
    for (int a = 0; a < dim; ++a) {
      long k = static_cast<long>(std::floor((points.coords(i, a) - lo(a)) / radius));
      k = std::clamp(k, 0L, counts[a] - 1);
      c = c * counts[a] + k;
    }
    return c;
  };
  long ncells = 1;
  for (int a = 0; a < dim; ++a) ncells *= counts[a];
  std::vector<std::vector<int>> bins(ncells);
  for (int i = 0; i < n; ++i) bins[cell_of(i)].push_back(i);

  std::vector<NeighborPair> pairs;
  std::array<long, 3> idx{0, 0, 0};
  for (long c = 0; c < ncells; ++c) {
    if (bins[c].empty()) continue;
    long rem = c;
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = rem % counts[a];
      rem /= counts[a];
    }
    // visit this cell and all neighbor cells with offset in {-1,0,1}^dim
    std::array<long, 3> off{-1, -1, -1};
    for (int a = dim; a < 3; ++a) off[a] = 0;
    while (true) {
      bool ok = true;
      long nc = 0;
      for (int a = 0; a < dim; ++a) {
        const long k = idx[a] + off[a];
        if (k < 0 || k >= counts[a]) { ok = false; break; }
        nc = nc * counts[a] + k;
      }
      if (ok && nc >= c) {
        for (int i : bins[c])
          for (int j : bins[nc]) {
            if (nc == c && j <= i) continue;
            const double d = points.distance(std::min(i, j), std::max(i, j));
            if (d < radius)
              pairs.push_back({std::min(i, j), std::max(i, j), d});
          }
      }
      int a = dim - 1;
      while (a >= 0 && off[a] == 1) off[a--] = -1;
      if (a < 0) break;
      ++off[a];
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const NeighborPair& a, const NeighborPair& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return pairs;
}

void write_points_csv(std::ostream& os, const PointSet& points,
                      const std::vector<double>* values) {
  static const char* kAxes[] = {"x", "y", "z"};
  for (int a = 0; a < points.dim; ++a) os << (a ? "," : "") << kAxes[a];
  if (values) os << ",value";
  os << "\n";
  os.precision(17);
  for (int i = 0; i < points.n(); ++i) {
    for (int a = 0; a < points.dim; ++a) os << (a ? "," : "") << points.coords(i, a);
    if (values) os << "," << (*values)[i];
    os << "\n";
  }
}

PointSet read_points_csv(std::istream& is, std::vector<double>* values) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("points csv: empty input");
  const long ncols = std::count(line.begin(), line.end(), ',') + 1;
  const bool has_value = line.find("value") != std::string::npos;
  const int dim = static_cast<int>(ncols) - (has_value ? 1 : 0);
  if (dim < 1 || dim > 3) throw std::invalid_argument("points csv: bad header");
  std::vector<std::array<double, 3>> rows;
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::array<double, 3> row{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      if (!std::getline(ss, tok, ',')) throw std::invalid_argument("points csv: short row");
      row[a] = std::stod(tok);
    }
    if (has_value) {
      if (!std::getline(ss, tok, ',')) throw std::invalid_argument("points csv: missing value");
      vals.push_back(std::stod(tok));
    }
    rows.push_back(row);
  }
  PointSet ps;
  ps.dim = dim;
  ps.coords.resize(rows.size(), dim);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int a = 0; a < dim; ++a) ps.coords(i, a) = rows[i][a];
  if (values) *values = std::move(vals);
  return ps;
}

}  // namespace htsim
