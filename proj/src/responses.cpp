#include "htsim/responses.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "htsim/specfun.hpp"

namespace htsim::responses {

double max_consec_diff(const Eigen::VectorXd& profile) {
  if (profile.size() < 2)
    throw std::invalid_argument("max_consec_diff: need at least two points");
  double m = 0.0;
  for (long i = 0; i + 1 < profile.size(); ++i)
    m = std::max(m, std::fabs(profile(i + 1) - profile(i)));
  return m;
}

double profile_length(const Eigen::VectorXd& profile, double dx) {
  if (profile.size() < 2)
    throw std::invalid_argument("profile_length: need at least two points");
  if (!(dx > 0.0)) throw std::invalid_argument("profile_length: dx must be > 0");
  double len = 0.0;
  for (long i = 0; i + 1 < profile.size(); ++i) {
    const double dz = profile(i + 1) - profile(i);
    len += std::sqrt(dx * dx + dz * dz);
  }
  return len;
}

namespace {

// flat union-find with path halving
struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(n) {
    for (long i = 0; i < n; ++i) parent[i] = i;
  }
  long find(long x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(long a, long b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

ConnectivityResult connectivity_full(const Eigen::VectorXd& field, const GridSpec& grid,
                                     double p, bool diagonal_adjacency) {
  grid.validate();
  if (grid.dim < 2 || grid.dim > 3)
    throw std::invalid_argument("connectivity: grid dim must be 2 or 3");
  if (field.size() != grid.node_count())
    throw std::invalid_argument("connectivity: field length does not match grid");
  const double threshold = specfun::std_normal_quantile(p);

  const long n = field.size();
  std::vector<char> permeable(n);
  long n_p = 0;
  for (long i = 0; i < n; ++i) {
    permeable[i] = field(i) <= threshold;
    n_p += permeable[i];
  }
  ConnectivityResult res;
  res.n_permeable = n_p;
  if (n_p == 0) {
    res.empty_phase = true;
    return res;
  }

  // row-major layout: 2D (rows, cols), 3D (c0, c1, c2) with c2 fastest
  UnionFind uf(n);
  if (grid.dim == 2) {
    const long rows = grid.counts[0], cols = grid.counts[1];
    for (long r = 0; r < rows; ++r)
      for (long c = 0; c < cols; ++c) {
        const long i = r * cols + c;
        if (!permeable[i]) continue;
        if (c + 1 < cols && permeable[i + 1]) uf.unite(i, i + 1);
        if (r + 1 < rows && permeable[i + cols]) uf.unite(i, i + cols);
        if (diagonal_adjacency) {
          if (r + 1 < rows && c + 1 < cols && permeable[i + cols + 1]) uf.unite(i, i + cols + 1);
          if (r + 1 < rows && c > 0 && permeable[i + cols - 1]) uf.unite(i, i + cols - 1);
        }
      }
  } else {
    const long n0 = grid.counts[0], n1 = grid.counts[1], n2 = grid.counts[2];
    for (long a = 0; a < n0; ++a)
      for (long b = 0; b < n1; ++b)
        for (long c = 0; c < n2; ++c) {
          const long i = (a * n1 + b) * n2 + c;
          if (!permeable[i]) continue;
          if (c + 1 < n2 && permeable[i + 1]) uf.unite(i, i + 1);
          if (b + 1 < n1 && permeable[i + n2]) uf.unite(i, i + n2);
          if (a + 1 < n0 && permeable[i + n1 * n2]) uf.unite(i, i + n1 * n2);
          if (diagonal_adjacency)
            for (long da = 0; da <= 1; ++da)
              for (long db = -1; db <= 1; ++db)
                for (long dc = -1; dc <= 1; ++dc) {
                  if (da == 0 && db <= 0) continue;  // forward half of the stencil
                  if (da == 0 && db == 0) continue;
                  const long aa = a + da, bb = b + db, cc = c + dc;
                  if (aa < 0 || aa >= n0 || bb < 0 || bb >= n1 || cc < 0 || cc >= n2) continue;
                  if (std::abs(da) + std::abs(db) + std::abs(dc) <= 1) continue;
                  const long j = (aa * n1 + bb) * n2 + cc;
                  if (permeable[j]) uf.unite(i, j);
                }
        }
  }

  std::vector<long> cluster_size(n, 0);
  for (long i = 0; i < n; ++i)
    if (permeable[i]) ++cluster_size[uf.find(i)];
  double sum_sq = 0.0;
  long clusters = 0;
  for (long i = 0; i < n; ++i)
    if (cluster_size[i] > 0) {
      sum_sq += static_cast<double>(cluster_size[i]) * cluster_size[i];
      ++clusters;
    }
  res.g = sum_sq / (static_cast<double>(n_p) * n_p);
  res.n_clusters = clusters;
  return res;
}

double connectivity(const Eigen::VectorXd& field, const GridSpec& grid, double p) {
  return connectivity_full(field, grid, p).g;
}

TransitResult transit_time_full(const Eigen::VectorXd& field, const GridSpec& grid) {
  grid.validate();
  if (grid.dim != 2) throw std::invalid_argument("transit_time: grid must be 2D");
  if (field.size() != grid.node_count())
    throw std::invalid_argument("transit_time: field length does not match grid");
  if (!field.allFinite()) throw std::invalid_argument("transit_time: non-finite field values");

  const long rows = grid.counts[0], cols = grid.counts[1];
  const long n = rows * cols;
  const double dx = grid.spacing[1], dy = grid.spacing[0];
  Eigen::VectorXd slowness = (-field.array()).exp();

  const long start = 0;            // upper-left cell
  const long goal = n - 1;         // bottom-right cell
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<long> prev(n, -1);
  using Item = std::pair<double, long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[start] = 0.0;
  heap.emplace(0.0, start);
  const long dr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const long dc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[i]) continue;
    if (i == goal) break;
    const long r = i / cols, c = i % cols;
    for (int k = 0; k < 8; ++k) {
      const long rr = r + dr[k], cc = c + dc[k];
      if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
      const long j = rr * cols + cc;
      const double step = std::sqrt(static_cast<double>(dr[k] * dr[k]) * dy * dy +
                                    static_cast<double>(dc[k] * dc[k]) * dx * dx);
      const double w = step * 0.5 * (slowness(i) + slowness(j));
      if (dist[i] + w < dist[j]) {
        dist[j] = dist[i] + w;
        prev[j] = i;
        heap.emplace(dist[j], j);
      }
    }
  }
  TransitResult res;
  res.time = dist[goal];
  for (long i = goal; i != -1; i = prev[i]) res.path.push_back(i);
  std::reverse(res.path.begin(), res.path.end());
  return res;
}

double transit_time(const Eigen::VectorXd& field, const GridSpec& grid) {
  return transit_time_full(field, grid).time;
}

}  // namespace htsim::responses
