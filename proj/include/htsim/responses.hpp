#pragma once

#include <vector>

#include <Eigen/Dense>

#include "htsim/field.hpp"

namespace htsim::responses {

// max_i |z_{i+1} - z_i| along a 1D profile
double max_consec_diff(const Eigen::VectorXd& profile);

// polyline arc length sum_i sqrt(dx^2 + (z_{i+1} - z_i)^2)
double profile_length(const Eigen::VectorXd& profile, double dx);

struct ConnectivityResult {
  double g = 0.0;      // sum n_i^2 / n_p^2, 0 when n_p = 0
  long n_permeable = 0;
  long n_clusters = 0;
  bool empty_phase = false;
};

// Connectivity g(p) of the permeable phase {Z <= Phi^-1(p)} with
// face adjacency (4-neighbor in 2D, 6-neighbor in 3D) by default.
ConnectivityResult connectivity_full(const Eigen::VectorXd& field, const GridSpec& grid,
                                     double p, bool diagonal_adjacency = false);
double connectivity(const Eigen::VectorXd& field, const GridSpec& grid, double p);

struct TransitResult {
  double time = 0.0;
  std::vector<long> path;  // cell indices, start to end
};

// Fastest transit from the upper-left cell to the bottom-right cell of a
// 2D grid: slowness exp(-z), 8-neighbor graph, edge weight =
// step length * mean slowness of the two endpoint cells; Dijkstra.
TransitResult transit_time_full(const Eigen::VectorXd& field, const GridSpec& grid);
double transit_time(const Eigen::VectorXd& field, const GridSpec& grid);

}  // namespace htsim::responses
