#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "htsim/covmodel.hpp"
#include "htsim/rng.hpp"

namespace htsim {

struct BoxDomain {
  int dim = 2;
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  void validate() const;
  double diameter() const;
  double measure() const;
};

// Point locations, one row per point.
struct PointSet {
  int dim = 2;
  Eigen::MatrixXd coords;  // n x dim

  int n() const { return static_cast<int>(coords.rows()); }
  double distance(int i, int j) const {
    return (coords.row(i) - coords.row(j)).norm();
  }
};

struct GridSpec {
  int dim = 2;
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<int, 3> counts{1, 1, 1};

  void validate() const;
  long node_count() const;
  // row-major enumeration: last axis fastest
  Eigen::VectorXd node(long index) const;
  PointSet nodes() const;
};

enum class DesignKind { RegularGrid, RandomStratified, PurelyRandom, CoxProcess };

struct SamplingDesign {
  DesignKind kind = DesignKind::PurelyRandom;
  // log-intensity model for the Cox process; defaults set in draw_sample
  // (exponential covariance, practical range 0.3 x side length).
  std::optional<CovarianceSpec> cox_cov;
};

// Deterministic given the seed. RegularGrid / RandomStratified use a
// ceil(n^(1/d)) per-axis cell grid when n is not a perfect d-th power.
PointSet draw_sample(const SamplingDesign& design, int n, const BoxDomain& domain,
                     std::uint64_t seed);

// i.i.d. distances between pairs of uniform points in the unit ball.
std::vector<double> random_disk_pairs(long n_pairs, int dim, std::uint64_t seed);

// n uniform points in the unit ball of the given dimension.
PointSet sample_unit_ball(int n, int dim, std::uint64_t seed);

struct NeighborPair {
  int i, j;  // i < j
  double distance;
};

// All pairs closer than radius, via uniform cell binning; sorted by (i, j).
std::vector<NeighborPair> neighbors_within(const PointSet& points, double radius);

// CSV with header "x[,y[,z]][,value]".
void write_points_csv(std::ostream& os, const PointSet& points,
                      const std::vector<double>* values = nullptr);
PointSet read_points_csv(std::istream& is, std::vector<double>* values = nullptr);

}  // namespace htsim
