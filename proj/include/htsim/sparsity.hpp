#pragma once

#include "htsim/covmodel.hpp"
#include "htsim/field.hpp"

namespace htsim::sparsity {

struct SparsityForecast {
  double theta_norm = 0.0;  // equivalent taper range in the unit disk/sphere
  int n = 0;
  int dim = 0;
  double cdf = 0.0;    // F_d(theta)
  double index = 0.0;  // S(theta)
};

// Deltheil CDF of the distance between two uniform points in the unit
// ball of dimension d; clamped to [0, 2].
double distance_cdf(int dim, double r);

// S(theta) = 1 - F_d(theta) - (1 - F_d(theta)) / n
double sparsity_index(double theta_norm, int n, int dim);

// Equivalent-radius mapping of a physical taper range onto the unit
// disk/sphere of the same measure as the box domain.
double equivalent_theta(double taper_range, const BoxDomain& domain);

SparsityForecast forecast(const Taper& taper, const BoxDomain& domain, int n);

}  // namespace htsim::sparsity
