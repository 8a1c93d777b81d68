#include "htsim/sparsity.hpp"

#include <cmath>
#include <stdexcept>

#include "htsim/specfun.hpp"

namespace htsim::sparsity {

double distance_cdf(int dim, double r) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("distance_cdf: dim must be 1-3");
  if (r <= 0.0) return 0.0;
  if (r >= 2.0) return 1.0;
  const double a = (dim + 1) / 2.0;
  const double q = r * r / 4.0;
  return std::pow(r, dim) * specfun::regularized_inc_beta(1.0 - q, a, 0.5) +
         specfun::regularized_inc_beta(q, a, a);
}

double sparsity_index(double theta_norm, int n, int dim) {
  if (n < 1) throw std::invalid_argument("sparsity_index: n must be >= 1");
  const double f = distance_cdf(dim, theta_norm);
  return 1.0 - f - (1.0 - f) / n;
}

double equivalent_theta(double taper_range, const BoxDomain& domain) {
  if (!(taper_range > 0.0)) throw std::invalid_argument("equivalent_theta: range must be > 0");
  domain.validate();
  const double measure = domain.measure();
  switch (domain.dim) {
    case 1:
      // equal-length segment: the radius-1 interval has length 2
      return 2.0 * taper_range / measure;
    case 2:
      return taper_range * std::sqrt(M_PI) / std::sqrt(measure);
    case 3:
      return taper_range * std::cbrt(4.0 * M_PI / 3.0) / std::cbrt(measure);
  }
  return 0.0;
}

SparsityForecast forecast(const Taper& taper, const BoxDomain& domain, int n) {
  taper.validate();
  SparsityForecast f;
  f.dim = domain.dim;
  f.n = n;
  f.theta_norm = equivalent_theta(taper.theta, domain);
  f.cdf = distance_cdf(domain.dim, f.theta_norm);
  f.index = sparsity_index(f.theta_norm, n, domain.dim);
  return f;
}

}  // namespace htsim::sparsity
