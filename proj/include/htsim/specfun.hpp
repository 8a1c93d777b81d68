#pragma once

namespace htsim::specfun {

// Regularized incomplete beta function I_z(a,b), continued-fraction
// evaluation with the symmetry switch at z = (a+1)/(a+b+2).
double regularized_inc_beta(double z, double a, double b);

// Standard normal CDF and its inverse. The quantile is accurate to
// better than 1e-9 over (0,1).
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Bessel function of the first kind of order 3/2,
// J_{3/2}(x) = sqrt(2/(pi x)) (sin x / x - cos x), x > 0.
double bessel_j_threehalves(double x);

// Modified Bessel function of the second kind K_nu(x) for nu restricted
// to nonnegative integers and half-integers, x > 0.
double bessel_k(double order, double x);

// Survival function of the Kolmogorov distribution,
// Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_sf(double x);

}  // namespace htsim::specfun
