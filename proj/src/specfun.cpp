#include "htsim/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "htsim/rng.hpp"

namespace htsim::specfun {

namespace {

// Lentz continued fraction for the incomplete beta (Numerical Recipes betacf).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_inc_beta(double z, double a, double b) {
  if (!(z >= 0.0 && z <= 1.0) || !(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_inc_beta: need 0<=z<=1, a>0, b>0");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(z) + b * std::log1p(-z);
  const double front = std::exp(ln_front);
  if (z < (a + 1.0) / (a + b + 2.0))
    return front * betacf(a, b, z) / a;
  return 1.0 - front * betacf(b, a, 1.0 - z) / b;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("std_normal_quantile: p must be in (0,1)");

  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = std_normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

double bessel_j_threehalves(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_j_threehalves: x must be > 0");
  double core;  // sin(x)/x - cos(x)
  if (x < 0.5) {
    const double x2 = x * x;
    core = x2 / 3.0 - x2 * x2 / 30.0 + x2 * x2 * x2 / 840.0;
  } else {
    core = std::sin(x) / x - std::cos(x);
  }
  return std::sqrt(2.0 / (M_PI * x)) * core;
}

namespace {

// K0, K1 via Abramowitz & Stegun 9.8.5-9.8.8 polynomial fits.
double bessel_k0(double x) {
  if (x <= 2.0) {
    const double y = x * x / 4.0;
    const double t = (x / 3.75) * (x / 3.75);  // the I0 series uses x/3.75
    const double i0 = 1.0 + t * (3.5156229 + t * (3.0899424 + t * (1.2067492 +
                      t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))));
    return -std::log(x / 2.0) * i0 +
           (-0.57721566 + y * (0.42278420 + y * (0.23069756 + y * (0.3488590e-1 +
            y * (0.262698e-2 + y * (0.10750e-3 + y * 0.74e-5))))));
  }
  const double y = 2.0 / x;
  return std::exp(-x) / std::sqrt(x) *
         (1.25331414 + y * (-0.7832358e-1 + y * (0.2189568e-1 + y * (-0.1062446e-1 +
          y * (0.587872e-2 + y * (-0.251540e-2 + y * 0.53208e-3))))));
}

double bessel_k1(double x) {
  if (x <= 2.0) {
    const double y = x * x / 4.0;
    const double t = (x / 3.75) * (x / 3.75);  // the I1 series uses x/3.75
    const double i1 = x * (0.5 + t * (0.87890594 + t * (0.51498869 + t * (0.15084934 +
                      t * (0.2658733e-1 + t * (0.301532e-2 + t * 0.32411e-3))))));
    return std::log(x / 2.0) * i1 +
           (1.0 / x) * (1.0 + y * (0.15443144 + y * (-0.67278579 + y * (-0.18156897 +
            y * (-0.1919402e-1 + y * (-0.110404e-2 + y * (-0.4686e-4)))))));
  }
  const double y = 2.0 / x;
  return std::exp(-x) / std::sqrt(x) *
         (1.25331414 + y * (0.23498619 + y * (-0.3655620e-1 + y * (0.1504268e-1 +
          y * (-0.780353e-2 + y * (0.325614e-2 + y * (-0.68245e-3)))))));
}

}  // namespace

double bessel_k(double order, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_k: x must be > 0");
  double nu = std::fabs(order);  // K_{-nu} = K_nu
  const double twice = 2.0 * nu;
  const double twice_round = std::round(twice);
  if (std::fabs(twice - twice_round) > 1e-12)
    throw std::invalid_argument("bessel_k: order must be an integer or half-integer");

  const long k2 = static_cast<long>(twice_round);
  if (k2 % 2 == 1) {
    // half-integer family: closed form K_{1/2}, upward recurrence
    double km = std::sqrt(M_PI / (2.0 * x)) * std::exp(-x);  // K_{1/2}
    if (k2 == 1) return km;
    double kc = km * (1.0 + 1.0 / x);  // K_{3/2}
    double v = 1.5;
    while (v < nu - 0.25) {
      const double kn = km + (2.0 * v / x) * kc;
      km = kc;
      kc = kn;
      v += 1.0;
    }
    return kc;
  }
  const long n = k2 / 2;
  if (n == 0) return bessel_k0(x);
  if (n == 1) return bessel_k1(x);
  double km = bessel_k0(x);
  double kc = bessel_k1(x);
  for (long j = 1; j < n; ++j) {
    const double kn = km + (2.0 * j / x) * kc;
    km = kc;
    kc = kn;
  }
  return kc;
}

double kolmogorov_sf(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("kolmogorov_sf: x must be >= 0");
  if (x < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100000; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  const double q = 2.0 * sum;
  return std::min(1.0, std::max(0.0, q));
}

}  // namespace htsim::specfun

namespace htsim {

double Rng::normal() { return specfun::std_normal_quantile(uniform()); }

}  // namespace htsim
