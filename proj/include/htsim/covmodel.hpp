#pragma once

#include <optional>
#include <string>

namespace htsim {

enum class CovFamily { Exponential, Gaussian, Spherical, Cubic, Penta, Matern, Cauchy };
enum class TaperFamily { Spherical, Cubic, Penta, Bohman, Wendland0, Wendland1, Wendland2 };

// Isotropic covariance C0(h) = sill * phi(h / range).
struct CovarianceSpec {
  CovFamily family = CovFamily::Exponential;
  double sill = 1.0;
  double range = 1.0;
  double nu = 1.0;     // Matern only
  double alpha = 1.0;  // Cauchy only

  void validate() const;
};

// Compactly supported correlation, identically zero for r >= theta.
struct Taper {
  TaperFamily family = TaperFamily::Spherical;
  double theta = 1.0;

  void validate() const;
};

// C1(h) = C0(h) * C_T(h); compact support of radius taper.theta.
struct TaperedCovariance {
  CovarianceSpec base;
  Taper taper;
};

enum class DecayClass { Polynomial, ExponentialRate, GaussianRate };

// Spectral metadata from the model tables: large-frequency decay of the
// R^3 radial density and mean-square differentiability order.
struct SpectralProfile {
  DecayClass decay = DecayClass::Polynomial;
  double exponent = 0.0;   // |exponent| of s^-k decay, Polynomial only
  int smoothness = 0;      // -1 encodes infinite smoothness
};

enum class TailVerdict { Yes, No, Unknown };

struct TailReport {
  TailVerdict satisfied = TailVerdict::Unknown;
  std::string gamma_note;
  SpectralProfile taper_decay;
  SpectralProfile cov_decay;
};

// Correlation phi(r/range) of the covariance family.
double correlation(const CovarianceSpec& spec, double r);

// Taper value at lag r; exactly zero for r >= theta.
double taper_value(const Taper& t, double r);

// sill * correlation(base, r) * taper_value(taper, r)
double tapered_value(const TaperedCovariance& tc, double r);

inline double cov_value(const CovarianceSpec& s, double r) {
  return s.sill * correlation(s, r);
}
inline double cov_value(const TaperedCovariance& tc, double r) {
  return tapered_value(tc, r);
}
inline double sill_of(const CovarianceSpec& s) { return s.sill; }
inline double sill_of(const TaperedCovariance& tc) { return tc.base.sill; }

// Radial spectral densities in R^3 at unit range / unit theta.
// Density for range a is a^3 * f(a*s).
double spectral_density_r3(const CovarianceSpec& spec, double s);
double spectral_density_r3(const Taper& t, double s);

SpectralProfile spectral_profile(const CovarianceSpec& spec);
SpectralProfile spectral_profile(const Taper& t);

// Smallest r with correlation <= 0.05 (practical range).
double effective_range(const CovarianceSpec& spec);

// Qualitative tail-condition screen on the decay-rate columns.
TailReport tail_screen(const CovarianceSpec& cov, const Taper& t);

// CLI model grammar, e.g. "matern(nu=1, range=0.5, sill=1)" and
// "wendland1(theta=0.3)". Case-insensitive family names.
CovarianceSpec parse_covariance(const std::string& text);
Taper parse_taper(const std::string& text);
std::string to_string(const CovarianceSpec& spec);
std::string to_string(const Taper& t);

}  // namespace htsim
