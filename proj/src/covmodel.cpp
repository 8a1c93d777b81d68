#include "htsim/covmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "htsim/specfun.hpp"

namespace htsim {

namespace {

constexpr double kPi = M_PI;

// Compact-support correlation polynomials on normalized lag u in [0,1].
// Shared between the taper table and the spherical/cubic/penta covariances.
double compact_poly(TaperFamily f, double u) {
  if (u >= 1.0) return 0.0;
  const double u2 = u * u;
  switch (f) {
    case TaperFamily::Spherical:
      return 1.0 - 1.5 * u + 0.5 * u * u2;
    case TaperFamily::Cubic:
      return 1.0 - 7.0 * u2 + 8.75 * u * u2 - 3.5 * u2 * u2 * u +
             0.75 * u2 * u2 * u2 * u;
    case TaperFamily::Penta: {
      const double u4 = u2 * u2;
      return 1.0 - 22.0 / 3.0 * u2 + 33.0 * u4 - 38.5 * u4 * u + 16.5 * u4 * u2 * u -
             5.5 * u4 * u4 * u + 5.0 / 6.0 * u4 * u4 * u2 * u;
    }
    case TaperFamily::Bohman: {
      if (u <= 0.0) return 1.0;
      const double w = 2.0 * kPi * u;
      return (1.0 - u) * std::sin(w) / w + (1.0 - std::cos(w)) / (2.0 * kPi * kPi * u);
    }
    case TaperFamily::Wendland0: {
      const double v = 1.0 - u;
      return v * v;
    }
    case TaperFamily::Wendland1: {
      const double v = 1.0 - u;
      const double v2 = v * v;
      return v2 * v2 * (4.0 * u + 1.0);
    }
    case TaperFamily::Wendland2: {
      const double v = 1.0 - u;
      const double v2 = v * v;
      return v2 * v2 * v2 * (35.0 * u2 + 18.0 * u + 3.0) / 3.0;
    }
  }
  return 0.0;
}

std::optional<TaperFamily> compact_family_of(CovFamily f) {
  switch (f) {
    case CovFamily::Spherical: return TaperFamily::Spherical;
    case CovFamily::Cubic: return TaperFamily::Cubic;
    case CovFamily::Penta: return TaperFamily::Penta;
    default: return std::nullopt;
  }
}

// Taper spectral densities in R^3 at unit theta (s > 0). Near s = 0 the
// formulas cancel catastrophically; switch to the exact limit
// f(0) = (1/(2 pi^2)) * int_0^1 phi(r) r^2 dr.
double taper_density(TaperFamily f, double s) {
  const double s2 = s * s;
  switch (f) {
    case TaperFamily::Spherical: {
      if (s < 0.05) return 1.0 / (48.0 * kPi * kPi);
      const double j = specfun::bessel_j_threehalves(s / 2.0);
      return 3.0 / (4.0 * kPi * s * s2) * j * j;
    }
    case TaperFamily::Cubic: {
      if (s < 0.05) return 7.0 / (480.0 * kPi * kPi);
      const double num = (s2 - 12.0) * std::sin(s / 2.0) + 6.0 * s * std::cos(s / 2.0);
      return 210.0 * num * num / (kPi * kPi * std::pow(s, 10));
    }
    case TaperFamily::Penta: {
      if (s < 0.1) return 11.0 / (1120.0 * kPi * kPi);  // moment integral 11/560
      const double num = s * (s2 - 60.0) * std::cos(s / 2.0) -
                         12.0 * (s2 - 10.0) * std::sin(s / 2.0);
      return 27720.0 * num * num / (kPi * kPi * std::pow(s, 14));
    }
    case TaperFamily::Bohman: {
      if (s < 0.01) return 1.0 / (8.0 * kPi * kPi * kPi * kPi);
      if (std::fabs(s - 2.0 * kPi) < 1e-4)
        return 1.0 / (32.0 * kPi * kPi * kPi * kPi);
      const double den = s * s2 - 4.0 * kPi * kPi * s;
      return 4.0 * (1.0 - std::cos(s)) / (den * den);
    }
    case TaperFamily::Wendland0: {
      if (s < 0.05) return 1.0 / (60.0 * kPi * kPi);
      return (2.0 * s - 3.0 * std::sin(s) + s * std::cos(s)) /
             (kPi * kPi * s2 * s2 * s);
    }
    case TaperFamily::Wendland1: {
      if (s < 0.1) return 1.0 / (84.0 * kPi * kPi);
      const double num = -4.0 * s2 + (s2 - 24.0) * std::cos(s) -
                         9.0 * s * std::sin(s) + 24.0;
      return -60.0 * num / (kPi * kPi * s2 * s2 * s2 * s2);
    }
    case TaperFamily::Wendland2: {
      if (s < 0.2) return 4.0 / (495.0 * kPi * kPi);
      const double num = 8.0 * s * (s2 - 24.0) + 9.0 * (35.0 - 2.0 * s2) * std::sin(s) +
                         s * (s2 - 123.0) * std::cos(s);
      return 6720.0 * num / (kPi * kPi * std::pow(s, 11));
    }
  }
  return 0.0;
}

SpectralProfile taper_profile(TaperFamily f) {
  switch (f) {
    case TaperFamily::Spherical: return {DecayClass::Polynomial, 4.0, 0};
    case TaperFamily::Cubic: return {DecayClass::Polynomial, 6.0, 2};
    case TaperFamily::Penta: return {DecayClass::Polynomial, 8.0, 4};
    case TaperFamily::Bohman: return {DecayClass::Polynomial, 6.0, 2};
    case TaperFamily::Wendland0: return {DecayClass::Polynomial, 4.0, 0};
    case TaperFamily::Wendland1: return {DecayClass::Polynomial, 6.0, 2};
    case TaperFamily::Wendland2: return {DecayClass::Polynomial, 8.0, 4};
  }
  return {};
}

struct FamilyInfo {
  const char* name;
  bool needs_nu;
  bool needs_alpha;
};

const std::map<std::string, CovFamily> kCovNames = {
    {"exponential", CovFamily::Exponential}, {"gaussian", CovFamily::Gaussian},
    {"spherical", CovFamily::Spherical},     {"cubic", CovFamily::Cubic},
    {"penta", CovFamily::Penta},             {"matern", CovFamily::Matern},
    {"cauchy", CovFamily::Cauchy}};

const std::map<std::string, TaperFamily> kTaperNames = {
    {"spherical", TaperFamily::Spherical}, {"cubic", TaperFamily::Cubic},
    {"penta", TaperFamily::Penta},         {"bohman", TaperFamily::Bohman},
    {"wendland0", TaperFamily::Wendland0}, {"wendland1", TaperFamily::Wendland1},
    {"wendland2", TaperFamily::Wendland2}};

const char* cov_name(CovFamily f) {
  for (const auto& [k, v] : kCovNames)
    if (v == f) return k.c_str();
  return "?";
}
const char* taper_name(TaperFamily f) {
  for (const auto& [k, v] : kTaperNames)
    if (v == f) return k.c_str();
  return "?";
}

// "name(key=value, ...)" -> (name, {key: value})
std::pair<std::string, std::map<std::string, double>> parse_call(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  const auto open = s.find('(');
  std::string name = (open == std::string::npos) ? s : s.substr(0, open);
  std::map<std::string, double> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw std::invalid_argument("model spec: missing ')'");
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("model spec: expected key=value in '" + item + "'");
      args[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  return {name, args};
}

}  // namespace

void CovarianceSpec::validate() const {
  if (!(sill > 0.0)) throw std::invalid_argument("covariance: sill must be > 0");
  if (!(range > 0.0)) throw std::invalid_argument("covariance: range must be > 0");
  if (family == CovFamily::Matern && !(nu > 0.0))
    throw std::invalid_argument("covariance: matern nu must be > 0");
  if (family == CovFamily::Cauchy && !(alpha > 0.0))
    throw std::invalid_argument("covariance: cauchy alpha must be > 0");
  if (family == CovFamily::Matern) {
    const double twice = 2.0 * nu;
    if (std::fabs(twice - std::round(twice)) > 1e-12)
      throw std::invalid_argument("covariance: matern nu restricted to half-integers");
  }
}

void Taper::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("taper: theta must be > 0");
}

double correlation(const CovarianceSpec& spec, double r) {
  if (r < 0.0) throw std::invalid_argument("correlation: negative lag");
  const double u = r / spec.range;
  switch (spec.family) {
    case CovFamily::Exponential:
      return std::exp(-u);
    case CovFamily::Gaussian:
      return std::exp(-u * u);
    case CovFamily::Spherical:
    case CovFamily::Cubic:
    case CovFamily::Penta:
      return compact_poly(*compact_family_of(spec.family), u);
    case CovFamily::Matern: {
      if (u == 0.0) return 1.0;
      return std::pow(2.0, 1.0 - spec.nu) / std::tgamma(spec.nu) *
             std::pow(u, spec.nu) * specfun::bessel_k(spec.nu, u);
    }
    case CovFamily::Cauchy:
      return std::pow(1.0 + u * u, -spec.alpha);
  }
  return 0.0;
}

double taper_value(const Taper& t, double r) {
  if (r < 0.0) throw std::invalid_argument("taper_value: negative lag");
  return compact_poly(t.family, r / t.theta);
}

double tapered_value(const TaperedCovariance& tc, double r) {
  if (r >= tc.taper.theta) return 0.0;
  return tc.base.sill * correlation(tc.base, r) * taper_value(tc.taper, r);
}

double spectral_density_r3(const Taper& t, double s) {
  if (s < 0.0) throw std::invalid_argument("spectral_density_r3: negative frequency");
  return taper_density(t.family, s);
}

double spectral_density_r3(const CovarianceSpec& spec, double s) {
  if (s < 0.0) throw std::invalid_argument("spectral_density_r3: negative frequency");
  const double s2 = s * s;
  switch (spec.family) {
    case CovFamily::Exponential:
      return 1.0 / (kPi * kPi * (1.0 + s2) * (1.0 + s2));
    case CovFamily::Gaussian:
      return std::exp(-s2 / 4.0) / (8.0 * std::pow(kPi, 1.5));
    case CovFamily::Spherical:
    case CovFamily::Cubic:
    case CovFamily::Penta:
      return taper_density(*compact_family_of(spec.family), s);
    case CovFamily::Matern:
      return std::pow(s2 + 1.0, -spec.nu - 1.5) * std::tgamma(spec.nu + 1.5) /
             (std::pow(kPi, 1.5) * std::tgamma(spec.nu));
    case CovFamily::Cauchy: {
      // 2^{-a-1/2} s^{a-3/2} K_{3/2-a}(s) / (pi^{3/2} Gamma(a))
      if (s == 0.0) s = 1e-12;
      return std::pow(2.0, -spec.alpha - 0.5) * std::pow(s, spec.alpha - 1.5) *
             specfun::bessel_k(1.5 - spec.alpha, s) /
             (std::pow(kPi, 1.5) * std::tgamma(spec.alpha));
    }
  }
  return 0.0;
}

SpectralProfile spectral_profile(const Taper& t) { return taper_profile(t.family); }

SpectralProfile spectral_profile(const CovarianceSpec& spec) {
  switch (spec.family) {
    case CovFamily::Exponential: return {DecayClass::Polynomial, 4.0, 0};
    case CovFamily::Gaussian: return {DecayClass::GaussianRate, 0.0, -1};
    case CovFamily::Spherical:
    case CovFamily::Cubic:
    case CovFamily::Penta:
      return taper_profile(*compact_family_of(spec.family));
    case CovFamily::Matern: {
      // smoothness column printed as 2*ceil(nu-1); stored verbatim
      const int sm = static_cast<int>(2.0 * std::ceil(spec.nu - 1.0));
      return {DecayClass::Polynomial, 2.0 * spec.nu + 3.0, std::max(sm, 0)};
    }
    case CovFamily::Cauchy: return {DecayClass::ExponentialRate, 0.0, -1};
  }
  return {};
}

double effective_range(const CovarianceSpec& spec) {
  spec.validate();
  constexpr double kTarget = 0.05;
  // bracket: correlation is 1 at 0 and below target at some multiple of range
  double hi = spec.range;
  while (correlation(spec, hi) > kTarget) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (correlation(spec, mid) > kTarget)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TailReport tail_screen(const CovarianceSpec& cov, const Taper& t) {
  TailReport rep;
  rep.cov_decay = spectral_profile(cov);
  rep.taper_decay = spectral_profile(t);
  if (rep.cov_decay.decay != DecayClass::Polynomial) {
    rep.satisfied = TailVerdict::No;
    rep.gamma_note = "covariance spectral density decays faster than any polynomial; "
                     "no compactly supported taper matches its tail";
    return rep;
  }
  if (rep.taper_decay.decay != DecayClass::Polynomial) {
    rep.satisfied = TailVerdict::Unknown;
    rep.gamma_note = "taper decay class not comparable";
    return rep;
  }
  if (rep.taper_decay.exponent >= rep.cov_decay.exponent) {
    rep.satisfied = TailVerdict::Yes;
    rep.gamma_note = "taper decay s^-" + std::to_string(rep.taper_decay.exponent) +
                     " at least as fast as covariance s^-" +
                     std::to_string(rep.cov_decay.exponent);
  } else {
    rep.satisfied = TailVerdict::No;
    rep.gamma_note = "taper decays slower (s^-" + std::to_string(rep.taper_decay.exponent) +
                     ") than the covariance (s^-" + std::to_string(rep.cov_decay.exponent) + ")";
  }
  return rep;
}

CovarianceSpec parse_covariance(const std::string& text) {
  auto [name, args] = parse_call(text);
  const auto it = kCovNames.find(name);
  if (it == kCovNames.end())
    throw std::invalid_argument("unknown covariance family '" + name + "'");
  CovarianceSpec spec;
  spec.family = it->second;
  if (args.count("sill")) spec.sill = args["sill"];
  if (args.count("range")) spec.range = args["range"];
  if (args.count("nu")) spec.nu = args["nu"];
  if (args.count("alpha")) spec.alpha = args["alpha"];
  spec.validate();
  return spec;
}

Taper parse_taper(const std::string& text) {
  auto [name, args] = parse_call(text);
  const auto it = kTaperNames.find(name);
  if (it == kTaperNames.end())
    throw std::invalid_argument("unknown taper family '" + name + "'");
  Taper t;
  t.family = it->second;
  if (args.count("theta")) t.theta = args["theta"];
  t.validate();
  return t;
}

std::string to_string(const CovarianceSpec& spec) {
  std::ostringstream os;
  os << cov_name(spec.family) << "(sill=" << spec.sill << ",range=" << spec.range;
  if (spec.family == CovFamily::Matern) os << ",nu=" << spec.nu;
  if (spec.family == CovFamily::Cauchy) os << ",alpha=" << spec.alpha;
  os << ")";
  return os.str();
}

std::string to_string(const Taper& t) {
  std::ostringstream os;
  os << taper_name(t.family) << "(theta=" << t.theta << ")";
  return os.str();
}

}  // namespace htsim
