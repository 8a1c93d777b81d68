#include "htsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "htsim/specfun.hpp"

namespace htsim::stats {

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const size_t n1 = a.size(), n2 = b.size();

  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < n1 && j < n2) {
    const double v = std::min(a[i], b[j]);
    while (i < n1 && a[i] <= v) ++i;
    while (j < n2 && b[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }

  KsResult res;
  res.d_stat = d;
  res.n1 = static_cast<int>(n1);
  res.n2 = static_cast<int>(n2);
  res.small_sample_warning = n1 < 10 || n2 < 10;
  const double en = std::sqrt(static_cast<double>(n1) * n2 / (n1 + n2));
  res.p_value = specfun::kolmogorov_sf(d * en);
  return res;
}

double quantile(std::vector<double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

DistSummary summarize(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("summarize: empty sample");
  std::sort(sample.begin(), sample.end());
  DistSummary s;
  s.min = sample.front();
  s.max = sample.back();
  s.q1 = quantile(sample, 0.25);
  s.median = quantile(sample, 0.5);
  s.q3 = quantile(sample, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.max;
  s.whisker_hi = s.min;
  for (double v : sample) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      s.whisker_lo = std::min(s.whisker_lo, v);
      s.whisker_hi = std::max(s.whisker_hi, v);
    }
  }
  return s;
}

}  // namespace htsim::stats
