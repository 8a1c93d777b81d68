#pragma once

#include <vector>

namespace htsim::stats {

struct KsResult {
  double d_stat = 0.0;
  double p_value = 1.0;
  int n1 = 0, n2 = 0;
  bool small_sample_warning = false;  // asymptotic p-value below n >= 10
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// Q(d * sqrt(n1 n2 / (n1 + n2))).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct DistSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double whisker_lo = 0, whisker_hi = 0;
  std::vector<double> outliers;
};

// Tukey boxplot statistics; quantiles by linear interpolation of the
// order statistics.
DistSummary summarize(std::vector<double> sample);

double quantile(std::vector<double> sorted_sample, double p);

}  // namespace htsim::stats
