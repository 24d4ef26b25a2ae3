#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trunctest/sampling.hpp"
#include "trunctest/types.hpp"

namespace trunctest {

struct StatisticReport {
  double value = 0.0;
  std::int64_t n = 0;                 // samples per half-batch
  std::optional<Vec> centering;       // mu'_S for Z1, absent for Z
};

/// Z = <Xbar, Ybar> (inner product of the two empirical means); pairwise
/// summation throughout.
StatisticReport statistic_z(const SampleBatch& x, const SampleBatch& y);

/// Z1 = <Xbar - mu'_S, Ybar - mu'_S>.
StatisticReport statistic_z1(const SampleBatch& x, const SampleBatch& y, const Vec& mu_s_null);

struct Moments {
  Vec mean;
  Eigen::MatrixXd cov;  // unbiased (n-1 denominator)
};
Moments empirical_moments(const SampleBatch& batch);

/// Column means of a sample matrix via pairwise row-block summation.
Vec column_means(const Mat& data);

/// One CSV row: stat_name,value,n,d.
std::string to_csv_row(const StatisticReport& report, const std::string& stat_name, int d);

/// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Critical value at significance `level` (0.01 or 0.05), Stephens' finite-n
/// denominator sqrt(n) + 0.12 + 0.11/sqrt(n).
double ks_critical_value(std::int64_t n, double level);

}  // namespace trunctest
