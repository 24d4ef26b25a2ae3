#include "trunctest/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "trunctest/errors.hpp"
#include "trunctest/numeric.hpp"

namespace trunctest {

namespace {

// Pairwise over row blocks, accumulating d-vector partial sums.
Vec block_sum(const Mat& data, std::int64_t lo, std::int64_t hi) {
  if (hi - lo <= 64) {
    Vec s = Vec::Zero(data.cols());
    for (std::int64_t i = lo; i < hi; ++i) s += data.row(i).transpose();
    return s;
  }
  const std::int64_t mid = lo + (hi - lo) / 2;
  return block_sum(data, lo, mid) + block_sum(data, mid, hi);
}

void require_compatible(const SampleBatch& x, const SampleBatch& y) {
  if (x.dim() != y.dim()) throw PreconditionError("statistic: batches have different dimension");
  if (x.n() != y.n()) throw PreconditionError("statistic: batches have different sample count");
  if (x.n() < 1) throw PreconditionError("statistic: empty batch");
}

}  // namespace

Vec column_means(const Mat& data) {
  return block_sum(data, 0, data.rows()) / static_cast<double>(data.rows());
}

StatisticReport statistic_z(const SampleBatch& x, const SampleBatch& y) {
  require_compatible(x, y);
  const Vec xbar = column_means(x.data);
  const Vec ybar = column_means(y.data);
  const double z = pairwise_dot({xbar.data(), static_cast<std::size_t>(xbar.size())},
                                {ybar.data(), static_cast<std::size_t>(ybar.size())});
  return StatisticReport{z, x.n(), std::nullopt};
}

StatisticReport statistic_z1(const SampleBatch& x, const SampleBatch& y, const Vec& mu_s_null) {
  require_compatible(x, y);
  if (mu_s_null.size() != x.dim()) {
    throw PreconditionError("statistic_z1: centering vector has wrong dimension");
  }
  const Vec xc = column_means(x.data) - mu_s_null;
  const Vec yc = column_means(y.data) - mu_s_null;
  const double z1 = pairwise_dot({xc.data(), static_cast<std::size_t>(xc.size())},
                                 {yc.data(), static_cast<std::size_t>(yc.size())});
  StatisticReport r{z1, x.n(), mu_s_null};
  return r;
}

Moments empirical_moments(const SampleBatch& batch) {
  if (batch.n() < 2) throw PreconditionError("empirical_moments: need n >= 2");
  const auto d = batch.dim();
  Moments m;
  m.mean = column_means(batch.data);
  m.cov = Eigen::MatrixXd::Zero(d, d);
  // Chunked rank-update keeps this a GEMM for large n.
  constexpr std::int64_t kChunk = 4096;
  for (std::int64_t lo = 0; lo < batch.n(); lo += kChunk) {
    const std::int64_t hi = std::min(batch.n(), lo + kChunk);
    Eigen::MatrixXd centered = batch.data.middleRows(lo, hi - lo);
    centered.rowwise() -= m.mean.transpose();
    m.cov.noalias() += centered.transpose() * centered;
  }
  m.cov /= static_cast<double>(batch.n() - 1);
  return m;
}

std::string to_csv_row(const StatisticReport& report, const std::string& stat_name, int d) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s,%.17g,%lld,%d", stat_name.c_str(), report.value,
                static_cast<long long>(report.n), d);
  return buf;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw PreconditionError("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    dmax = std::max(dmax, std::max(std::abs(f - lo), std::abs(hi - f)));
  }
  return dmax;
}

double ks_critical_value(std::int64_t n, double level) {
  double k;
  if (level == 0.01) {
    k = 1.62762;
  } else if (level == 0.05) {
    k = 1.35810;
  } else {
    throw PreconditionError("ks_critical_value: level must be 0.01 or 0.05");
  }
  const double sn = std::sqrt(static_cast<double>(n));
  return k / (sn + 0.12 + 0.11 / sn);
}

}  // namespace trunctest
