#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace trunctest {

namespace detail {
constexpr std::size_t kPairwiseBase = 64;
}

/// Pairwise (tree) summation; error grows as O(log n) instead of O(n).
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= detail::kPairwiseBase) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t mid = xs.size() / 2;
  return pairwise_sum(xs.first(mid)) + pairwise_sum(xs.subspan(mid));
}

/// Pairwise dot product, same recursion as pairwise_sum.
inline double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() <= detail::kPairwiseBase) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t mid = a.size() / 2;
  return pairwise_dot(a.first(mid), b.first(mid)) +
         pairwise_dot(a.subspan(mid), b.subspan(mid));
}

/// Median via nth_element; modifies its argument.
inline double median_inplace(std::vector<double>& xs) {
  const std::size_t n = xs.size();
  const std::size_t mid = n / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  double hi = xs[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.begin() + mid);
  return 0.5 * (xs[mid - 1] + hi);
}

/// Wilson 95% interval half-width for a binomial rate.
inline double wilson_halfwidth(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054) {
  if (trials <= 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  return (z / (1.0 + z2 / n)) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

/// Running mean/variance accumulator (Welford).
class RunningMoments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Standard error of the unbiased sample variance:
/// Var(s^2) = (m4 - (n-3)/(n-1) s^4) / n, with m4 the fourth central moment.
inline double variance_std_error(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  if (xs.size() < 4) return 0.0;
  const double mean = pairwise_sum(xs) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  const double s2 = m2 * n / (n - 1.0);
  const double var_of_var = (m4 - (n - 3.0) / (n - 1.0) * s2 * s2) / n;
  return var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
}

}  // namespace trunctest
