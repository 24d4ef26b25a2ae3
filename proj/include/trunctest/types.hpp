#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace trunctest {

using Vec = Eigen::VectorXd;
// Row-major so each sample is contiguous.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Scalar Monte-Carlo / analytic result. std_error == 0 means exact (analytic path).
struct ScalarEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t draws_used = 0;
};

/// Vector-valued counterpart; std_error is per-coordinate.
struct VectorEstimate {
  Vec value;
  Vec std_error;
  std::int64_t draws_used = 0;
};

struct MonteCarloOptions {
  std::int64_t budget = 1'000'000;  // accepted samples (moments) or proposals (mass)
  std::uint64_t seed = 0x7475636b;
};

}  // namespace trunctest
