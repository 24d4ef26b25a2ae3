#include "trunctest/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/rng.hpp"

namespace trunctest {

SampleBatch sample_truncated(const TruncatedGaussianSpec& spec, std::int64_t n,
                             std::uint64_t seed, double max_rejection_factor) {
  if (n < 1) throw PreconditionError("sample_truncated: n must be >= 1");
  if (max_rejection_factor < 1.0) {
    throw PreconditionError("sample_truncated: max_rejection_factor must be >= 1");
  }
  const int d = spec.dim();
  SampleBatch batch;
  batch.data.resize(n, d);
  batch.seed = seed;

  SplitRng rng(seed);
  Vec x(d);
  // Small floor keeps tiny-n draws from tripping the budget on unlucky streaks.
  const auto budget = static_cast<std::int64_t>(
      max_rejection_factor * static_cast<double>(std::max<std::int64_t>(n, 32)));
  std::int64_t accepted = 0;
  std::int64_t proposals = 0;
  while (accepted < n) {
    if (proposals >= budget) {
      const double rate = static_cast<double>(accepted) / static_cast<double>(proposals);
      throw SamplingEfficiencyError(
          "sample_truncated: proposal budget exhausted (acceptance rate " +
              std::to_string(rate) + " after " + std::to_string(proposals) + " proposals)",
          rate, proposals);
    }
    for (int k = 0; k < d; ++k) x[k] = spec.mu[k] + rng.normal();
    ++proposals;
    if (spec.set.contains(x)) {
      batch.data.row(accepted) = x.transpose();
      ++accepted;
    }
  }
  batch.proposals_used = proposals;
  return batch;
}

std::pair<SampleBatch, SampleBatch> split_batch(const SampleBatch& batch) {
  const std::int64_t rows = batch.n();
  if (rows % 2 != 0) {
    throw PreconditionError("split_batch: batch must have an even number of rows");
  }
  const std::int64_t half = rows / 2;
  SampleBatch x, y;
  x.data = batch.data.topRows(half);
  y.data = batch.data.bottomRows(half);
  x.seed = y.seed = batch.seed;
  // Attribute proposal counts proportionally; the halves share one generation run.
  x.proposals_used = batch.proposals_used / 2;
  y.proposals_used = batch.proposals_used - x.proposals_used;
  return {std::move(x), std::move(y)};
}

void write_csv(const SampleBatch& batch, std::ostream& os) {
  char buf[32];
  for (std::int64_t i = 0; i < batch.n(); ++i) {
    for (int k = 0; k < batch.dim(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", batch.data(i, k));
      if (k > 0) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

nlohmann::json metadata_json(const SampleBatch& batch) {
  return nlohmann::json{{"n", batch.n()},
                        {"dim", batch.dim()},
                        {"seed", batch.seed},
                        {"proposals_used", batch.proposals_used},
                        {"acceptance_rate", batch.acceptance_rate()}};
}

}  // namespace trunctest
