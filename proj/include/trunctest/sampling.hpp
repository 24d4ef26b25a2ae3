#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "trunctest/truncation.hpp"
#include "trunctest/types.hpp"

namespace trunctest {

/// A batch of accepted draws from N(mu, I_d, S); one sample per row.
struct SampleBatch {
  Mat data;
  std::uint64_t seed = 0;
  std::int64_t proposals_used = 0;

  std::int64_t n() const { return data.rows(); }
  int dim() const { return static_cast<int>(data.cols()); }
  double acceptance_rate() const {
    return proposals_used > 0 ? static_cast<double>(n()) / static_cast<double>(proposals_used) : 0.0;
  }
};

/// Rejection sampling: propose from N(mu, I_d), accept iff the membership
/// oracle admits the point. Deterministic given (spec, n, seed). Throws
/// SamplingEfficiencyError once proposals exceed max_rejection_factor * n.
SampleBatch sample_truncated(const TruncatedGaussianSpec& spec, std::int64_t n,
                             std::uint64_t seed, double max_rejection_factor = 100.0);

/// Split a 2n-row batch into two disjoint halves (first n rows / last n rows;
/// no reordering, preserving i.i.d.-ness).
std::pair<SampleBatch, SampleBatch> split_batch(const SampleBatch& batch);

/// One sample per row, plain CSV (no header).
void write_csv(const SampleBatch& batch, std::ostream& os);

/// Generation metadata for the JSON sidecar.
nlohmann::json metadata_json(const SampleBatch& batch);

}  // namespace trunctest
