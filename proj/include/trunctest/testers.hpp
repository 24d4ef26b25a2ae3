#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trunctest/sampling.hpp"
#include "trunctest/truncation.hpp"
#include "trunctest/types.hpp"

namespace trunctest {

enum class Decision { Accept, Reject };
enum class TesterKind { UnknownTrunc, KnownTrunc, LearnThenTest };

std::string to_string(Decision d);
std::string to_string(TesterKind k);
TesterKind tester_kind_from_string(const std::string& s);

struct TesterConfig {
  double alpha = 0.5;     // accuracy parameter
  double c_n = 40.0;      // n = ceil(c_n sqrt(d)/alpha^2), or c_n d/alpha^2 for LearnThenTest
  double c_thr = 1.5;     // threshold constant
  std::uint64_t seed = 0;
  // Sweep ladders pin n directly; the threshold still scales with the actual n.
  std::optional<std::int64_t> n_override;

  /// Frozen defaults from the shipped calibration run:
  /// UnknownTrunc (40, 1.5), KnownTrunc (40, 0.05), LearnThenTest (20, 1.0).
  static TesterConfig defaults(TesterKind kind, double alpha, std::uint64_t seed);
  void validate(TesterKind kind) const;
};

struct TestVerdict {
  Decision decision;
  double statistic;
  double threshold;
  std::int64_t n_used;
  TesterKind tester;
};

/// CSV row: tester,d,alpha,eps,n,seed,statistic,threshold,decision.
std::string verdict_csv_row(const TestVerdict& v, int d, double alpha, double eps,
                            std::uint64_t seed);

/// Yields a batch of n i.i.d. draws from the (hidden) truncated Gaussian.
using SampleSource = std::function<SampleBatch(std::int64_t n, std::uint64_t seed)>;
SampleSource source_from_spec(TruncatedGaussianSpec spec, double max_rejection_factor = 100.0);

std::int64_t sample_size_sqrt(int d, const TesterConfig& cfg);    // ceil(c_n sqrt(d)/alpha^2)
std::int64_t sample_size_linear(int d, const TesterConfig& cfg);  // ceil(c_n d/alpha^2)

/// Algorithm for unknown truncation: draw 2n points, ACCEPT iff
/// |Z| <= c_thr sqrt(d)/n. Intended regime: eps sqrt(log 1/eps) <~ alpha.
TestVerdict test_unknown_truncation(const SampleSource& source, int d, const TesterConfig& cfg);

/// Known-truncation tester: ACCEPT iff |Z1| <= c_thr alpha^2, with mu_s_null
/// = E_{x~N(0,I,S)}[x] precomputed to adequate accuracy by the caller.
TestVerdict test_known_truncation(const SampleSource& source, const TruncationSet& set, int d,
                                  const TesterConfig& cfg, const Vec& mu_s_null);

/// Learning-to-test baseline: n = ceil(c_n d/alpha^2) samples, coordinate-wise
/// median estimate of the pre-truncation mean (truncation treated as
/// eps-contamination), ACCEPT iff ||mu_hat|| <= c_thr alpha/2.
TestVerdict test_learn_then_test(const SampleSource& source, int d, const TesterConfig& cfg);

struct CalibrationOptions {
  double alpha = 0.5;
  int trials = 400;
  double min_accept_rate = 0.8;
  std::uint64_t seed = 0xca11b;
  int threads = 1;
  std::vector<double> ladder = {0.05, 0.1, 0.15, 0.25, 0.4,  0.6, 1.0,
                                1.25, 1.5, 2.0,  2.5,  3.0,  4.0, 6.0, 10.0};
};

/// Smallest ladder c_thr achieving the accept-rate target on every null
/// instance; c_n stays at the per-kind default. Throws CalibrationError when
/// the grid is empty or no ladder value reaches the target.
TesterConfig calibrate_constants(TesterKind kind, const std::vector<TruncatedGaussianSpec>& null_grid,
                                 const CalibrationOptions& opts);

}  // namespace trunctest
