#include "trunctest/testers.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "trunctest/errors.hpp"
#include "trunctest/likelihood.hpp"
#include "trunctest/numeric.hpp"
#include "trunctest/parallel.hpp"
#include "trunctest/rng.hpp"
#include "trunctest/statistics.hpp"

namespace trunctest {

std::string to_string(Decision d) { return d == Decision::Accept ? "ACCEPT" : "REJECT"; }

std::string to_string(TesterKind k) {
  switch (k) {
    case TesterKind::UnknownTrunc: return "unknown_trunc";
    case TesterKind::KnownTrunc: return "known_trunc";
    case TesterKind::LearnThenTest: return "learn_then_test";
  }
  return "unknown";
}

TesterKind tester_kind_from_string(const std::string& s) {
  if (s == "unknown_trunc") return TesterKind::UnknownTrunc;
  if (s == "known_trunc") return TesterKind::KnownTrunc;
  if (s == "learn_then_test") return TesterKind::LearnThenTest;
  throw PreconditionError("unknown tester kind: " + s);
}

TesterConfig TesterConfig::defaults(TesterKind kind, double alpha, std::uint64_t seed) {
  TesterConfig cfg;
  cfg.alpha = alpha;
  cfg.seed = seed;
  switch (kind) {
    case TesterKind::UnknownTrunc:
      cfg.c_n = 40.0;
      cfg.c_thr = 1.5;
      break;
    case TesterKind::KnownTrunc:
      cfg.c_n = 40.0;
      cfg.c_thr = 0.05;
      break;
    case TesterKind::LearnThenTest:
      cfg.c_n = 20.0;
      cfg.c_thr = 1.0;
      break;
  }
  cfg.validate(kind);
  return cfg;
}

void TesterConfig::validate(TesterKind kind) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw PreconditionError("TesterConfig: alpha must lie in (0, 1]");
  }
  if (kind == TesterKind::KnownTrunc && alpha > 0.25) {
    throw PreconditionError("TesterConfig: KnownTrunc assumes alpha <= 1/4");
  }
  if (!(c_n > 0.0) || !(c_thr > 0.0)) {
    throw PreconditionError("TesterConfig: c_n and c_thr must be positive");
  }
}

std::string verdict_csv_row(const TestVerdict& v, int d, double alpha, double eps,
                            std::uint64_t seed) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%lld,%llu,%.17g,%.17g,%s",
                to_string(v.tester).c_str(), d, alpha, eps, static_cast<long long>(v.n_used),
                static_cast<unsigned long long>(seed), v.statistic, v.threshold,
                to_string(v.decision).c_str());
  return buf;
}

SampleSource source_from_spec(TruncatedGaussianSpec spec, double max_rejection_factor) {
  return [spec = std::move(spec), max_rejection_factor](std::int64_t n, std::uint64_t seed) {
    return sample_truncated(spec, n, seed, max_rejection_factor);
  };
}

std::int64_t sample_size_sqrt(int d, const TesterConfig& cfg) {
  if (cfg.n_override) return *cfg.n_override;
  return static_cast<std::int64_t>(
      std::ceil(cfg.c_n * std::sqrt(static_cast<double>(d)) / (cfg.alpha * cfg.alpha)));
}

std::int64_t sample_size_linear(int d, const TesterConfig& cfg) {
  if (cfg.n_override) return *cfg.n_override;
  return static_cast<std::int64_t>(
      std::ceil(cfg.c_n * static_cast<double>(d) / (cfg.alpha * cfg.alpha)));
}

TestVerdict test_unknown_truncation(const SampleSource& source, int d, const TesterConfig& cfg) {
  cfg.validate(TesterKind::UnknownTrunc);
  const std::int64_t n = sample_size_sqrt(d, cfg);
  SampleBatch both = source(2 * n, cfg.seed);
  auto [x, y] = split_batch(both);
  const StatisticReport z = statistic_z(x, y);
  const double threshold = cfg.c_thr * std::sqrt(static_cast<double>(d)) / static_cast<double>(n);
  // Tie at the threshold accepts (<=), matching the algorithm's rule.
  const Decision dec = std::abs(z.value) <= threshold ? Decision::Accept : Decision::Reject;
  return TestVerdict{dec, z.value, threshold, 2 * n, TesterKind::UnknownTrunc};
}

TestVerdict test_known_truncation(const SampleSource& source, const TruncationSet& set, int d,
                                  const TesterConfig& cfg, const Vec& mu_s_null) {
  cfg.validate(TesterKind::KnownTrunc);
  if (mu_s_null.size() != d || set.dim() != d) {
    throw PreconditionError("test_known_truncation: mu_s_null/set dimension mismatch");
  }
  const std::int64_t n = sample_size_sqrt(d, cfg);
  SampleBatch both = source(2 * n, cfg.seed);
  if (both.dim() != d) {
    throw PreconditionError("test_known_truncation: source dimension mismatch");
  }
  auto [x, y] = split_batch(both);
  const StatisticReport z1 = statistic_z1(x, y, mu_s_null);
  const double threshold = cfg.c_thr * cfg.alpha * cfg.alpha;
  const Decision dec = std::abs(z1.value) <= threshold ? Decision::Accept : Decision::Reject;
  return TestVerdict{dec, z1.value, threshold, 2 * n, TesterKind::KnownTrunc};
}

TestVerdict test_learn_then_test(const SampleSource& source, int d, const TesterConfig& cfg) {
  cfg.validate(TesterKind::LearnThenTest);
  const std::int64_t n = sample_size_linear(d, cfg);
  SampleBatch batch = source(n, cfg.seed);
  // Coordinate-wise median as the robust estimate of the pre-truncation mean.
  Vec mu_hat(d);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    for (std::int64_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = batch.data(i, j);
    mu_hat[j] = median_inplace(col);
  }
  const double stat = mu_hat.norm();
  const double threshold = cfg.c_thr * cfg.alpha / 2.0;
  const Decision dec = stat <= threshold ? Decision::Accept : Decision::Reject;
  return TestVerdict{dec, stat, threshold, n, TesterKind::LearnThenTest};
}

namespace {

TestVerdict run_tester(TesterKind kind, const TruncatedGaussianSpec& spec,
                       const TesterConfig& cfg) {
  const SampleSource src = source_from_spec(spec);
  switch (kind) {
    case TesterKind::UnknownTrunc:
      return test_unknown_truncation(src, spec.dim(), cfg);
    case TesterKind::KnownTrunc: {
      const VectorEstimate mu_s =
          null_truncated_mean(spec.set, cfg.alpha * cfg.alpha / 100.0, cfg.seed);
      return test_known_truncation(src, spec.set, spec.dim(), cfg, mu_s.value);
    }
    case TesterKind::LearnThenTest:
      return test_learn_then_test(src, spec.dim(), cfg);
  }
  throw PreconditionError("run_tester: bad kind");
}

}  // namespace

TesterConfig calibrate_constants(TesterKind kind, const std::vector<TruncatedGaussianSpec>& null_grid,
                                 const CalibrationOptions& opts) {
  if (null_grid.empty()) throw CalibrationError("calibrate_constants: empty null grid");
  if (opts.trials < 1) throw CalibrationError("calibrate_constants: trials must be >= 1");

  TesterConfig cfg = TesterConfig::defaults(kind, opts.alpha, opts.seed);
  const int max_failures =
      static_cast<int>(std::floor(static_cast<double>(opts.trials) * (1.0 - opts.min_accept_rate)));
  for (double c_thr : opts.ladder) {
    cfg.c_thr = c_thr;
    bool all_pass = true;
    for (std::size_t cell = 0; cell < null_grid.size() && all_pass; ++cell) {
      std::atomic<int> accepts{0};
      std::atomic<int> failures{0};
      parallel_for(opts.trials, opts.threads, [&](std::int64_t trial) {
        if (failures.load() > max_failures) return;  // value already ruled out
        TesterConfig trial_cfg = cfg;
        trial_cfg.seed = derive_stream_seed(opts.seed, (cell << 24) ^ static_cast<std::uint64_t>(trial));
        const TestVerdict v = run_tester(kind, null_grid[cell], trial_cfg);
        if (v.decision == Decision::Accept) {
          accepts.fetch_add(1);
        } else {
          failures.fetch_add(1);
        }
      });
      const double rate = static_cast<double>(accepts.load()) / static_cast<double>(opts.trials);
      if (rate < opts.min_accept_rate) all_pass = false;
    }
    if (all_pass) return cfg;
  }
  throw CalibrationError("calibrate_constants: no ladder value reached accept rate " +
                         std::to_string(opts.min_accept_rate) + " on every null instance");
}

}  // namespace trunctest
