#include <doctest.h>

#include <atomic>
#include <cmath>

#include "trunctest/errors.hpp"
#include "trunctest/hardinstance.hpp"
#include "trunctest/instances.hpp"
#include "trunctest/likelihood.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/parallel.hpp"
#include "trunctest/rng.hpp"
#include "trunctest/testers.hpp"

using namespace trunctest;

namespace {

double accept_rate(TesterKind kind, InstanceKind inst_kind, int d, double alpha, double eps,
                   int trials, std::uint64_t base_seed, double c_thr = 0.0) {
  std::atomic<int> accepts{0};
  parallel_for(trials, default_thread_count(), [&](std::int64_t t) {
    SplitRng dir_rng(base_seed, static_cast<std::uint64_t>(t));
    Instance inst = make_instance(inst_kind, d, alpha, eps, dir_rng);
    TesterConfig cfg = TesterConfig::defaults(kind, inst.alpha,
                                              derive_stream_seed(base_seed + 1, static_cast<std::uint64_t>(t)));
    if (c_thr > 0.0) cfg.c_thr = c_thr;
    const SampleSource src = source_from_spec(inst.spec);
    TestVerdict v{};
    switch (kind) {
      case TesterKind::UnknownTrunc:
        v = test_unknown_truncation(src, d, cfg);
        break;
      case TesterKind::KnownTrunc: {
        Vec mu_s = inst.mu_s_null
                       ? *inst.mu_s_null
                       : null_truncated_mean(inst.spec.set, cfg.alpha * cfg.alpha / 100.0).value;
        v = test_known_truncation(src, inst.spec.set, d, cfg, mu_s);
        break;
      }
      case TesterKind::LearnThenTest:
        v = test_learn_then_test(src, d, cfg);
        break;
    }
    if (v.decision == Decision::Accept) accepts.fetch_add(1);
  });
  return static_cast<double>(accepts.load()) / static_cast<double>(trials);
}

Vec e1(int d) {
  Vec v = Vec::Zero(d);
  v[0] = 1.0;
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("testers");

TEST_CASE("config validation") {
  CHECK_THROWS_AS(TesterConfig::defaults(TesterKind::KnownTrunc, 0.3, 1).validate(TesterKind::KnownTrunc),
                  PreconditionError);
  TesterConfig bad = TesterConfig::defaults(TesterKind::UnknownTrunc, 0.5, 1);
  bad.c_thr = 0.0;
  CHECK_THROWS_AS(bad.validate(TesterKind::UnknownTrunc), PreconditionError);
  CHECK_THROWS_AS(TesterConfig::defaults(TesterKind::UnknownTrunc, 0.0, 1), PreconditionError);
}

TEST_CASE("sample sizes and the scale-coherence identity") {
  TesterConfig cfg = TesterConfig::defaults(TesterKind::UnknownTrunc, 0.5, 1);
  // d=64: c_n sqrt(d)/alpha^2 = 40*8/0.25 = 1280 exactly
  CHECK(sample_size_sqrt(64, cfg) == 1280);
  CHECK(sample_size_linear(64, TesterConfig::defaults(TesterKind::LearnThenTest, 0.5, 1)) == 5120);
  // threshold c sqrt(d)/n == c alpha^2/c_n at the prescribed n (exact algebra)
  const double thr_n = cfg.c_thr * std::sqrt(64.0) / 1280.0;
  const double thr_alpha = cfg.c_thr * cfg.alpha * cfg.alpha / cfg.c_n;
  CHECK(thr_n == thr_alpha);
}

TEST_CASE("verdict determinism given (seed, config, instance)") {
  SplitRng rng(3);
  Instance inst = make_instance(InstanceKind::HalfSpaceWorstSoundness, 8, 0.5, 0.01, rng);
  TesterConfig cfg = TesterConfig::defaults(TesterKind::UnknownTrunc, 0.5, 42);
  const SampleSource src = source_from_spec(inst.spec);
  const auto v1 = test_unknown_truncation(src, 8, cfg);
  const auto v2 = test_unknown_truncation(src, 8, cfg);
  CHECK(v1.statistic == v2.statistic);
  CHECK(v1.decision == v2.decision);
  CHECK(v1.threshold == v2.threshold);
  CHECK(v1.n_used == 2 * sample_size_sqrt(8, cfg));
}

TEST_CASE("verdict csv row shape") {
  TestVerdict v{Decision::Reject, 0.25, 0.125, 640, TesterKind::UnknownTrunc};
  const auto row = verdict_csv_row(v, 16, 0.5, 0.01, 7);
  CHECK(row == "unknown_trunc,16,0.5,0.01,640,7,0.25,0.125,REJECT");
}

TEST_CASE("unknown-truncation tester: completeness and soundness at defaults") {
  // Downsized from the acceptance grid: d = 16, 120 trials.
  const double acc_null = accept_rate(TesterKind::UnknownTrunc, InstanceKind::FullSpaceNull, 16,
                                      0.5, 0.0, 120, 1000);
  CHECK(acc_null >= 2.0 / 3.0);
  const double acc_sound = accept_rate(TesterKind::UnknownTrunc,
                                       InstanceKind::HalfSpaceWorstSoundness, 16, 0.5, 0.01, 120, 2000);
  CHECK(1.0 - acc_sound >= 2.0 / 3.0);
}

TEST_CASE("unknown-truncation tester is fooled by the embedded hard instance") {
  const double acc = accept_rate(TesterKind::UnknownTrunc, InstanceKind::HardEmbeddedSoundness, 16,
                                 0.0, 0.1, 120, 3000);
  CHECK(acc >= 0.5);
}

TEST_CASE("known-truncation tester on a heavy eps = 0.3 set") {
  const double acc_null =
      accept_rate(TesterKind::KnownTrunc, InstanceKind::HalfSpaceNull, 16, 0.2, 0.3, 120, 4000);
  CHECK(acc_null >= 2.0 / 3.0);
  const double acc_sound = accept_rate(TesterKind::KnownTrunc,
                                       InstanceKind::HalfSpaceWorstSoundness, 16, 0.2, 0.3, 120, 5000);
  CHECK(1.0 - acc_sound >= 2.0 / 3.0);
  // knowing S defeats the hard instance
  const double acc_hard = accept_rate(TesterKind::KnownTrunc, InstanceKind::HardEmbeddedSoundness,
                                      16, 0.0, 0.1, 120, 6000);
  CHECK(1.0 - acc_hard >= 2.0 / 3.0);
}

TEST_CASE("known-truncation tester rejects stale centering") {
  SplitRng rng(9);
  Instance inst = make_instance(InstanceKind::HalfSpaceNull, 4, 0.2, 0.1, rng);
  TesterConfig cfg = TesterConfig::defaults(TesterKind::KnownTrunc, 0.2, 11);
  CHECK_THROWS_AS(test_known_truncation(source_from_spec(inst.spec), inst.spec.set, 4, cfg,
                                        Vec::Zero(3)),
                  PreconditionError);
}

TEST_CASE("learn-then-test on benign instances") {
  const double acc_null = accept_rate(TesterKind::LearnThenTest, InstanceKind::FullSpaceNull, 8,
                                      0.5, 0.0, 80, 7000);
  CHECK(acc_null >= 2.0 / 3.0);
  // untruncated soundness: coordinate medians recover the mean
  std::atomic<int> rejects{0};
  parallel_for(80, default_thread_count(), [&](std::int64_t t) {
    SplitRng dir_rng(8000, static_cast<std::uint64_t>(t));
    Vec v(8);
    for (int k = 0; k < 8; ++k) v[k] = dir_rng.normal();
    v.normalize();
    const TruncatedGaussianSpec spec(0.5 * v, TruncationSet::full_space(8));
    TesterConfig cfg = TesterConfig::defaults(TesterKind::LearnThenTest, 0.5,
                                              derive_stream_seed(8001, static_cast<std::uint64_t>(t)));
    if (test_learn_then_test(source_from_spec(spec), 8, cfg).decision == Decision::Reject) {
      rejects.fetch_add(1);
    }
  });
  CHECK(static_cast<double>(rejects.load()) / 80.0 >= 2.0 / 3.0);
}

TEST_CASE("learn-then-test with a sqrt(d) budget cannot beat the hard instance") {
  // success = REJECT on this soundness instance; with only ~sqrt(d)/alpha^2
  // samples the rate must stay low (the instance also defeats the full
  // budget; see the acceptance suite notes).
  std::atomic<int> rejects{0};
  const int trials = 60;
  parallel_for(trials, default_thread_count(), [&](std::int64_t t) {
    SplitRng dir_rng(9100, static_cast<std::uint64_t>(t));
    Instance inst = make_instance(InstanceKind::HardEmbeddedSoundness, 16, 0.0, 0.1, dir_rng);
    TesterConfig cfg = TesterConfig::defaults(TesterKind::LearnThenTest, inst.alpha,
                                              derive_stream_seed(9200, static_cast<std::uint64_t>(t)));
    cfg.n_override = static_cast<std::int64_t>(
        std::ceil(std::sqrt(16.0) / (inst.alpha * inst.alpha)));
    if (test_learn_then_test(source_from_spec(inst.spec), 16, cfg).decision == Decision::Reject) {
      rejects.fetch_add(1);
    }
  });
  CHECK(static_cast<double>(rejects.load()) / trials <= 0.6);
}

TEST_CASE("calibration: full-space grid yields a small constant, errors propagate") {
  std::vector<TruncatedGaussianSpec> grid;
  grid.emplace_back(Vec::Zero(16), TruncationSet::full_space(16));
  CalibrationOptions opts;
  opts.alpha = 0.5;
  opts.trials = 150;
  opts.threads = default_thread_count();
  const TesterConfig cfg = calibrate_constants(TesterKind::UnknownTrunc, grid, opts);
  // Var[Z] = d/n^2 exactly here, so Chebyshev already passes at c_thr = 3.
  CHECK(cfg.c_thr <= 3.0);
  CHECK(cfg.c_n == 40.0);

  CHECK_THROWS_AS(calibrate_constants(TesterKind::UnknownTrunc, {}, opts), CalibrationError);

  // a soundness instance sneaked into the "null" grid makes the target unreachable
  std::vector<TruncatedGaussianSpec> poisoned;
  poisoned.emplace_back(0.5 * e1(16), TruncationSet::full_space(16));
  CHECK_THROWS_AS(calibrate_constants(TesterKind::UnknownTrunc, poisoned, opts), CalibrationError);
}

TEST_CASE("success rate is monotone in n (up to noise slack)") {
  // soundness instance: more samples means higher reject rate
  const int d = 16;
  const int trials = 100;
  double prev = -1.0;
  for (std::int64_t n : {80, 320, 1280}) {
    std::atomic<int> rejects{0};
    parallel_for(trials, default_thread_count(), [&](std::int64_t t) {
      SplitRng dir_rng(11'000 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t));
      Instance inst = make_instance(InstanceKind::HalfSpaceWorstSoundness, d, 0.35, 0.01, dir_rng);
      TesterConfig cfg = TesterConfig::defaults(
          TesterKind::UnknownTrunc, inst.alpha,
          derive_stream_seed(12'000 + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)));
      cfg.n_override = n;
      if (test_unknown_truncation(source_from_spec(inst.spec), d, cfg).decision ==
          Decision::Reject) {
        rejects.fetch_add(1);
      }
    });
    const double rate = static_cast<double>(rejects.load()) / trials;
    const double slack = 2.0 * std::sqrt(0.25 / trials);
    CHECK(rate >= prev - slack);
    prev = rate;
  }
}

TEST_CASE("slab-removal instances: regime 3 behavior") {
  // The zero-mean slab removal fools the unknown-truncation tester...
  const double acc = accept_rate(TesterKind::UnknownTrunc, InstanceKind::SlabRemovedSoundness, 8,
                                 0.1, 0.2, 80, 13'000);
  CHECK(acc >= 0.5);
  // ...while the known-truncation tester separates both hypotheses.
  const double acc_null =
      accept_rate(TesterKind::KnownTrunc, InstanceKind::SlabRemovedNull, 8, 0.1, 0.2, 80, 14'000);
  CHECK(acc_null >= 2.0 / 3.0);
  const double acc_sound = accept_rate(TesterKind::KnownTrunc, InstanceKind::SlabRemovedSoundness,
                                       8, 0.1, 0.2, 80, 15'000);
  CHECK(1.0 - acc_sound >= 2.0 / 3.0);
}

TEST_CASE("slab removal calibration zeroes the truncated mean") {
  const auto slab = calibrate_slab_removal(0.1, 0.2);
  // removed mass and zero-mean residuals are checked inside the constructor;
  // verify against the truncation module's Monte-Carlo estimate as well
  SplitRng rng(5);
  Instance inst = make_instance(InstanceKind::SlabRemovedSoundness, 4, 0.1, 0.2, rng);
  const auto est = truncated_mean(inst.spec.mu, inst.spec.set, {400'000, 17});
  CHECK(est.value.norm() <= 4.0 * est.std_error.norm() + 0.005);
  CHECK(slab.l < slab.r);
}

TEST_SUITE_END();
