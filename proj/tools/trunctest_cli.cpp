// Experiment harness for Gaussian mean testing under truncation.
//
// Subcommands: calibrate, sweep, hardinstance, verify, report.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/hardinstance.hpp"
#include "trunctest/instances.hpp"
#include "trunctest/likelihood.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/numeric.hpp"
#include "trunctest/parallel.hpp"
#include "trunctest/quadrature.hpp"
#include "trunctest/rng.hpp"
#include "trunctest/sampling.hpp"
#include "trunctest/statistics.hpp"
#include "trunctest/sweep.hpp"
#include "trunctest/testers.hpp"

namespace fs = std::filesystem;
using namespace trunctest;

namespace {

int g_checks_failed = 0;

void report(bool ok, const std::string& label, const std::string& detail = "") {
  std::printf("[%s] %s%s%s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.empty() ? "" : ": ",
              detail.c_str());
  if (!ok) ++g_checks_failed;
}

std::vector<TruncatedGaussianSpec> calibration_null_grid(TesterKind kind) {
  std::vector<TruncatedGaussianSpec> grid;
  auto direction = [](int d) {
    SplitRng rng(0xd1ec7);
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = rng.normal();
    return Vec(v.normalized());
  };
  switch (kind) {
    case TesterKind::UnknownTrunc: {
      grid.emplace_back(Vec::Zero(64), TruncationSet::full_space(64));
      grid.emplace_back(Vec::Zero(64), half_space_for_mass(Vec::Zero(64), direction(64), 0.005));
      grid.emplace_back(Vec::Zero(16), half_space_for_mass(Vec::Zero(16), direction(16), 0.005));
      break;
    }
    case TesterKind::KnownTrunc: {
      grid.emplace_back(Vec::Zero(64), half_space_for_mass(Vec::Zero(64), direction(64), 0.3));
      const auto hard = calibrate_hard_instance(0.1);
      grid.emplace_back(Vec::Zero(64), TruncationSet::half_space_tail(direction(64), hard.b));
      break;
    }
    case TesterKind::LearnThenTest: {
      grid.emplace_back(Vec::Zero(32), TruncationSet::full_space(32));
      break;
    }
  }
  return grid;
}

double calibration_alpha(TesterKind kind) {
  return kind == TesterKind::KnownTrunc ? 0.2 : 0.5;
}

int cmd_calibrate(const std::string& tester_arg, int trials, std::uint64_t seed, int threads,
                  const std::string& out_path) {
  std::vector<TesterKind> kinds;
  if (tester_arg == "all") {
    kinds = {TesterKind::UnknownTrunc, TesterKind::KnownTrunc, TesterKind::LearnThenTest};
  } else {
    kinds = {tester_kind_from_string(tester_arg)};
  }
  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["trials"] = trials;
  for (TesterKind kind : kinds) {
    CalibrationOptions opts;
    opts.alpha = calibration_alpha(kind);
    opts.trials = trials;
    opts.seed = seed;
    opts.threads = threads;
    std::printf("calibrating %s (alpha=%.3g, %d trials per cell)...\n", to_string(kind).c_str(),
                opts.alpha, trials);
    const TesterConfig cfg = calibrate_constants(kind, calibration_null_grid(kind), opts);
    std::printf("  -> c_n=%.6g c_thr=%.6g\n", cfg.c_n, cfg.c_thr);
    manifest["testers"][to_string(kind)] = {{"c_n", cfg.c_n},
                                            {"c_thr", cfg.c_thr},
                                            {"alpha", opts.alpha},
                                            {"min_accept_rate", opts.min_accept_rate}};
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) {
    std::fprintf(stderr, "cannot write manifest to %s\n", out_path.c_str());
    return 1;
  }
  out << manifest.dump(2) << '\n';
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, std::uint64_t seed,
              bool seed_given, int threads, const std::string& manifest_path,
              bool builtin_constants) {
  SweepSpec spec;
  if (config_path.empty()) {
    spec = default_sweep_spec();
  } else {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "cannot read config %s\n", config_path.c_str());
      return 1;
    }
    nlohmann::json j;
    in >> j;
    spec = sweep_spec_from_json(j);
  }
  if (seed_given) spec.base_seed = seed;
  spec.threads = threads;
  spec.output_dir = out_dir;

  if (!builtin_constants) {
    if (manifest_path.empty()) {
      std::fprintf(stderr,
                   "sweep requires a calibration manifest (--manifest FILE from `calibrate`) "
                   "or --builtin-constants\n");
      return 1;
    }
    std::ifstream in(manifest_path);
    if (!in) {
      std::fprintf(stderr, "calibration manifest missing: %s\n", manifest_path.c_str());
      return 1;
    }
    nlohmann::json j;
    in >> j;
    const auto& t = j.at("testers");
    if (t.contains("unknown_trunc")) spec.c_thr_unknown = t["unknown_trunc"].at("c_thr");
    if (t.contains("known_trunc")) spec.c_thr_known = t["known_trunc"].at("c_thr");
    if (t.contains("learn_then_test")) spec.c_thr_ltt = t["learn_then_test"].at("c_thr");
  }

  const auto curves = run_sweep(spec);
  std::size_t cells_done = 0;
  for (const auto& c : curves) cells_done += c.rates.size();
  std::size_t cells_want = 0;
  for (const auto& g : spec.grid) cells_want += g.n_ladder.size();
  std::printf("sweep complete: %zu/%zu (cell, n) points, results in %s\n", cells_done, cells_want,
              out_dir.c_str());
  return cells_done == cells_want ? 0 : 1;
}

int cmd_hardinstance(const std::vector<double>& eps_list, int dim, std::uint64_t seed,
                     const std::string& out_path) {
  nlohmann::json all = nlohmann::json::array();
  std::printf("%8s %12s %12s %12s %10s %14s\n", "eps", "alpha", "b", "chi2", "ratio", "floor(d)");
  for (double eps : eps_list) {
    const auto inst = calibrate_hard_instance(eps);
    const double chi2 = chi_square_closed_form(inst);
    const double ratio = inst.alpha / (eps * std::sqrt(std::log(1.0 / eps)));
    const double floor_d = sample_complexity_floor(inst, dim);
    std::printf("%8.4g %12.8f %12.8f %12.8f %10.4f %14.1f\n", eps, inst.alpha, inst.b, chi2, ratio,
                floor_d);
    nlohmann::json j;
    if (dim > 1) {
      const auto emb = embed(inst, dim, seed);
      j = to_json(emb);
    } else {
      j = {{"eps", inst.eps}, {"alpha", inst.alpha}, {"b", inst.b}, {"dim", 1}};
    }
    j["chi_square"] = chi2;
    j["sample_complexity_floor"] = floor_d;
    all.push_back(std::move(j));
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    out << all.dump(2) << '\n';
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

// Condensed property suites; the authoritative versions live in the test
// binaries, this command is the operational smoke check.
int cmd_verify(std::uint64_t seed, int threads, bool quick) {
  g_checks_failed = 0;
  const std::int64_t ks_n = quick ? 20'000 : 100'000;

  // 1. rejection sampler vs truncated CDF (KS at the 1% level)
  for (double eps : {0.01, 0.2, 0.5}) {
    const double b = normal_cdf_inv(1.0 - eps);
    Vec e = Vec::Zero(1);
    e[0] = 1.0;
    const TruncatedGaussianSpec spec1(Vec::Zero(1), TruncationSet::half_space_tail(e, b));
    const auto batch = sample_truncated(spec1, ks_n, derive_stream_seed(seed, 100 + eps * 1000));
    std::vector<double> xs(static_cast<std::size_t>(batch.n()));
    for (std::int64_t i = 0; i < batch.n(); ++i) xs[static_cast<std::size_t>(i)] = batch.data(i, 0);
    const double mass_b = normal_cdf(b);
    const double dstat =
        ks_statistic(std::move(xs), [&](double x) { return normal_cdf(std::min(x, b)) / mass_b; });
    char label[64];
    std::snprintf(label, sizeof(label), "sampler KS eps=%g", eps);
    char detail[64];
    std::snprintf(detail, sizeof(detail), "D=%.5f crit=%.5f", dstat,
                  ks_critical_value(batch.n(), 0.01));
    report(dstat < ks_critical_value(batch.n(), 0.01), label, detail);
  }

  // 2. hard-instance ladder: calibration residuals and chi^2 agreement
  bool ladder_ok = true;
  bool chi_ok = true;
  for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005}) {
    const auto inst = calibrate_hard_instance(eps);
    const double mass_res = std::abs(normal_cdf(inst.b - inst.alpha) - (1.0 - eps));
    const double mean_res =
        std::abs(inst.alpha - normal_pdf(inst.b - inst.alpha) / (1.0 - eps));
    if (mass_res > 1e-10 || mean_res > 1e-10) ladder_ok = false;
    const double closed = chi_square_closed_form(inst);
    const double quad = integrate_lower_tail(
                            [&](double x) {
                              const double da = normal_pdf(x - inst.alpha) / (1.0 - eps);
                              return da * da / normal_pdf(x);
                            },
                            inst.b, 1e-12)
                            .value -
                        1.0;
    if (std::abs(closed - quad) > 1e-8 || closed > 2.0 * (eps + inst.alpha * inst.alpha)) {
      chi_ok = false;
    }
  }
  report(ladder_ok, "hard-instance calibration residuals <= 1e-10");
  report(chi_ok, "chi-square closed form vs quadrature <= 1e-8, within 2(eps+alpha^2)");

  // 3. Z moment identity, quick Monte-Carlo
  {
    const int d = 16;
    const std::int64_t n = 400;
    const int seeds = quick ? 1000 : 4000;
    Vec e = Vec::Zero(d);
    e[0] = 1.0;
    const auto set = TruncationSet::half_space_tail(e, normal_cdf_inv(0.8));
    const TruncatedGaussianSpec spec2(Vec::Zero(d), set);
    const double target = truncated_mean(spec2.mu, set).value.squaredNorm();
    std::vector<double> zs(static_cast<std::size_t>(seeds));
    parallel_for(seeds, threads, [&](std::int64_t s) {
      const auto batch = sample_truncated(spec2, 2 * n, derive_stream_seed(seed, 5000 + s));
      const auto [x, y] = split_batch(batch);
      zs[static_cast<std::size_t>(s)] = statistic_z(x, y).value;
    });
    RunningMoments rm;
    for (double z : zs) rm.add(z);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "mean(Z)=%.5f target=%.5f stderr=%.5f", rm.mean(), target,
                  rm.std_error());
    report(std::abs(rm.mean() - target) <= 4.0 * rm.std_error(), "E[Z] = ||mu_S||^2", detail);
  }

  // 4. likelihood identities in d = 1
  {
    Vec e = Vec::Zero(1);
    e[0] = 1.0;
    Vec mu(1);
    mu << 0.3;
    LikelihoodContext ctx(TruncationSet::half_space_tail(e, 1.0), mu);
    const double gnorm = grad_neg_log_likelihood(ctx, mu).value.norm();
    report(gnorm <= 1e-7, "grad lbar(mu) = 0", "norm=" + std::to_string(gnorm));

    Vec v(1);
    v << -0.2;
    const double h = 1e-4;
    Vec vp = v, vm = v;
    vp[0] += h;
    vm[0] -= h;
    const double fd =
        (neg_log_likelihood(ctx, vp).value - neg_log_likelihood(ctx, vm).value) / (2.0 * h);
    const double g = grad_neg_log_likelihood(ctx, v).value[0];
    report(std::abs(fd - g) <= 1e-6 * std::max(1.0, std::abs(g)), "grad matches central differences");

    const double lambda0 = strong_convexity_floor(ctx);
    const double hess = (neg_log_likelihood(ctx, vp).value - 2.0 * neg_log_likelihood(ctx, v).value +
                         neg_log_likelihood(ctx, vm).value) /
                        (h * h);
    report(hess >= lambda0, "numeric Hessian >= lambda0",
           "H=" + std::to_string(hess) + " lambda0=" + std::to_string(lambda0));

    const auto gap = mean_gap_lower_bound_check(TruncationSet::half_space_tail(e, 1.0416212335729142),
                                                Vec::Constant(1, 0.2), 0.25);
    report(gap.gap >= gap.floor, "mean gap >= strong-convexity floor");
  }

  // 5. determinism of a tiny sweep
  {
    SweepSpec s1;
    s1.trials = 40;
    s1.base_seed = 97;
    s1.threads = threads;
    s1.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::FullSpaceNull, 8, 0.5, 0.0, {64}});
    const auto c1 = run_sweep(s1);
    const auto c2 = run_sweep(s1);
    report(c1[0].rates[0].successes == c2[0].rates[0].successes, "sweep determinism",
           std::to_string(c1[0].rates[0].successes) + " == " +
               std::to_string(c2[0].rates[0].successes));
  }

  std::printf("%s\n", g_checks_failed == 0 ? "verify: all checks passed"
                                           : "verify: FAILURES detected");
  return g_checks_failed == 0 ? 0 : 1;
}

int cmd_report(const std::string& results_path, const std::string& out_dir) {
  const auto curves = parse_results_csv(results_path);
  if (curves.empty()) {
    std::fprintf(stderr, "no rows parsed from %s\n", results_path.c_str());
    return 1;
  }
  SweepSpec spec;
  spec.output_dir = out_dir;
  for (const auto& c : curves) spec.grid.push_back(c.cell);
  if (!curves.empty() && !curves[0].rates.empty()) {
    spec.trials = static_cast<int>(curves[0].rates[0].trials);
  }
  emit_report(curves, spec);
  std::printf("report written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian mean testing under truncation: experiment harness"};
  app.require_subcommand(1);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "calibrate tester threshold constants on null grids");
  std::string cal_tester = "all";
  int cal_trials = 400;
  std::uint64_t cal_seed = 0xca11b;
  int cal_threads = default_thread_count();
  std::string cal_out = "calibration.json";
  cal->add_option("--tester", cal_tester, "all|unknown_trunc|known_trunc|learn_then_test");
  cal->add_option("--trials", cal_trials, "trials per null cell");
  cal->add_option("--seed", cal_seed, "calibration seed");
  cal->add_option("--threads", cal_threads, "worker threads");
  cal->add_option("--out", cal_out, "manifest output path");

  // sweep
  auto* sw = app.add_subcommand("sweep", "run a Monte-Carlo grid and emit power curves");
  std::string sw_config;
  std::string sw_out = "sweep_out";
  std::uint64_t sw_seed = 0;
  int sw_threads = default_thread_count();
  std::string sw_manifest;
  bool sw_builtin = false;
  sw->add_option("--config", sw_config, "sweep config JSON (defaults to the built-in grid)");
  sw->add_option("--out", sw_out, "output directory");
  auto* seed_opt = sw->add_option("--seed", sw_seed, "base seed override");
  sw->add_option("--threads", sw_threads, "worker threads");
  sw->add_option("--manifest", sw_manifest, "calibration manifest from `calibrate`");
  sw->add_flag("--builtin-constants", sw_builtin, "use the frozen default constants");

  // hardinstance
  auto* hi = app.add_subcommand("hardinstance", "calibrate Appendix-style lower-bound instances");
  std::vector<double> hi_eps = {0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
  int hi_dim = 1;
  std::uint64_t hi_seed = 7;
  std::string hi_out;
  hi->add_option("--eps", hi_eps, "eps ladder");
  hi->add_option("--dim", hi_dim, "embedding dimension (1 = no embedding)");
  hi->add_option("--seed", hi_seed, "direction seed");
  hi->add_option("--out", hi_out, "write instances JSON here");

  // verify
  auto* ver = app.add_subcommand("verify", "run the condensed property suites");
  std::uint64_t ver_seed = 0x5eed;
  int ver_threads = default_thread_count();
  bool ver_quick = false;
  ver->add_option("--seed", ver_seed, "seed");
  ver->add_option("--threads", ver_threads, "worker threads");
  ver->add_flag("--quick", ver_quick, "smaller sample sizes");

  // report
  auto* rep = app.add_subcommand("report", "regenerate summary/plot files from results.csv");
  std::string rep_results;
  std::string rep_out = "report_out";
  rep->add_option("--results", rep_results, "path to results.csv")->required();
  rep->add_option("--out", rep_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cal->parsed()) return cmd_calibrate(cal_tester, cal_trials, cal_seed, cal_threads, cal_out);
    if (sw->parsed()) {
      return cmd_sweep(sw_config, sw_out, sw_seed, seed_opt->count() > 0, sw_threads, sw_manifest,
                       sw_builtin);
    }
    if (hi->parsed()) return cmd_hardinstance(hi_eps, hi_dim, hi_seed, hi_out);
    if (ver->parsed()) return cmd_verify(ver_seed, ver_threads, ver_quick);
    if (rep->parsed()) return cmd_report(rep_results, rep_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
