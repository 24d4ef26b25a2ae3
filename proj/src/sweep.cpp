#include "trunctest/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/likelihood.hpp"
#include "trunctest/numeric.hpp"
#include "trunctest/parallel.hpp"
#include "trunctest/rng.hpp"

namespace trunctest {

namespace {

constexpr const char* kCommitPlaceholder = "0000000";
constexpr const char* kResultsName = "results.csv";
constexpr const char* kPartialName = "results.partial.csv";

const char* kResultsHeader =
    "tester,instance,d,alpha,eps,n,trials,successes,rate,wilson_halfwidth,base_seed,config_hash,"
    "commit\n";

std::string format_row(const GridCell& cell, const RatePoint& pt, std::uint64_t base_seed,
                       const std::string& hash) {
  char buf[384];
  std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.17g,%.17g,%lld,%lld,%lld,%.17g,%.17g,%llu,%s,%s\n",
                to_string(cell.tester).c_str(), to_string(cell.instance).c_str(), cell.d,
                cell.alpha, cell.eps, static_cast<long long>(pt.n),
                static_cast<long long>(pt.trials), static_cast<long long>(pt.successes), pt.rate,
                pt.halfwidth, static_cast<unsigned long long>(base_seed), hash.c_str(),
                kCommitPlaceholder);
  return buf;
}

double c_thr_for(const SweepSpec& spec, TesterKind kind) {
  switch (kind) {
    case TesterKind::UnknownTrunc: return spec.c_thr_unknown;
    case TesterKind::KnownTrunc: return spec.c_thr_known;
    case TesterKind::LearnThenTest: return spec.c_thr_ltt;
  }
  return 1.0;
}

bool run_single_trial(const SweepSpec& spec, const GridCell& cell, std::int64_t n,
                      std::uint64_t trial_seed) {
  SplitRng direction_rng(trial_seed, 0xd15);
  Instance inst = make_instance(cell.instance, cell.d, cell.alpha, cell.eps, direction_rng);
  TesterConfig cfg = TesterConfig::defaults(cell.tester, inst.alpha, derive_stream_seed(trial_seed, 1));
  cfg.c_thr = c_thr_for(spec, cell.tester);
  cfg.n_override = n;
  const SampleSource source = source_from_spec(inst.spec);

  TestVerdict verdict{};
  switch (cell.tester) {
    case TesterKind::UnknownTrunc:
      verdict = test_unknown_truncation(source, cell.d, cfg);
      break;
    case TesterKind::KnownTrunc: {
      Vec mu_s;
      if (inst.mu_s_null) {
        mu_s = *inst.mu_s_null;
      } else {
        mu_s = null_truncated_mean(inst.spec.set, cfg.alpha * cfg.alpha / 100.0,
                                   derive_stream_seed(trial_seed, 2))
                   .value;
      }
      verdict = test_known_truncation(source, inst.spec.set, cell.d, cfg, mu_s);
      break;
    }
    case TesterKind::LearnThenTest:
      verdict = test_learn_then_test(source, cell.d, cfg);
      break;
  }
  const bool accepted = verdict.decision == Decision::Accept;
  return inst.is_null ? accepted : !accepted;
}

RatePoint run_cell_point(const SweepSpec& spec, std::size_t cell_idx, std::size_t n_idx) {
  const GridCell& cell = spec.grid[cell_idx];
  const std::int64_t n = cell.n_ladder[n_idx];
  std::atomic<std::int64_t> successes{0};
  parallel_for(spec.trials, spec.threads, [&](std::int64_t trial) {
    const std::uint64_t trial_seed = derive_stream_seed(
        spec.base_seed, (static_cast<std::uint64_t>(cell_idx) << 40) ^
                            (static_cast<std::uint64_t>(n_idx) << 32) ^
                            static_cast<std::uint64_t>(trial));
    if (run_single_trial(spec, cell, n, trial_seed)) successes.fetch_add(1);
  });
  const auto s = successes.load();
  return RatePoint{n, s, spec.trials,
                   static_cast<double>(s) / static_cast<double>(spec.trials),
                   wilson_halfwidth(s, spec.trials)};
}

}  // namespace

SweepSpec default_sweep_spec() {
  SweepSpec spec;
  spec.trials = 120;
  spec.base_seed = 20240901;
  spec.threads = default_thread_count();
  auto sqrt_ladder = [](int d, double alpha) {
    const auto n = static_cast<std::int64_t>(std::ceil(40.0 * std::sqrt(double(d)) / (alpha * alpha)));
    return std::vector<std::int64_t>{n / 4, n, 4 * n};
  };
  const double a_hard = 0.194998146591652;  // alpha(eps = 0.1)
  const double a_slab = 0.1;
  // Regime 1 (eps sqrt(log 1/eps) << alpha), unknown truncation: sqrt(d) works.
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::HalfSpaceNull, 64, 0.5, 0.005,
                       sqrt_ladder(64, 0.5)});
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::HalfSpaceWorstSoundness, 64, 0.5,
                       0.005, sqrt_ladder(64, 0.5)});
  // Regime 2 (eps <~ alpha <~ eps sqrt(log 1/eps)): the hard instance fools
  // the sqrt(d) tester at any n in the ladder.
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::HardSetNull, 64, a_hard, 0.1,
                       sqrt_ladder(64, a_hard)});
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::HardEmbeddedSoundness, 64, a_hard,
                       0.1, sqrt_ladder(64, a_hard)});
  spec.grid.push_back({TesterKind::LearnThenTest, InstanceKind::HardEmbeddedSoundness, 32, a_hard,
                       0.1,
                       {static_cast<std::int64_t>(std::ceil(5.0 * 32 / (a_hard * a_hard))),
                        static_cast<std::int64_t>(std::ceil(20.0 * 32 / (a_hard * a_hard)))}});
  // Regime 3 (alpha <~ eps), unknown truncation: first-moment-zeroed slab
  // removal; testing impossible for the mean statistic.
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::SlabRemovedSoundness, 16, a_slab,
                       0.2, sqrt_ladder(16, a_slab)});
  // Known truncation: sqrt(d) across all three regimes.
  spec.grid.push_back({TesterKind::KnownTrunc, InstanceKind::HalfSpaceNull, 64, 0.2, 0.005,
                       sqrt_ladder(64, 0.2)});
  spec.grid.push_back({TesterKind::KnownTrunc, InstanceKind::HalfSpaceWorstSoundness, 64, 0.2,
                       0.005, sqrt_ladder(64, 0.2)});
  spec.grid.push_back({TesterKind::KnownTrunc, InstanceKind::HardSetNull, 64, a_hard, 0.1,
                       sqrt_ladder(64, a_hard)});
  spec.grid.push_back({TesterKind::KnownTrunc, InstanceKind::HardEmbeddedSoundness, 64, a_hard, 0.1,
                       sqrt_ladder(64, a_hard)});
  spec.grid.push_back({TesterKind::KnownTrunc, InstanceKind::SlabRemovedNull, 16, a_slab, 0.2,
                       sqrt_ladder(16, a_slab)});
  spec.grid.push_back({TesterKind::KnownTrunc, InstanceKind::SlabRemovedSoundness, 16, a_slab, 0.2,
                       sqrt_ladder(16, a_slab)});
  return spec;
}

SweepSpec sweep_spec_from_json(const nlohmann::json& config) {
  SweepSpec spec;
  spec.trials = config.value("trials", 200);
  spec.base_seed = config.value("base_seed", std::uint64_t{1});
  if (config.contains("c_thr")) {
    const auto& c = config.at("c_thr");
    spec.c_thr_unknown = c.value("unknown_trunc", spec.c_thr_unknown);
    spec.c_thr_known = c.value("known_trunc", spec.c_thr_known);
    spec.c_thr_ltt = c.value("learn_then_test", spec.c_thr_ltt);
  }
  if (!config.contains("grid") || !config.at("grid").is_array() || config.at("grid").empty()) {
    throw PreconditionError("sweep config: non-empty 'grid' array required");
  }
  for (const auto& jc : config.at("grid")) {
    GridCell cell;
    cell.tester = tester_kind_from_string(jc.at("tester").get<std::string>());
    cell.instance = instance_kind_from_string(jc.at("instance").get<std::string>());
    cell.d = jc.at("d").get<int>();
    cell.alpha = jc.at("alpha").get<double>();
    cell.eps = jc.at("eps").get<double>();
    cell.n_ladder = jc.at("n_ladder").get<std::vector<std::int64_t>>();
    if (cell.n_ladder.empty()) throw PreconditionError("sweep config: empty n_ladder");
    for (std::size_t i = 1; i < cell.n_ladder.size(); ++i) {
      if (cell.n_ladder[i] <= cell.n_ladder[i - 1]) {
        throw PreconditionError("sweep config: n_ladder must be strictly increasing");
      }
    }
    spec.grid.push_back(std::move(cell));
  }
  if (spec.trials < 1) throw PreconditionError("sweep config: trials must be >= 1");
  return spec;
}

nlohmann::json sweep_spec_to_json(const SweepSpec& spec) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& cell : spec.grid) {
    grid.push_back({{"tester", to_string(cell.tester)},
                    {"instance", to_string(cell.instance)},
                    {"d", cell.d},
                    {"alpha", cell.alpha},
                    {"eps", cell.eps},
                    {"n_ladder", cell.n_ladder}});
  }
  return nlohmann::json{{"trials", spec.trials},
                        {"base_seed", spec.base_seed},
                        {"c_thr",
                         {{"unknown_trunc", spec.c_thr_unknown},
                          {"known_trunc", spec.c_thr_known},
                          {"learn_then_test", spec.c_thr_ltt}}},
                        {"grid", grid}};
}

std::string config_hash(const SweepSpec& spec) {
  const std::string dump = sweep_spec_to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<PowerCurve> run_sweep(const SweepSpec& spec) {
  if (spec.grid.empty()) throw PreconditionError("run_sweep: empty grid");
  namespace fs = std::filesystem;
  const bool persist = !spec.output_dir.empty();
  const std::string hash = config_hash(spec);

  // Resume: collect (cell, n_idx) -> row already completed in a previous run.
  std::map<std::pair<std::size_t, std::size_t>, RatePoint> done;
  const fs::path partial_path = spec.output_dir / kPartialName;
  if (persist) {
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    if (ec) throw PreconditionError("run_sweep: cannot create output dir " + spec.output_dir.string());
    if (fs::exists(partial_path)) {
      for (const PowerCurve& curve : parse_results_csv(partial_path)) {
        for (std::size_t ci = 0; ci < spec.grid.size(); ++ci) {
          const GridCell& g = spec.grid[ci];
          if (to_string(g.tester) != to_string(curve.cell.tester) ||
              to_string(g.instance) != to_string(curve.cell.instance) || g.d != curve.cell.d ||
              g.alpha != curve.cell.alpha || g.eps != curve.cell.eps) {
            continue;
          }
          for (const RatePoint& pt : curve.rates) {
            for (std::size_t ni = 0; ni < g.n_ladder.size(); ++ni) {
              if (g.n_ladder[ni] == pt.n && pt.trials == spec.trials) done[{ci, ni}] = pt;
            }
          }
        }
      }
    }
  }

  std::ofstream partial;
  if (persist) {
    partial.open(partial_path, std::ios::app);
    if (!partial) throw PreconditionError("run_sweep: cannot write to " + partial_path.string());
  }

  std::vector<PowerCurve> curves;
  curves.reserve(spec.grid.size());
  for (std::size_t ci = 0; ci < spec.grid.size(); ++ci) {
    PowerCurve curve{spec.grid[ci], {}};
    for (std::size_t ni = 0; ni < spec.grid[ci].n_ladder.size(); ++ni) {
      RatePoint pt{};
      if (auto it = done.find({ci, ni}); it != done.end()) {
        pt = it->second;
      } else {
        pt = run_cell_point(spec, ci, ni);
        if (persist) {
          partial << format_row(spec.grid[ci], pt, spec.base_seed, hash);
          partial.flush();
        }
      }
      curve.rates.push_back(pt);
    }
    curves.push_back(std::move(curve));
  }

  if (persist) {
    partial.close();
    emit_report(curves, spec);
    std::error_code ec;
    fs::remove(partial_path, ec);
  }
  return curves;
}

void emit_report(const std::vector<PowerCurve>& curves, const SweepSpec& spec) {
  if (curves.empty()) throw PreconditionError("emit_report: no curves");
  namespace fs = std::filesystem;
  fs::create_directories(spec.output_dir);
  const std::string hash = config_hash(spec);

  std::ofstream csv(spec.output_dir / kResultsName, std::ios::trunc);
  if (!csv) throw PreconditionError("emit_report: cannot write results.csv");
  csv << kResultsHeader;
  for (const auto& curve : curves) {
    for (const auto& pt : curve.rates) {
      csv << format_row(curve.cell, pt, spec.base_seed, hash);
    }
  }
  csv.close();

  nlohmann::json cells = nlohmann::json::array();
  for (const auto& curve : curves) {
    nlohmann::json rates = nlohmann::json::array();
    for (const auto& pt : curve.rates) {
      rates.push_back({{"n", pt.n},
                       {"trials", pt.trials},
                       {"successes", pt.successes},
                       {"rate", pt.rate},
                       {"wilson_halfwidth", pt.halfwidth}});
    }
    cells.push_back({{"tester", to_string(curve.cell.tester)},
                     {"instance", to_string(curve.cell.instance)},
                     {"d", curve.cell.d},
                     {"alpha", curve.cell.alpha},
                     {"eps", curve.cell.eps},
                     {"success_means", curve.cell.instance == InstanceKind::FullSpaceNull ||
                                               curve.cell.instance == InstanceKind::HalfSpaceNull ||
                                               curve.cell.instance == InstanceKind::HardSetNull ||
                                               curve.cell.instance == InstanceKind::SlabRemovedNull
                                           ? "ACCEPT"
                                           : "REJECT"},
                     {"rates", rates}});
  }
  nlohmann::json summary{{"base_seed", spec.base_seed},
                         {"trials", spec.trials},
                         {"config_hash", hash},
                         {"commit", kCommitPlaceholder},
                         {"c_thr",
                          {{"unknown_trunc", spec.c_thr_unknown},
                           {"known_trunc", spec.c_thr_known},
                           {"learn_then_test", spec.c_thr_ltt}}},
                         {"cells", cells}};
  std::ofstream js(spec.output_dir / "summary.json", std::ios::trunc);
  js << summary.dump(2) << '\n';
  js.close();

  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    char name[64];
    std::snprintf(name, sizeof(name), "curve_%03zu.dat", ci);
    std::ofstream dat(spec.output_dir / name, std::ios::trunc);
    dat << "# " << to_string(curves[ci].cell.tester) << ' ' << to_string(curves[ci].cell.instance)
        << " d=" << curves[ci].cell.d << " alpha=" << curves[ci].cell.alpha
        << " eps=" << curves[ci].cell.eps << '\n';
    char buf[128];
    for (const auto& pt : curves[ci].rates) {
      std::snprintf(buf, sizeof(buf), "%lld %.17g %.17g\n", static_cast<long long>(pt.n), pt.rate,
                    pt.halfwidth);
      dat << buf;
    }
  }
}

std::vector<PowerCurve> parse_results_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw PreconditionError("parse_results_csv: cannot open " + csv_path.string());
  std::vector<PowerCurve> curves;
  std::string line;
  auto matches = [](const GridCell& a, const GridCell& b) {
    return a.tester == b.tester && a.instance == b.instance && a.d == b.d && a.alpha == b.alpha &&
           a.eps == b.eps;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("tester,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 13) continue;
    GridCell cell;
    cell.tester = tester_kind_from_string(fields[0]);
    cell.instance = instance_kind_from_string(fields[1]);
    cell.d = std::stoi(fields[2]);
    cell.alpha = std::stod(fields[3]);
    cell.eps = std::stod(fields[4]);
    RatePoint pt;
    pt.n = std::stoll(fields[5]);
    pt.trials = std::stoll(fields[6]);
    pt.successes = std::stoll(fields[7]);
    pt.rate = std::stod(fields[8]);
    pt.halfwidth = std::stod(fields[9]);
    PowerCurve* curve = nullptr;
    for (auto& c : curves) {
      if (matches(c.cell, cell)) {
        curve = &c;
        break;
      }
    }
    if (curve == nullptr) {
      curves.push_back(PowerCurve{cell, {}});
      curve = &curves.back();
    }
    curve->cell.n_ladder.push_back(pt.n);
    curve->rates.push_back(pt);
  }
  return curves;
}

}  // namespace trunctest
