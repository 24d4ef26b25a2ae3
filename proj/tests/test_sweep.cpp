#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/parallel.hpp"
#include "trunctest/sweep.hpp"

using namespace trunctest;
namespace fs = std::filesystem;

namespace {

SweepSpec tiny_spec(const fs::path& out) {
  SweepSpec spec;
  spec.trials = 60;
  spec.base_seed = 555;
  spec.threads = default_thread_count();
  spec.output_dir = out;
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::FullSpaceNull, 8, 0.5, 0.0,
                       {64, 128}});
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::HalfSpaceWorstSoundness, 8, 0.5,
                       0.01, {128, 512}});
  return spec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE_BEGIN("sweep");

TEST_CASE("one-cell grid produces a full curve") {
  SweepSpec spec;
  spec.trials = 100;
  spec.base_seed = 7;
  spec.threads = default_thread_count();
  spec.grid.push_back({TesterKind::UnknownTrunc, InstanceKind::FullSpaceNull, 4, 0.5, 0.0, {80}});
  const auto curves = run_sweep(spec);
  REQUIRE(curves.size() == 1);
  REQUIRE(curves[0].rates.size() == 1);
  CHECK(curves[0].rates[0].trials == 100);
  CHECK(curves[0].rates[0].successes >= 0);
  CHECK(curves[0].rates[0].rate >= 0.0);
  CHECK(curves[0].rates[0].rate <= 1.0);
  CHECK(curves[0].rates[0].halfwidth > 0.0);
  CHECK(curves[0].rates[0].halfwidth < 0.15);
}

TEST_CASE("identical spec twice: byte-identical results.csv") {
  TempDir a("trunctest_sweep_a");
  TempDir b("trunctest_sweep_b");
  auto sa = tiny_spec(a.path);
  auto sb = tiny_spec(b.path);
  run_sweep(sa);
  run_sweep(sb);
  const auto ca = slurp(a.path / "results.csv");
  const auto cb = slurp(b.path / "results.csv");
  CHECK(!ca.empty());
  CHECK(ca == cb);
  CHECK(fs::exists(a.path / "summary.json"));
  CHECK(fs::exists(a.path / "curve_000.dat"));
  CHECK(fs::exists(a.path / "curve_001.dat"));
  CHECK_FALSE(fs::exists(a.path / "results.partial.csv"));
}

TEST_CASE("resume produces the same bytes as an uninterrupted run") {
  TempDir full("trunctest_sweep_full");
  TempDir resumed("trunctest_sweep_resume");
  auto spec_full = tiny_spec(full.path);
  run_sweep(spec_full);
  const auto reference = slurp(full.path / "results.csv");

  // simulate an interrupted run: pre-seed the partial file with the first two
  // completed rows of the reference results
  std::istringstream ref(reference);
  std::string line, header;
  std::getline(ref, header);
  std::ofstream partial(resumed.path / "results.partial.csv");
  for (int i = 0; i < 2 && std::getline(ref, line); ++i) partial << line << '\n';
  partial.close();

  auto spec_res = tiny_spec(resumed.path);
  run_sweep(spec_res);
  CHECK(slurp(resumed.path / "results.csv") == reference);
}

TEST_CASE("results.csv round-trips through parse_results_csv") {
  TempDir dir("trunctest_sweep_rt");
  auto spec = tiny_spec(dir.path);
  const auto curves = run_sweep(spec);
  const auto parsed = parse_results_csv(dir.path / "results.csv");
  REQUIRE(parsed.size() == curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    REQUIRE(parsed[i].rates.size() == curves[i].rates.size());
    CHECK(to_string(parsed[i].cell.tester) == to_string(curves[i].cell.tester));
    CHECK(to_string(parsed[i].cell.instance) == to_string(curves[i].cell.instance));
    CHECK(parsed[i].cell.d == curves[i].cell.d);
    CHECK(parsed[i].cell.alpha == curves[i].cell.alpha);
    CHECK(parsed[i].cell.eps == curves[i].cell.eps);
    for (std::size_t k = 0; k < curves[i].rates.size(); ++k) {
      CHECK(parsed[i].rates[k].n == curves[i].rates[k].n);
      CHECK(parsed[i].rates[k].successes == curves[i].rates[k].successes);
      CHECK(parsed[i].rates[k].rate == curves[i].rates[k].rate);
      CHECK(parsed[i].rates[k].halfwidth == curves[i].rates[k].halfwidth);
    }
  }
}

TEST_CASE("config json round trip and validation") {
  const auto spec = tiny_spec("");
  const auto j = sweep_spec_to_json(spec);
  const auto back = sweep_spec_from_json(j);
  CHECK(back.trials == spec.trials);
  CHECK(back.base_seed == spec.base_seed);
  CHECK(back.grid.size() == spec.grid.size());
  CHECK(config_hash(back) == config_hash(spec));

  nlohmann::json bad = j;
  bad["grid"][0]["n_ladder"] = {128, 64};
  CHECK_THROWS_AS(sweep_spec_from_json(bad), PreconditionError);
  nlohmann::json empty = j;
  empty["grid"] = nlohmann::json::array();
  CHECK_THROWS_AS(sweep_spec_from_json(empty), PreconditionError);
}

TEST_CASE("emit_report refuses empty input") {
  SweepSpec spec = tiny_spec("/tmp/trunctest_unused");
  CHECK_THROWS_AS(emit_report({}, spec), PreconditionError);
}

TEST_CASE("default spec covers the three regimes and both knowledge rows") {
  const auto spec = default_sweep_spec();
  CHECK(spec.trials >= 100);
  bool has_unknown_r1 = false, has_hard = false, has_slab = false, has_known = false;
  for (const auto& cell : spec.grid) {
    if (cell.tester == TesterKind::UnknownTrunc && cell.instance == InstanceKind::HalfSpaceNull)
      has_unknown_r1 = true;
    if (cell.instance == InstanceKind::HardEmbeddedSoundness) has_hard = true;
    if (cell.instance == InstanceKind::SlabRemovedSoundness) has_slab = true;
    if (cell.tester == TesterKind::KnownTrunc) has_known = true;
    REQUIRE(!cell.n_ladder.empty());
    for (std::size_t i = 1; i < cell.n_ladder.size(); ++i) {
      CHECK(cell.n_ladder[i] > cell.n_ladder[i - 1]);
    }
  }
  CHECK(has_unknown_r1);
  CHECK(has_hard);
  CHECK(has_slab);
  CHECK(has_known);
}

TEST_SUITE_END();
