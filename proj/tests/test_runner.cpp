#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mimic/io.hpp"
#include "mimic/runner.hpp"

using namespace mimic;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_values = {8, 12};
  c.runs_per_n = 3;
  c.master_seed = 42;
  return c;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mimic_runner_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string runs_text(std::span<const RunRecord> records) {
  std::ostringstream ss;
  write_runs_csv(ss, records);
  write_trace_csv(ss, records);
  return ss.str();
}

} // namespace

TEST_CASE("population sizes follow the scaling rule") {
  ExperimentConfig c;
  CHECK(c.params(50).lambda == 2347);
  CHECK(c.params(50).mu == 293);
  CHECK(c.params(100).lambda == 5526);
  CHECK(c.params(100).mu == 690);
  CHECK(c.params(200).lambda == static_cast<std::size_t>(std::floor(12 * 200 * std::log(200.0))));
  CHECK(c.n_values.front() == 50);
  CHECK(c.n_values.back() == 200);
  CHECK(c.n_values.size() == 16);
}

TEST_CASE("config validation") {
  ExperimentConfig c = small_config();
  CHECK_NOTHROW(c.validate());
  c.n_values = {7};
  CHECK_THROWS(c.validate());
  c = small_config();
  c.runs_per_n = 0;
  CHECK_THROWS(c.validate());
  CHECK_THROWS(ExperimentConfig::grid(10, 5, 1));
  CHECK(parse_snapshot_policy("all") == SnapshotPolicy::every_iteration);
  CHECK(parse_snapshot_policy(to_string(SnapshotPolicy::final)) == SnapshotPolicy::final);
  CHECK_THROWS(parse_snapshot_policy("sometimes"));
}

TEST_CASE("nearest-rank quartiles") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(nearest_rank(v, 1, 4) == 25);
  CHECK(nearest_rank(v, 1, 2) == 50);
  CHECK(nearest_rank(v, 3, 4) == 75);
  const std::vector<double> same(7, 3.5);
  CHECK(nearest_rank(same, 1, 4) == 3.5);
  CHECK(nearest_rank(same, 3, 4) == 3.5);
  const std::vector<double> three = {1, 2, 3};
  CHECK(nearest_rank(three, 1, 4) == 1);
  CHECK(nearest_rank(three, 1, 2) == 2);
  CHECK(nearest_rank(three, 3, 4) == 3);
  CHECK_THROWS(nearest_rank(std::vector<double>{}, 1, 2));
}

TEST_CASE("seeds are a pure function of (master, n, run)") {
  CHECK(run_seed(1, 50, 3) == run_seed(1, 50, 3));
  CHECK(run_seed(1, 50, 3) != run_seed(1, 50, 4));
  CHECK(run_seed(1, 50, 3) != run_seed(1, 52, 3));
  CHECK(run_seed(1, 50, 3) != run_seed(2, 50, 3));
}

TEST_CASE("a run reproduces in isolation and satisfies the protocol") {
  const auto config = small_config();
  const auto grid = run_grid(config);
  REQUIRE(grid.size() == 6);
  for (const auto& r : grid) {
    const auto alone = run_single(config, r.n, r.run_index);
    CHECK(alone.optimum_counts == r.optimum_counts);
    CHECK(alone.seed == r.seed);

    CHECK_FALSE(r.aborted);
    const std::size_t T = r.first_optimum_iteration;
    REQUIRE(T >= 1);
    CHECK(r.total_iterations == 2 * T);
    REQUIRE(r.optimum_counts.size() == 2 * T);
    CHECK(r.optimum_counts[T - 1] >= 1);
    for (std::size_t t = 0; t + 1 < T; ++t) CHECK(r.optimum_counts[t] == 0);
    CHECK(r.fitness_evaluations == r.lambda * r.total_iterations);
    CHECK(r.total_optima == std::accumulate(r.optimum_counts.begin(), r.optimum_counts.end(), std::uint64_t{0}));
    CHECK(r.distinct_optima + r.duplicates == r.total_optima);
    CHECK(r.distinct_optima <= (std::uint64_t{1} << (r.n / 2)));
    REQUIRE(r.snapshots.size() == 1);
    CHECK(r.snapshots[0].iteration == r.total_iterations);
    CHECK(r.quality.optimum_probability.has_value());
    CHECK(r.quality.central.has_value() == r.quality.permutation_correct);
  }
}

TEST_CASE("snapshot policies") {
  auto config = small_config();
  config.snapshots = SnapshotPolicy::none;
  CHECK(run_single(config, 8, 0).snapshots.empty());
  config.snapshots = SnapshotPolicy::every_iteration;
  const auto r = run_single(config, 8, 0);
  REQUIRE(r.snapshots.size() == r.total_iterations + 1);
  for (std::size_t t = 0; t < r.snapshots.size(); ++t) CHECK(r.snapshots[t].iteration == t);
  CHECK(r.snapshots[0].model == initial_model(8));
  CHECK(r.snapshots[1].model != initial_model(8));
  CHECK(snapshot_file_name(r, r.snapshots[0]) == "n8_run0_it0.csv");
  config.snapshots = SnapshotPolicy::final;
  const auto f = run_single(config, 8, 0);
  CHECK(f.snapshots.back().model == r.snapshots.back().model);
  CHECK(snapshot_file_name(f, f.snapshots[0]) == "n8_run0_final.csv");
}

TEST_CASE("iteration cap aborts the run") {
  ExperimentConfig c;
  c.n_values = {40};
  c.runs_per_n = 1;
  c.lambda_factor = 0.5; // tiny population: an optimum in iteration 1 is essentially impossible
  c.iteration_cap = 1;
  const auto r = run_single(c, 40, 0);
  CHECK(r.aborted);
  CHECK(r.first_optimum_iteration == 0);
  CHECK(r.total_iterations == 1);
  CHECK_FALSE(post_discovery_median_fraction(r).has_value());
  const std::vector<RunRecord> only = {r};
  CHECK(aggregate(only, "total_iterations").points.empty());
}

TEST_CASE("aggregation") {
  const auto records = run_grid(small_config());
  auto shuffled = records;
  std::reverse(shuffled.begin(), shuffled.end());
  for (auto metric : metric_names()) {
    const auto a = aggregate(records, metric);
    const auto b = aggregate(shuffled, metric);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].n == b.points[i].n);
      CHECK(a.points[i].q25 == b.points[i].q25);
      CHECK(a.points[i].median == b.points[i].median);
      CHECK(a.points[i].q75 == b.points[i].q75);
      CHECK(a.points[i].q25 <= a.points[i].median);
      CHECK(a.points[i].median <= a.points[i].q75);
    }
  }
  CHECK_THROWS_AS(aggregate(records, "no_such_metric"), std::invalid_argument);

  const auto t = aggregate(records, "iterations_to_first_optimum");
  REQUIRE(t.points.size() == 2);
  CHECK(t.points[0].n == 8);
  CHECK(t.points[0].count == 3);
  std::vector<double> ts;
  for (const auto& r : records)
    if (r.n == 8) ts.push_back(static_cast<double>(r.first_optimum_iteration));
  std::sort(ts.begin(), ts.end());
  CHECK(t.points[0].median == ts[1]);
}

TEST_CASE("post-discovery median fraction") {
  RunRecord r;
  r.lambda = 10;
  r.first_optimum_iteration = 3;
  r.total_iterations = 6;
  r.optimum_counts = {0, 0, 1, 5, 9, 7};
  CHECK(post_discovery_median_fraction(r) == 0.7);
}

TEST_CASE("outputs round-trip through CSV") {
  const auto records = run_grid(small_config());
  std::vector<AggregateSeries> series;
  for (auto m : metric_names()) series.push_back(aggregate(records, m));
  const auto dir = scratch("emit");
  emit_outputs(records, series, dir);
  CHECK(fs::exists(dir / "runs.csv"));
  CHECK(fs::exists(dir / "trace.csv"));
  for (auto m : metric_names()) CHECK(fs::exists(dir / ("aggregate_" + std::string(m) + ".csv")));
  for (const auto& r : records) CHECK(fs::exists(dir / "models" / snapshot_file_name(r, r.snapshots[0])));

  std::size_t expected_rows = 1;
  for (const auto& r : records) expected_rows += r.total_iterations;
  const auto trace = read_file(dir / "trace.csv");
  CHECK(static_cast<std::size_t>(std::count(trace.begin(), trace.end(), '\n')) == expected_rows);

  const auto back = read_records(dir);
  CHECK(runs_text(back) == runs_text(records));

  const auto out = scratch("analyze");
  const auto analyzed = analyze_directory(dir, out);
  CHECK(runs_text(analyzed) == runs_text(records));
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(analyzed[i].quality.optimum_probability == records[i].quality.optimum_probability);
  }
  CHECK(read_file(out / "aggregate_optimum_probability.csv") == read_file(dir / "aggregate_optimum_probability.csv"));
  fs::remove_all(dir);
  fs::remove_all(out);
}

TEST_CASE("checkpoint JSON round trip and resume") {
  auto config = small_config();
  const auto r = run_single(config, 12, 1);
  const auto back = record_from_json(record_to_json(r));
  CHECK(record_to_json(back) == record_to_json(r));
  CHECK(back.snapshots[0].model == r.snapshots[0].model);

  const auto dir = scratch("checkpoint");
  const auto first = run_grid(config, dir);
  CHECK(fs::exists(dir / "n12_run1.json"));
  // A stale file from another seed is recomputed; a valid one is reused.
  auto other = config;
  other.master_seed = 7;
  write_file_atomically(dir / "n8_run0.json", record_to_json(run_single(other, 8, 0)));
  fs::remove(dir / "n12_run2.json");
  config.workers = 3;
  const auto resumed = run_grid(config, dir);
  CHECK(runs_text(resumed) == runs_text(first));
  CHECK(fs::exists(dir / "n12_run2.json"));
  fs::remove_all(dir);
}

TEST_CASE("grid output does not depend on worker count") {
  auto config = small_config();
  const auto one = run_grid(config);
  config.workers = 4;
  const auto four = run_grid(config);
  CHECK(runs_text(one) == runs_text(four));
}
