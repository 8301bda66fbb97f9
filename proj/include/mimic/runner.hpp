#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimic/analysis.hpp"
#include "mimic/builder.hpp"
#include "mimic/model.hpp"

namespace mimic {

enum class SnapshotPolicy { none, final, every_iteration };

SnapshotPolicy parse_snapshot_policy(std::string_view text); // "none" | "final" | "all"
std::string to_string(SnapshotPolicy policy);

struct ExperimentConfig {
  std::vector<std::size_t> n_values = grid(50, 200, 10);
  std::size_t runs_per_n = 100;
  double lambda_factor = 12.0;
  std::size_t mu_divisor = 8;
  std::size_t iteration_cap = 50000; // applies to T
  std::uint64_t master_seed = 0;
  SnapshotPolicy snapshots = SnapshotPolicy::final;
  std::size_t workers = 1;

  static std::vector<std::size_t> grid(std::size_t n_min, std::size_t n_max, std::size_t step);
  MimicParams params(std::size_t n) const { return MimicParams::scaled(n, lambda_factor, mu_divisor); }
  void validate() const;
};

/// Flat per-run quality figures; what runs.csv carries.
struct RunQuality {
  bool permutation_correct = false;
  std::optional<DeviationSummary> central;
  std::optional<double> border_max;
  std::optional<double> optimum_probability;
};

struct ModelSnapshot {
  std::size_t iteration = 0; // number of model updates so far; 0 is the initial model
  ChainModel model;
};

struct RunRecord {
  std::size_t n = 0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::size_t lambda = 0;
  std::size_t mu = 0;
  std::size_t first_optimum_iteration = 0; // T, 1-based; 0 when aborted
  std::size_t total_iterations = 0;        // 2T unless aborted
  std::vector<std::size_t> optimum_counts; // per iteration, out of lambda
  std::uint64_t fitness_evaluations = 0;
  std::uint64_t total_optima = 0;
  std::uint64_t distinct_optima = 0;
  std::uint64_t duplicates = 0;
  RunQuality quality; // of the model after the last iteration's update
  bool aborted = false;
  std::vector<ModelSnapshot> snapshots;
};

/// Pure function of (master, n, run_index).
std::uint64_t run_seed(std::uint64_t master, std::size_t n, std::size_t run_index);

/// Stream used for tie-breaks when assessing a run's final model.
std::uint64_t analysis_seed(std::uint64_t run_seed);

RunQuality summarize_quality(const ModelQualityReport& report);

/// Runs MIMIC on EBOM until the first iteration T whose offspring contain an
/// optimum, then through iteration 2T. Aborts when T would exceed the cap.
/// Quality and the final snapshot refer to the model after iteration 2T.
RunRecord run_single(const ExperimentConfig& config, std::size_t n, std::size_t run_index);

/// All (n, run) pairs, ordered by n then run index. With a checkpoint
/// directory, each finished run is persisted there and existing ones are
/// reused, so an interrupted grid resumes where it stopped.
std::vector<RunRecord> run_grid(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt);

struct AggregatePoint {
  std::size_t n = 0;
  std::size_t count = 0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

struct AggregateSeries {
  std::string metric;
  std::vector<AggregatePoint> points; // ascending n
};

/// Metric names accepted by aggregate().
std::span<const std::string_view> metric_names();

/// Nearest-rank element of sorted values: rank ceil(q * r), 1-based.
double nearest_rank(std::span<const double> sorted, std::size_t numerator, std::size_t denominator);

/// Median of the per-iteration optimum fractions in iterations T+1 .. 2T.
std::optional<double> post_discovery_median_fraction(const RunRecord& record);

/// Per-n q25/median/q75 across runs. Aborted runs are skipped, as are runs
/// that lack the metric (e.g. deviations without a correct permutation).
AggregateSeries aggregate(std::span<const RunRecord> records, std::string_view metric);

// Outputs: runs.csv, trace.csv, aggregate_<metric>.csv, models/*.csv
void write_runs_csv(std::ostream& out, std::span<const RunRecord> records);
void write_trace_csv(std::ostream& out, std::span<const RunRecord> records);
void write_aggregate_csv(std::ostream& out, const AggregateSeries& series);
std::string snapshot_file_name(const RunRecord& record, const ModelSnapshot& snapshot);

void emit_outputs(std::span<const RunRecord> records, std::span<const AggregateSeries> aggregates,
                  const std::filesystem::path& destination);

/// Rebuilds records (without snapshots) from runs.csv and trace.csv.
std::vector<RunRecord> read_records(const std::filesystem::path& directory);

/// Re-derives quality figures from the final snapshots under `in`/models and
/// writes refreshed runs.csv, trace.csv and aggregates to `out`.
std::vector<RunRecord> analyze_directory(const std::filesystem::path& in, const std::filesystem::path& out);

/// Checkpoint serialization (JSON).
std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(std::string_view text);

} // namespace mimic
