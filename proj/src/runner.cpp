#include "mimic/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mimic/fitness.hpp"
#include "mimic/io.hpp"

namespace mimic {

namespace fs = std::filesystem;
using nlohmann::json;

SnapshotPolicy parse_snapshot_policy(std::string_view text) {
  if (text == "none") return SnapshotPolicy::none;
  if (text == "final") return SnapshotPolicy::final;
  if (text == "all" || text == "every_iteration") return SnapshotPolicy::every_iteration;
  throw std::invalid_argument("unknown snapshot policy '" + std::string(text) + "' (expected none, final or all)");
}

std::string to_string(SnapshotPolicy policy) {
  switch (policy) {
  case SnapshotPolicy::none: return "none";
  case SnapshotPolicy::final: return "final";
  case SnapshotPolicy::every_iteration: return "all";
  }
  return "none";
}

std::vector<std::size_t> ExperimentConfig::grid(std::size_t n_min, std::size_t n_max, std::size_t step) {
  if (step == 0) throw std::invalid_argument("grid: step must be positive");
  if (n_min > n_max) throw std::invalid_argument("grid: n_min exceeds n_max");
  std::vector<std::size_t> values;
  for (std::size_t n = n_min; n <= n_max; n += step) values.push_back(n);
  return values;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw std::invalid_argument("config: no n values");
  for (auto n : n_values) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("config: n must be even and at least 2, got " + std::to_string(n));
    params(n);
  }
  if (runs_per_n == 0) throw std::invalid_argument("config: runs per n must be at least 1");
  if (iteration_cap == 0) throw std::invalid_argument("config: iteration cap must be at least 1");
}

std::uint64_t run_seed(std::uint64_t master, std::size_t n, std::size_t run_index) {
  return derive_seed(master, n, run_index);
}

std::uint64_t analysis_seed(std::uint64_t seed) { return derive_seed(seed, 0x616e616c79736973ULL); }

RunQuality summarize_quality(const ModelQualityReport& report) {
  RunQuality q;
  q.permutation_correct = report.permutation_correct;
  q.central = report.central;
  if (report.border) q.border_max = report.border->max;
  q.optimum_probability = report.optimum_probability.value;
  return q;
}

RunRecord run_single(const ExperimentConfig& config, std::size_t n, std::size_t run_index) {
  const MimicParams params = config.params(n);
  const EqualBlocksOneMax f(n);

  RunRecord rec;
  rec.n = n;
  rec.run_index = run_index;
  rec.seed = run_seed(config.master_seed, n, run_index);
  rec.lambda = params.lambda;
  rec.mu = params.mu;

  RandomSource rng(rec.seed);
  DistinctOptimaLedger ledger;
  ChainModel model = initial_model(n);
  if (config.snapshots == SnapshotPolicy::every_iteration) rec.snapshots.push_back({0, model});

  for (std::size_t t = 1;; ++t) {
    IterationResult step = mimic_iteration(model, f, params, rng);
    rec.optimum_counts.push_back(step.stats.optimum_count);
    if (step.stats.optimum_count > 0) {
      if (rec.first_optimum_iteration == 0) rec.first_optimum_iteration = t;
      const auto fitness = step.offspring.fitness();
      for (std::size_t k = 0; k < step.offspring.size(); ++k) {
        if (fitness[k] == *f.optimum_value()) ledger.add(step.offspring[k], f);
      }
    }
    model = std::move(step.model);
    rec.total_iterations = t;
    if (config.snapshots == SnapshotPolicy::every_iteration) rec.snapshots.push_back({t, model});

    if (rec.first_optimum_iteration != 0 && t == 2 * rec.first_optimum_iteration) break;
    if (rec.first_optimum_iteration == 0 && t >= config.iteration_cap) {
      rec.aborted = true;
      break;
    }
  }

  rec.fitness_evaluations = static_cast<std::uint64_t>(rec.lambda) * rec.total_iterations;
  rec.total_optima = ledger.total();
  rec.distinct_optima = ledger.distinct();
  rec.duplicates = ledger.duplicates();

  RandomSource analysis_rng(analysis_seed(rec.seed));
  rec.quality = summarize_quality(assess_model(model, analysis_rng));
  if (config.snapshots == SnapshotPolicy::final) rec.snapshots.push_back({rec.total_iterations, model});
  return rec;
}

// ---------------------------------------------------------------------------
// Checkpoint JSON

namespace {

json model_to_json(const ChainModel& m) {
  json probs = json::array();
  for (const auto& p : m.probs()) probs.push_back({p[0], p[1]});
  return json{{"order", std::vector<std::size_t>(m.order().begin(), m.order().end())}, {"probs", probs}};
}

ChainModel model_from_json(const json& j) {
  std::vector<CondProbs> probs;
  for (const auto& p : j.at("probs")) probs.push_back(CondProbs{p.at(0).get<double>(), p.at(1).get<double>()});
  return ChainModel(j.at("order").get<std::vector<std::size_t>>(), std::move(probs));
}

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

} // namespace

std::string record_to_json(const RunRecord& r) {
  json j;
  j["n"] = r.n;
  j["run_index"] = r.run_index;
  j["seed"] = r.seed;
  j["lambda"] = r.lambda;
  j["mu"] = r.mu;
  j["T"] = r.first_optimum_iteration;
  j["total_iterations"] = r.total_iterations;
  j["optimum_counts"] = r.optimum_counts;
  j["fitness_evaluations"] = r.fitness_evaluations;
  j["total_optima"] = r.total_optima;
  j["distinct_optima"] = r.distinct_optima;
  j["duplicates"] = r.duplicates;
  j["aborted"] = r.aborted;
  json q;
  q["permutation_correct"] = r.quality.permutation_correct;
  if (r.quality.central) {
    q["central"] = {r.quality.central->max, r.quality.central->mean, r.quality.central->min};
  } else {
    q["central"] = nullptr;
  }
  q["border_max"] = optional_to_json(r.quality.border_max);
  q["optimum_probability"] = optional_to_json(r.quality.optimum_probability);
  j["quality"] = q;
  json snaps = json::array();
  for (const auto& s : r.snapshots) snaps.push_back({{"iteration", s.iteration}, {"model", model_to_json(s.model)}});
  j["snapshots"] = snaps;
  return j.dump();
}

RunRecord record_from_json(std::string_view text) {
  const json j = json::parse(text);
  RunRecord r;
  r.n = j.at("n").get<std::size_t>();
  r.run_index = j.at("run_index").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.lambda = j.at("lambda").get<std::size_t>();
  r.mu = j.at("mu").get<std::size_t>();
  r.first_optimum_iteration = j.at("T").get<std::size_t>();
  r.total_iterations = j.at("total_iterations").get<std::size_t>();
  r.optimum_counts = j.at("optimum_counts").get<std::vector<std::size_t>>();
  r.fitness_evaluations = j.at("fitness_evaluations").get<std::uint64_t>();
  r.total_optima = j.at("total_optima").get<std::uint64_t>();
  r.distinct_optima = j.at("distinct_optima").get<std::uint64_t>();
  r.duplicates = j.at("duplicates").get<std::uint64_t>();
  r.aborted = j.at("aborted").get<bool>();
  const auto& q = j.at("quality");
  r.quality.permutation_correct = q.at("permutation_correct").get<bool>();
  if (!q.at("central").is_null()) {
    const auto& c = q.at("central");
    r.quality.central = DeviationSummary{c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
  }
  if (!q.at("border_max").is_null()) r.quality.border_max = q.at("border_max").get<double>();
  if (!q.at("optimum_probability").is_null()) r.quality.optimum_probability = q.at("optimum_probability").get<double>();
  for (const auto& s : j.at("snapshots")) {
    r.snapshots.push_back({s.at("iteration").get<std::size_t>(), model_from_json(s.at("model"))});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Grid

namespace {

fs::path checkpoint_path(const fs::path& dir, std::size_t n, std::size_t run_index) {
  return dir / ("n" + std::to_string(n) + "_run" + std::to_string(run_index) + ".json");
}

std::optional<RunRecord> load_checkpoint(const fs::path& path, const ExperimentConfig& config, std::size_t n,
                                         std::size_t run_index) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    RunRecord r = record_from_json(read_file(path));
    const auto params = config.params(n);
    // Stale checkpoints from another configuration are recomputed.
    if (r.n != n || r.run_index != run_index || r.seed != run_seed(config.master_seed, n, run_index) ||
        r.lambda != params.lambda || r.mu != params.mu) {
      return std::nullopt;
    }
    const bool want_snapshots = config.snapshots != SnapshotPolicy::none;
    if (want_snapshots && r.snapshots.empty()) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

} // namespace

std::vector<RunRecord> run_grid(const ExperimentConfig& config, const std::optional<fs::path>& checkpoint_dir) {
  config.validate();
  if (checkpoint_dir) fs::create_directories(*checkpoint_dir);

  struct Task {
    std::size_t n;
    std::size_t run_index;
  };
  std::vector<Task> tasks;
  for (auto n : config.n_values) {
    for (std::size_t r = 0; r < config.runs_per_n; ++r) tasks.push_back({n, r});
  }
  std::vector<std::optional<RunRecord>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
      try {
        const auto [n, r] = tasks[k];
        if (checkpoint_dir) {
          const auto path = checkpoint_path(*checkpoint_dir, n, r);
          if (auto cached = load_checkpoint(path, config, n, r)) {
            results[k] = std::move(*cached);
            continue;
          }
          results[k] = run_single(config, n, r);
          write_file_atomically(path, record_to_json(*results[k]));
        } else {
          results[k] = run_single(config, n, r);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(1, tasks.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RunRecord> records;
  records.reserve(results.size());
  for (auto& r : results) records.push_back(std::move(*r));
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

constexpr std::array<std::string_view, 14> kMetrics = {
    "iterations_to_first_optimum",
    "total_iterations",
    "fitness_evaluations",
    "fitness_evaluations_to_first_optimum",
    "total_optima",
    "distinct_optima",
    "duplicates",
    "central_dev_max",
    "central_dev_mean",
    "central_dev_min",
    "border_dev_max",
    "optimum_fraction",
    "optimum_probability",
    "permutation_correct",
};

std::optional<double> metric_value(const RunRecord& r, std::string_view metric) {
  if (metric == "iterations_to_first_optimum") return static_cast<double>(r.first_optimum_iteration);
  if (metric == "total_iterations") return static_cast<double>(r.total_iterations);
  if (metric == "fitness_evaluations") return static_cast<double>(r.fitness_evaluations);
  if (metric == "fitness_evaluations_to_first_optimum") {
    return static_cast<double>(r.lambda) * static_cast<double>(r.first_optimum_iteration);
  }
  if (metric == "total_optima") return static_cast<double>(r.total_optima);
  if (metric == "distinct_optima") return static_cast<double>(r.distinct_optima);
  if (metric == "duplicates") return static_cast<double>(r.duplicates);
  if (metric == "central_dev_max") return r.quality.central ? std::optional(r.quality.central->max) : std::nullopt;
  if (metric == "central_dev_mean") return r.quality.central ? std::optional(r.quality.central->mean) : std::nullopt;
  if (metric == "central_dev_min") return r.quality.central ? std::optional(r.quality.central->min) : std::nullopt;
  if (metric == "border_dev_max") return r.quality.border_max;
  if (metric == "optimum_fraction") return post_discovery_median_fraction(r);
  if (metric == "optimum_probability") return r.quality.optimum_probability;
  if (metric == "permutation_correct") return r.quality.permutation_correct ? 1.0 : 0.0;
  throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

} // namespace

std::span<const std::string_view> metric_names() { return kMetrics; }

double nearest_rank(std::span<const double> sorted, std::size_t numerator, std::size_t denominator) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: no values");
  const std::size_t r = sorted.size();
  const std::size_t rank = std::max<std::size_t>(1, (numerator * r + denominator - 1) / denominator);
  return sorted[std::min(rank, r) - 1];
}

std::optional<double> post_discovery_median_fraction(const RunRecord& r) {
  if (r.aborted || r.first_optimum_iteration == 0 || r.lambda == 0) return std::nullopt;
  std::vector<double> fractions;
  for (std::size_t t = r.first_optimum_iteration + 1; t <= r.total_iterations && t <= r.optimum_counts.size(); ++t) {
    fractions.push_back(static_cast<double>(r.optimum_counts[t - 1]) / static_cast<double>(r.lambda));
  }
  if (fractions.empty()) return std::nullopt;
  std::sort(fractions.begin(), fractions.end());
  return nearest_rank(fractions, 1, 2);
}

AggregateSeries aggregate(std::span<const RunRecord> records, std::string_view metric) {
  if (std::find(kMetrics.begin(), kMetrics.end(), metric) == kMetrics.end()) {
    throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
  }
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : records) {
    if (r.aborted) continue;
    if (auto v = metric_value(r, metric)) by_n[r.n].push_back(*v);
  }
  AggregateSeries series;
  series.metric = std::string(metric);
  for (auto& [n, values] : by_n) {
    std::sort(values.begin(), values.end());
    series.points.push_back(
        {n, values.size(), nearest_rank(values, 1, 4), nearest_rank(values, 1, 2), nearest_rank(values, 3, 4)});
  }
  return series;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

} // namespace

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "n,run_index,seed,T,total_iterations,lambda,mu,fitness_evaluations,total_optima,distinct_optima,duplicates,"
         "permutation_correct,central_dev_max,central_dev_mean,central_dev_min,border_dev_max,aborted\n";
  for (const auto& r : records) {
    const auto& c = r.quality.central;
    out << r.n << ',' << r.run_index << ',' << r.seed << ',' << r.first_optimum_iteration << ',' << r.total_iterations
        << ',' << r.lambda << ',' << r.mu << ',' << r.fitness_evaluations << ',' << r.total_optima << ','
        << r.distinct_optima << ',' << r.duplicates << ',' << (r.quality.permutation_correct ? 1 : 0) << ','
        << opt_field(c ? std::optional(c->max) : std::nullopt) << ','
        << opt_field(c ? std::optional(c->mean) : std::nullopt) << ','
        << opt_field(c ? std::optional(c->min) : std::nullopt) << ',' << opt_field(r.quality.border_max) << ','
        << (r.aborted ? 1 : 0) << '\n';
  }
}

void write_trace_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "n,run_index,iteration,optima_count,lambda,optimum_fraction\n";
  for (const auto& r : records) {
    for (std::size_t t = 0; t < r.optimum_counts.size(); ++t) {
      const double fraction = static_cast<double>(r.optimum_counts[t]) / static_cast<double>(r.lambda);
      out << r.n << ',' << r.run_index << ',' << (t + 1) << ',' << r.optimum_counts[t] << ',' << r.lambda << ','
          << format_double(fraction) << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, const AggregateSeries& series) {
  out << "n,metric,q25,median,q75\n";
  for (const auto& p : series.points) {
    out << p.n << ',' << series.metric << ',' << format_double(p.q25) << ',' << format_double(p.median) << ','
        << format_double(p.q75) << '\n';
  }
}

std::string snapshot_file_name(const RunRecord& r, const ModelSnapshot& s) {
  std::string base = "n" + std::to_string(r.n) + "_run" + std::to_string(r.run_index);
  if (s.iteration == r.total_iterations && r.snapshots.size() == 1) return base + "_final.csv";
  return base + "_it" + std::to_string(s.iteration) + ".csv";
}

void emit_outputs(std::span<const RunRecord> records, std::span<const AggregateSeries> aggregates,
                  const fs::path& destination) {
  std::error_code ec;
  fs::create_directories(destination, ec);
  if (ec) throw std::runtime_error("cannot create " + destination.string() + ": " + ec.message());

  auto emit = [&](const fs::path& path, auto&& writer) {
    std::ostringstream ss;
    writer(ss);
    write_file_atomically(path, ss.str());
  };
  emit(destination / "runs.csv", [&](std::ostream& o) { write_runs_csv(o, records); });
  emit(destination / "trace.csv", [&](std::ostream& o) { write_trace_csv(o, records); });
  for (const auto& series : aggregates) {
    emit(destination / ("aggregate_" + series.metric + ".csv"), [&](std::ostream& o) { write_aggregate_csv(o, series); });
  }
  const bool any_snapshots = std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.snapshots.empty(); });
  if (any_snapshots) {
    const auto models = destination / "models";
    fs::create_directories(models, ec);
    if (ec) throw std::runtime_error("cannot create " + models.string() + ": " + ec.message());
    for (const auto& r : records) {
      for (const auto& s : r.snapshots) {
        emit(models / snapshot_file_name(r, s), [&](std::ostream& o) { write_snapshot(o, s.model); });
      }
    }
  }
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::string_view expected_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != expected_header) {
    throw std::runtime_error(path.string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split_csv_line(line));
  }
  return rows;
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

} // namespace

std::vector<RunRecord> read_records(const fs::path& dir) {
  const auto runs = read_csv(dir / "runs.csv",
                             "n,run_index,seed,T,total_iterations,lambda,mu,fitness_evaluations,total_optima,"
                             "distinct_optima,duplicates,permutation_correct,central_dev_max,central_dev_mean,"
                             "central_dev_min,border_dev_max,aborted");
  std::vector<RunRecord> records;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  for (const auto& f : runs) {
    if (f.size() != 17) throw std::runtime_error((dir / "runs.csv").string() + ": expected 17 fields per row");
    RunRecord r;
    r.n = parse_unsigned(f[0]);
    r.run_index = parse_unsigned(f[1]);
    r.seed = parse_unsigned(f[2]);
    r.first_optimum_iteration = parse_unsigned(f[3]);
    r.total_iterations = parse_unsigned(f[4]);
    r.lambda = parse_unsigned(f[5]);
    r.mu = parse_unsigned(f[6]);
    r.fitness_evaluations = parse_unsigned(f[7]);
    r.total_optima = parse_unsigned(f[8]);
    r.distinct_optima = parse_unsigned(f[9]);
    r.duplicates = parse_unsigned(f[10]);
    r.quality.permutation_correct = parse_unsigned(f[11]) != 0;
    const auto cmax = parse_optional(f[12]);
    const auto cmean = parse_optional(f[13]);
    const auto cmin = parse_optional(f[14]);
    if (cmax && cmean && cmin) r.quality.central = DeviationSummary{*cmax, *cmean, *cmin};
    r.quality.border_max = parse_optional(f[15]);
    r.aborted = parse_unsigned(f[16]) != 0;
    index[{r.n, r.run_index}] = records.size();
    records.push_back(std::move(r));
  }
  const auto trace = read_csv(dir / "trace.csv", "n,run_index,iteration,optima_count,lambda,optimum_fraction");
  for (const auto& f : trace) {
    if (f.size() != 6) throw std::runtime_error((dir / "trace.csv").string() + ": expected 6 fields per row");
    const auto it = index.find({parse_unsigned(f[0]), parse_unsigned(f[1])});
    if (it == index.end()) throw std::runtime_error("trace.csv refers to a run missing from runs.csv");
    auto& r = records[it->second];
    const auto iteration = parse_unsigned(f[2]);
    if (iteration != r.optimum_counts.size() + 1) throw std::runtime_error("trace.csv: iterations out of order");
    r.optimum_counts.push_back(parse_unsigned(f[3]));
  }
  return records;
}

std::vector<RunRecord> analyze_directory(const fs::path& in, const fs::path& out) {
  auto records = read_records(in);
  for (auto& r : records) {
    const std::string base = "n" + std::to_string(r.n) + "_run" + std::to_string(r.run_index);
    fs::path snapshot = in / "models" / (base + "_final.csv");
    if (!fs::exists(snapshot)) snapshot = in / "models" / (base + "_it" + std::to_string(r.total_iterations) + ".csv");
    if (!fs::exists(snapshot)) continue;
    std::ifstream model_in(snapshot);
    const ChainModel model = read_snapshot(model_in);
    RandomSource rng(analysis_seed(r.seed));
    r.quality = summarize_quality(assess_model(model, rng));
  }
  std::vector<AggregateSeries> series;
  for (auto metric : metric_names()) series.push_back(aggregate(records, metric));
  emit_outputs(records, series, out);
  return records;
}

} // namespace mimic
