// Command-line front end: run / grid / analyze / verify-univariate / plot-data.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mimic/io.hpp"
#include "mimic/runner.hpp"
#include "mimic/theory.hpp"

namespace {

using namespace mimic;

std::vector<AggregateSeries> all_aggregates(const std::vector<RunRecord>& records) {
  std::vector<AggregateSeries> series;
  for (auto metric : metric_names()) series.push_back(aggregate(records, metric));
  return series;
}

void print_summary(const std::vector<RunRecord>& records) {
  std::size_t aborted = 0;
  std::size_t correct = 0;
  for (const auto& r : records) {
    aborted += r.aborted;
    correct += r.quality.permutation_correct;
  }
  std::cerr << records.size() << " runs, " << aborted << " aborted, " << correct << " with a correct permutation\n";
}

UnivariateModel make_profile(const std::string& profile, std::size_t n, const std::string& file) {
  if (profile == "uniform") return UnivariateModel(std::vector<double>(n, 0.5));
  if (profile == "blockwise") {
    // Alternating 00/11 centers, each bit off-center with probability 1/n.
    const double eps = 1.0 / static_cast<double>(n);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (i / 2) % 2 == 0 ? eps : 1.0 - eps;
    return UnivariateModel(std::move(p));
  }
  if (profile == "file") {
    if (file.empty()) throw std::invalid_argument("--profile file needs --p-file");
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    std::vector<double> p;
    std::string token;
    while (in >> token) {
      for (auto& field : split_csv_line(token)) {
        if (!field.empty()) p.push_back(parse_double(field));
      }
    }
    return UnivariateModel(std::move(p));
  }
  throw std::invalid_argument("unknown profile '" + profile + "' (expected uniform, blockwise or file)");
}

nlohmann::json report_to_json(const UnivariateTheoremReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"n", r.n},
          {"optimum_probability", r.optimum_probability},
          {"log_optimum_probability", num(r.log_optimum_probability)},
          {"k_implied", num(r.k_implied)},
          {"l1_distance", r.l1_distance},
          {"expected_hamming", r.expected_hamming},
          {"gamma", r.gamma},
          {"radius", r.radius},
          {"trials", r.trials},
          {"tail_hits", r.tail_hits},
          {"tail_empirical", r.tail_empirical},
          {"tail_standard_error", r.tail_standard_error},
          {"tail_exact", r.tail_exact},
          {"tail_bound", r.tail_bound},
          {"precondition_violated", r.precondition_violated},
          {"negligible_optimum_probability", r.negligible_optimum_probability},
          {"holds", r.holds}};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIMIC on EqualBlocksOneMax: experiments, model analysis and univariate concentration checks"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string snapshots = "final";
  std::string out_dir;

  auto add_protocol_options = [&](CLI::App* cmd) {
    cmd->add_option("--runs", cfg.runs_per_n, "Runs per n")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.master_seed, "Master seed")->required();
    cmd->add_option("--lambda-factor", cfg.lambda_factor, "lambda = floor(factor * n ln n)");
    cmd->add_option("--mu-divisor", cfg.mu_divisor, "mu = floor(lambda / divisor)")->check(CLI::PositiveNumber);
    cmd->add_option("--cap", cfg.iteration_cap, "Abort when no optimum within this many iterations");
    cmd->add_option("--snapshots", snapshots, "Model snapshots: none, final or all")
        ->check(CLI::IsMember({"none", "final", "all"}));
    cmd->add_option("--workers", cfg.workers, "Parallel runs")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_dir, "Output directory")->required();
  };

  auto* run = app.add_subcommand("run", "Independent runs for a single n");
  std::size_t run_n = 0;
  run->add_option("--n", run_n, "Even problem size")->required();
  add_protocol_options(run);

  auto* grid = app.add_subcommand("grid", "Runs over a grid of n values");
  std::size_t n_min = 50, n_max = 200, n_step = 10;
  grid->add_option("--n-min", n_min);
  grid->add_option("--n-max", n_max);
  grid->add_option("--n-step", n_step)->check(CLI::PositiveNumber);
  add_protocol_options(grid);

  auto* analyze = app.add_subcommand("analyze", "Recompute model quality and aggregates from stored outputs");
  std::string in_dir;
  analyze->add_option("--in", in_dir)->required();
  analyze->add_option("--out", out_dir)->required();

  auto* verify = app.add_subcommand("verify-univariate", "Check the Hamming-ball tail bound for a univariate model");
  std::size_t v_n = 0;
  std::string profile;
  std::string p_file;
  double gamma = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t v_seed = 0;
  std::size_t v_workers = 1;
  verify->add_option("--n", v_n, "Even problem size (ignored for --profile file)");
  verify->add_option("--profile", profile)->required()->check(CLI::IsMember({"uniform", "blockwise", "file"}));
  verify->add_option("--p-file", p_file, "Frequencies, comma or whitespace separated");
  verify->add_option("--gamma", gamma)->required();
  verify->add_option("--trials", trials)->required()->check(CLI::PositiveNumber);
  verify->add_option("--seed", v_seed)->required();
  verify->add_option("--workers", v_workers)->check(CLI::PositiveNumber);

  auto* plot = app.add_subcommand("plot-data", "Median and quartiles of one metric per n");
  std::string metric;
  std::string out_file;
  plot->add_option("--in", in_dir)->required();
  plot->add_option("--metric", metric)->required();
  plot->add_option("--out", out_file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *grid) {
      cfg.snapshots = parse_snapshot_policy(snapshots);
      cfg.n_values = *run ? std::vector<std::size_t>{run_n} : ExperimentConfig::grid(n_min, n_max, n_step);
      cfg.validate();
      const std::filesystem::path out(out_dir);
      auto records = run_grid(cfg, out / "records");
      emit_outputs(records, all_aggregates(records), out);
      print_summary(records);
    } else if (*analyze) {
      print_summary(analyze_directory(in_dir, out_dir));
    } else if (*verify) {
      if (profile != "file" && (v_n < 2 || v_n % 2 != 0)) throw std::invalid_argument("--n must be even and at least 2");
      const auto p = make_profile(profile, v_n, p_file);
      RandomSource rng(v_seed);
      const auto report = verify_tail_bound(p, gamma, trials, rng, v_workers);
      std::cout << report_to_json(report).dump(2) << '\n';
    } else if (*plot) {
      const auto records = read_records(in_dir);
      std::ostringstream ss;
      write_aggregate_csv(ss, aggregate(records, metric));
      write_file_atomically(out_file, ss.str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
