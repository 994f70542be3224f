#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptim/diffusion.hpp"
#include "adaptim/estimation.hpp"
#include "adaptim/graph.hpp"
#include "adaptim/utility.hpp"

namespace adaptim {

/// Policy names accepted by the harness, in canonical order.
const std::vector<std::string>& known_policies();

struct ExperimentConfig {
  std::string graph_path;
  bool undirected = false;
  std::string model = "modified-ic";
  double deactivation = 0.0;
  /// Uniform influence probability; empty keeps the file's probabilities.
  std::optional<double> edge_probability;
  std::size_t k = 1;
  /// Empty means k + 1.
  std::optional<int> horizon;
  std::vector<std::string> policies = {"greedy"};
  std::size_t simulations = 1000;
  std::size_t runs = 100;
  std::uint64_t master_seed = 0;
  std::string output_path;
  /// Empty derives "<output stem>.summary.csv".
  std::string summary_path;
  EstimatorMode estimator = EstimatorMode::automatic;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  /// Worker threads over runs; 0 uses the hardware concurrency.
  std::size_t threads = 1;

  DiffusionModel diffusion_model() const;
  int resolved_horizon() const { return horizon.value_or(static_cast<int>(k) + 1); }
  std::string resolved_summary_path() const;
  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

/// Sets one key (the long flag name without dashes). Throws ConfigError.
void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Flat key=value lines; '#' starts a comment. Throws ConfigError.
void apply_config_text(ExperimentConfig& config, std::string_view text);
/// Throws IoError if the file cannot be read.
void apply_config_file(ExperimentConfig& config, const std::string& path);

struct RunRecord {
  std::size_t run_id = 0;
  std::string policy;
  TimeStep step = 1;
  /// Seeds placed at this step, empty for none.
  std::vector<NodeId> seeds;
  std::size_t active_count = 0;
  /// Cumulative spread over steps 1..step.
  UtilityValue cumulative_utility = 0;
  std::uint64_t realization_digest = 0;
  /// Seeds placed at steps 1..step.
  std::size_t seeds_so_far = 0;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
};

/// Runs every policy on every run r = 1..runs. Run r draws one realization
/// from (master_seed, r) shared by all policies; each (policy, run) gets its
/// own estimator stream. Output does not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, const InfluenceGraph& graph);
/// Loads config.graph_path first. Throws IoError or ParseError.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct SummaryRow {
  std::string policy;
  std::size_t seeds = 0;
  std::size_t runs = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  /// Fewer than two runs: std_dev is reported as 0.
  bool degenerate = false;
};

/// Per policy and seed count: mean and sample standard deviation of the
/// cumulative spread at the last step with that many seeds. Throws
/// std::invalid_argument on an empty table.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Shortest decimal that round-trips.
std::string format_real(double value);

}  // namespace adaptim
