#include "adaptim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "adaptim/policies.hpp"
#include "adaptim/rng.hpp"

namespace adaptim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_flag(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t end = value.find(',', pos);
    if (end == std::string_view::npos) end = value.size();
    std::string_view item = trim(value.substr(pos, end - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = end + 1;
  }
  return out;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const LayeredGraph& graph, const DiffusionModel& model,
                                    std::size_t k, GainEstimator& estimator, const std::vector<double>& centrality,
                                    std::uint64_t master_seed) {
  if (name == "greedy") return std::make_unique<AdaptiveGreedyPolicy>(estimator);
  if (name == "lazy-greedy") return std::make_unique<LazyGreedyPolicy>(estimator, false);
  if (name == "degree") return std::make_unique<DegreePolicy>();
  if (name == "centrality") return std::make_unique<CentralityPolicy>(centrality);
  if (name == "random") return std::make_unique<RandomPolicy>(rng::derive(master_seed, rng::label("random")));
  if (name == "non-adaptive") {
    return std::make_unique<NonAdaptiveGreedyPolicy>(graph, model, std::min(k, graph.node_count()), estimator);
  }
  throw ConfigError("unknown policy '" + name + "'");
}

}  // namespace

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> names = {"greedy", "lazy-greedy", "degree", "centrality", "random",
                                                 "non-adaptive"};
  return names;
}

DiffusionModel ExperimentConfig::diffusion_model() const { return parse_diffusion_model(model, deactivation); }

std::string ExperimentConfig::resolved_summary_path() const {
  if (!summary_path.empty()) return summary_path;
  std::string stem = output_path;
  if (stem.size() > 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0) stem.resize(stem.size() - 4);
  return stem + ".summary.csv";
}

void ExperimentConfig::validate() const {
  (void)diffusion_model();
  if (k < 1) throw ConfigError("k must be at least 1");
  if (resolved_horizon() < 1) throw ConfigError("horizon must be at least 1");
  if (simulations < 1) throw ConfigError("simulations must be at least 1");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (edge_probability && !(*edge_probability >= 0.0 && *edge_probability <= 1.0)) {
    throw ConfigError("p must lie in [0, 1]");
  }
  if (policies.empty()) throw ConfigError("no policies given");
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto& names = known_policies();
    if (std::find(names.begin(), names.end(), policies[i]) == names.end()) {
      throw ConfigError("unknown policy '" + policies[i] + "'");
    }
    if (std::find(policies.begin(), policies.begin() + static_cast<std::ptrdiff_t>(i), policies[i]) !=
        policies.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ConfigError("policy '" + policies[i] + "' listed twice");
    }
  }
}

void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "graph") {
    config.graph_path = std::string(value);
  } else if (key == "undirected") {
    config.undirected = parse_flag(key, value);
  } else if (key == "model") {
    config.model = std::string(value);
  } else if (key == "deactivation") {
    config.deactivation = parse_number<double>(key, value);
  } else if (key == "p") {
    if (value == "from-file") {
      config.edge_probability.reset();
    } else {
      config.edge_probability = parse_number<double>(key, value);
    }
  } else if (key == "k") {
    config.k = parse_number<std::size_t>(key, value);
  } else if (key == "horizon") {
    if (value == "auto" || value == "k-plus-1") {
      config.horizon.reset();
    } else {
      config.horizon = parse_number<int>(key, value);
    }
  } else if (key == "policies") {
    config.policies = split_list(value);
  } else if (key == "simulations") {
    config.simulations = parse_number<std::size_t>(key, value);
  } else if (key == "runs") {
    config.runs = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    config.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "output") {
    config.output_path = std::string(value);
  } else if (key == "summary") {
    config.summary_path = std::string(value);
  } else if (key == "estimator") {
    if (value == "exact") {
      config.estimator = EstimatorMode::exact;
    } else if (value == "monte-carlo") {
      config.estimator = EstimatorMode::monte_carlo;
    } else if (value == "auto") {
      config.estimator = EstimatorMode::automatic;
    } else {
      throw ConfigError("estimator must be exact, monte-carlo or auto");
    }
  } else if (key == "enumeration-cap") {
    config.enumeration_cap = parse_number<std::size_t>(key, value);
  } else if (key == "threads") {
    config.threads = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(ExperimentConfig& config, std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void apply_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config, const InfluenceGraph& input) {
  config.validate();
  const DiffusionModel model = config.diffusion_model();
  InfluenceGraph base = config.edge_probability ? assign_uniform_probability(input, *config.edge_probability) : input;
  const std::vector<double> centrality =
      std::find(config.policies.begin(), config.policies.end(), "centrality") != config.policies.end()
          ? betweenness_centrality(base)
          : std::vector<double>{};
  const LayeredGraph graph = build_layered_graph(std::move(base), config.resolved_horizon(), model);
  const std::uint64_t master = config.master_seed;

  auto run_one = [&](std::size_t run) {
    std::vector<RunRecord> rows;
    Realization world = sample_realization(graph, rng::derive(master, {rng::label("world"), run}));
    const std::uint64_t digest = world.digest();
    for (const std::string& name : config.policies) {
      EstimatorConfig estimator_config;
      estimator_config.mode = config.estimator;
      estimator_config.simulations = config.simulations;
      estimator_config.enumeration_cap = config.enumeration_cap;
      estimator_config.stream = rng::derive(master, {rng::label("estimator"), rng::label(name.c_str()), run});
      GainEstimator estimator(graph, model, estimator_config);
      std::unique_ptr<Policy> policy = make_policy(name, graph, model, config.k, estimator, centrality, master);

      PolicyRunResult result = run_adaptive_policy(*policy, graph, model, config.k, world, run);
      UtilityValue cumulative = 0;
      std::size_t seeds_so_far = 0;
      for (TimeStep t = 1; t <= graph.horizon(); ++t) {
        RunRecord row;
        row.run_id = run;
        row.policy = name;
        row.step = t;
        row.seeds = result.seeds_by_step[static_cast<std::size_t>(t - 1)];
        row.active_count = result.trace.at(t).size();
        cumulative += row.active_count;
        row.cumulative_utility = cumulative;
        row.realization_digest = digest;
        seeds_so_far += row.seeds.size();
        row.seeds_so_far = seeds_so_far;
        rows.push_back(std::move(row));
      }
    }
    return rows;
  };

  std::vector<std::vector<RunRecord>> per_run(config.runs);
  std::size_t workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  workers = std::min(workers, config.runs);
  if (workers <= 1) {
    for (std::size_t r = 0; r < config.runs; ++r) per_run[r] = run_one(r + 1);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = next++; r < config.runs; r = next++) per_run[r] = run_one(r + 1);
        } catch (...) {
          errors[w] = std::current_exception();
          next = config.runs;
        }
      });
    }
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ExperimentResult result;
  for (auto& rows : per_run) {
    for (RunRecord& row : rows) result.records.push_back(std::move(row));
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  InfluenceGraph graph =
      load_snap_edge_list_file(config.graph_path, LoadOptions{.directed = !config.undirected});
  return run_experiment(config, graph);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("cannot summarize an empty table");

  // (policy order of first appearance, seed count) -> run -> utility at the
  // last step with that seed count.
  std::vector<std::string> order;
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, UtilityValue>> cells;
  for (const RunRecord& row : records) {
    auto it = std::find(order.begin(), order.end(), row.policy);
    std::size_t index = static_cast<std::size_t>(it - order.begin());
    if (it == order.end()) order.push_back(row.policy);
    auto& runs = cells[{index, row.seeds_so_far}];
    auto [slot, inserted] = runs.try_emplace(row.run_id, row.cumulative_utility);
    if (!inserted) slot->second = std::max(slot->second, row.cumulative_utility);
  }

  std::vector<SummaryRow> out;
  for (const auto& [key, runs] : cells) {
    SummaryRow row;
    row.policy = order[key.first];
    row.seeds = key.second;
    row.runs = runs.size();
    double sum = 0.0;
    for (const auto& [run, value] : runs) sum += static_cast<double>(value);
    row.mean = sum / static_cast<double>(row.runs);
    if (row.runs < 2) {
      row.degenerate = true;
    } else {
      double squares = 0.0;
      for (const auto& [run, value] : runs) {
        double d = static_cast<double>(value) - row.mean;
        squares += d * d;
      }
      row.std_dev = std::sqrt(squares / static_cast<double>(row.runs - 1));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_real(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buffer, ptr);
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "run_id,policy,step,seed,active_count,cumulative_utility,realization_digest\n";
  for (const RunRecord& row : records) {
    out << row.run_id << ',' << row.policy << ',' << row.step << ',';
    for (std::size_t i = 0; i < row.seeds.size(); ++i) out << (i ? ";" : "") << row.seeds[i];
    char digest[17];
    auto [ptr, ec] = std::to_chars(digest, digest + sizeof digest, row.realization_digest, 16);
    (void)ec;
    out << ',' << row.active_count << ',' << row.cumulative_utility << ',' << std::string(digest, ptr) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "policy,seeds,runs,mean_cumulative_utility,std_cumulative_utility,degenerate\n";
  for (const SummaryRow& row : rows) {
    out << row.policy << ',' << row.seeds << ',' << row.runs << ',' << format_real(row.mean) << ','
        << format_real(row.std_dev) << ',' << (row.degenerate ? 1 : 0) << '\n';
  }
}

}  // namespace adaptim
