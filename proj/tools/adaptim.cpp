// Command-line front end: run, verify, stats, optimal.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "adaptim/graph.hpp"
#include "adaptim/harness.hpp"
#include "adaptim/verification.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;
constexpr int kCapacityError = 4;

using namespace adaptim;

int run_command(const std::string& config_path, const std::map<std::string, std::string>& flags) {
  ExperimentConfig config;
  if (!config_path.empty()) apply_config_file(config, config_path);
  for (const auto& [key, value] : flags) apply_config_value(config, key, value);
  if (config.graph_path.empty()) throw ConfigError("--graph is required");
  if (config.output_path.empty()) throw ConfigError("--output is required");
  config.validate();

  ExperimentResult result = run_experiment(config);
  std::ofstream records(config.output_path, std::ios::binary);
  if (!records) throw IoError("cannot write '" + config.output_path + "'");
  write_records_csv(records, result.records);
  const std::string summary_path = config.resolved_summary_path();
  std::ofstream summary(summary_path, std::ios::binary);
  if (!summary) throw IoError("cannot write '" + summary_path + "'");
  write_summary_csv(summary, summarize(result.records));
  if (!records || !summary) throw IoError("write failed");
  std::cout << result.records.size() << " records written to " << config.output_path << ", summary in "
            << summary_path << '\n';
  return kOk;
}

int verify_command(const std::string& report_path) {
  bool ok = true;
  std::ostringstream report;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    ok = ok && pass;
  };

  for (int i = 0; i <= 10; ++i) {
    double p = i / 10.0;
    TwoNodeReport r = two_node_counterexample(p);
    bool expected_violation = p > 0.5;
    bool pass = r.standard_ic.matches() && r.modified_ic.matches() &&
                r.standard_ic.violation() == expected_violation && !r.modified_ic.violation();
    line("two-node p=" + format_real(p), pass,
         "standard " + format_real(r.standard_ic.gain) + " vs " + format_real(r.standard_ic.gain_prime) +
             ", modified " + format_real(r.modified_ic.gain) + " vs " + format_real(r.modified_ic.gain_prime));
  }

  GainPair deactivating = deactivation_cumulative_counterexample();
  line("deactivation-cumulative", deactivating.matches() && deactivating.violation() && deactivating.realizations == 64,
       format_real(deactivating.gain) + " vs " + format_real(deactivating.gain_prime));
  GainPair terminal = deactivation_terminal_counterexample();
  line("deactivation-terminal", terminal.matches() && terminal.violation(),
       format_real(terminal.gain) + " vs " + format_real(terminal.gain_prime));

  for (DiffusionModel model : {DiffusionModel::modified_ic(), DiffusionModel::standard_ic()}) {
    InfluenceGraph base(2, {{0, 1, 0.9}});
    LayeredGraph graph = build_layered_graph(base, 3, model);
    SubmodularityReport sub = check_adaptive_submodularity(graph, model, 2);
    bool expect_holds = model.kind == DiffusionModel::Kind::modified_ic;
    line("submodularity " + to_string(model) + " p=0.9", sub.holds() == expect_holds,
         std::to_string(sub.violations.size()) + " violations in " + std::to_string(sub.instances_checked) + " pairs");
    report << "# submodularity " << to_string(model) << " p=0.9\n";
    write_report(report, sub);
  }

  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + report_path + "'");
    out << report.str();
  }
  return ok ? kOk : kFailed;
}

int stats_command(const std::string& path, bool undirected) {
  InfluenceGraph graph = load_snap_edge_list_file(path, LoadOptions{.directed = !undirected});
  GraphStats s = graph_stats(graph);
  std::cout << "nodes " << s.node_count << '\n'
            << "edges " << s.edge_count << '\n'
            << "directed_edges " << s.directed_edge_count << '\n'
            << "mean_degree " << format_real(s.mean_degree) << '\n'
            << "max_degree " << s.max_degree << '\n';
  return kOk;
}

int optimal_command(const std::string& path, bool undirected, const std::string& model_name, double deactivation,
                    std::optional<double> p, std::size_t k, std::optional<int> horizon, std::size_t cap) {
  DiffusionModel model = parse_diffusion_model(model_name, deactivation);
  if (p && !(*p >= 0.0 && *p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  InfluenceGraph graph = load_snap_edge_list_file(path, LoadOptions{.directed = !undirected});
  if (p) graph = assign_uniform_probability(graph, *p);
  int t = horizon.value_or(static_cast<int>(k) + 1);
  if (t < 1) throw ConfigError("horizon must be at least 1");
  LayeredGraph layered = build_layered_graph(std::move(graph), t, model);
  OptimalPolicyValue best = optimal_adaptive_policy_value(layered, model, k, cap);
  RatioCheck ratio = approximation_ratio_check(layered, model, k, cap);
  std::cout << "optimal_value " << format_real(best.value) << '\n'
            << "decision_states " << best.decision_tree_size << '\n'
            << "greedy_value " << format_real(ratio.greedy_value) << '\n'
            << "ratio " << format_real(ratio.ratio) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive influence maximization with myopic feedback"};
  app.require_subcommand(1);

  std::map<std::string, std::string> run_flags;
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Compare seeding policies over paired runs");
  run->add_option("--config", config_path, "key=value file; flags override it");
  const std::pair<const char*, const char*> run_options[] = {
      {"graph", "SNAP edge list"},
      {"model", "modified-ic, standard-ic or non-progressive-ic"},
      {"deactivation", "per-step deactivation probability (non-progressive-ic)"},
      {"p", "uniform edge probability, or from-file"},
      {"k", "seed budget"},
      {"horizon", "number of steps, or auto for k+1"},
      {"policies", "comma list: greedy, lazy-greedy, degree, centrality, random, non-adaptive"},
      {"simulations", "Monte Carlo simulations per estimate (default 1000)"},
      {"runs", "paired runs (default 100)"},
      {"seed", "master seed"},
      {"output", "records CSV"},
      {"summary", "summary CSV (default <output>.summary.csv)"},
      {"estimator", "exact, monte-carlo or auto"},
      {"enumeration-cap", "largest exact enumeration, in random edges"},
      {"threads", "worker threads over runs, 0 for all cores"},
      {"undirected", "treat the edge list as undirected (true/false)"},
  };
  std::map<std::string, std::string> run_values;
  for (const auto& [name, help] : run_options) {
    run->add_option(std::string("--") + name, run_values[name], help);
  }

  std::string report_path;
  CLI::App* verify = app.add_subcommand("verify", "Check the counterexamples and exhaustive properties");
  verify->add_option("--report", report_path, "write violations, one per line");

  std::string graph_path;
  bool undirected = false;
  CLI::App* stats = app.add_subcommand("stats", "Print graph statistics");
  stats->add_option("--graph", graph_path, "SNAP edge list")->required();
  stats->add_flag("--undirected", undirected, "treat the edge list as undirected");

  std::string model_name = "modified-ic";
  double deactivation = 0.0;
  std::optional<double> p;
  std::size_t k = 1;
  std::string horizon_text = "auto";
  std::size_t cap = kDefaultOptimalCap;
  CLI::App* optimal = app.add_subcommand("optimal", "Exact optimal adaptive value on a small graph");
  optimal->add_option("--graph", graph_path, "SNAP edge list")->required();
  optimal->add_flag("--undirected", undirected, "treat the edge list as undirected");
  optimal->add_option("--model", model_name, "diffusion model");
  optimal->add_option("--deactivation", deactivation, "per-step deactivation probability");
  optimal->add_option("--p", p, "uniform edge probability");
  optimal->add_option("--k", k, "seed budget");
  optimal->add_option("--horizon", horizon_text, "number of steps, or auto for k+1");
  optimal->add_option("--cap", cap, "largest number of random timed edges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) {
      for (const auto& [name, help] : run_options) {
        if (run->count(std::string("--") + name) > 0) run_flags[name] = run_values[name];
      }
      return run_command(config_path, run_flags);
    }
    if (verify->parsed()) return verify_command(report_path);
    if (stats->parsed()) return stats_command(graph_path, undirected);
    if (optimal->parsed()) {
      std::optional<int> horizon;
      if (horizon_text != "auto") {
        try {
          horizon = std::stoi(horizon_text);
        } catch (const std::exception&) {
          throw ConfigError("invalid horizon '" + horizon_text + "'");
        }
      }
      return optimal_command(graph_path, undirected, model_name, deactivation, p, k, horizon, cap);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacityError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kOk;
}
