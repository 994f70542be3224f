#include "adaptim/verification.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace adaptim {

namespace {

bool random_probability(double p) { return p > 0.0 && p < 1.0; }

/// psi's statuses, then deterministic edges, then the bits of `mask` for `edges`.
struct MaskSource {
  const LayeredGraph* graph;
  const PartialRealization* psi;
  const std::vector<EdgeId>* edges;
  std::uint64_t mask;

  bool live(EdgeId e) const {
    EdgeStatus s = psi->status(e);
    if (s != EdgeStatus::unknown) return s == EdgeStatus::live;
    double p = graph->probability(e);
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    for (std::size_t i = 0; i < edges->size(); ++i) {
      if ((*edges)[i] == e) return ((mask >> i) & 1U) != 0;
    }
    throw std::logic_error("edge outside the enumerated step");
  }
};

double mask_weight(const LayeredGraph& graph, const std::vector<EdgeId>& edges, std::uint64_t mask) {
  double weight = 1.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    double p = graph.probability(edges[i]);
    weight *= ((mask >> i) & 1U) ? p : 1.0 - p;
  }
  return weight;
}

void check_enumerable(std::size_t edges, std::size_t cap, const char* what) {
  if (edges > cap || edges >= 63) {
    throw CapacityError(std::string(what) + " needs " + std::to_string(edges) + " random timed edges (cap " +
                        std::to_string(cap) + ")");
  }
}

Cascade replay_observed(const LayeredGraph& graph, const DiffusionModel& model, const PartialRealization& psi) {
  ObservedStatuses probe{&graph, &psi};
  Cascade cascade = replay_domain(graph, model, psi, probe);
  if (probe.needed_unobserved) throw std::domain_error("observation history does not determine the active set");
  return cascade;
}

std::vector<double> exact_gains(const LayeredGraph& graph, const DiffusionModel& model, const PartialRealization& psi,
                                std::size_t cap) {
  std::vector<double> gains(psi.node_count(), 0.0);
  for (NodeId v = 0; v < psi.node_count(); ++v) {
    if (!psi.in_domain(v)) gains[v] = exact_marginal_gain(graph, model, v, psi, cap).mean;
  }
  return gains;
}

}  // namespace

std::vector<ObservationOutcome> observation_outcomes(const LayeredGraph& graph, const DiffusionModel& model,
                                                     const PartialRealization& psi) {
  if (time_of(psi) >= graph.horizon()) return {{psi, 1.0}};
  Cascade cascade = replay_observed(graph, model, psi);

  std::vector<EdgeId> pending;
  ObservedStatuses probe{&graph, &psi};
  cascade.advance(probe, [&](EdgeId e, bool) {
    if (!psi.observed(e) && random_probability(graph.probability(e))) pending.push_back(e);
  });
  check_enumerable(pending.size(), kDefaultEnumerationCap, "one observation step");

  std::vector<ObservationOutcome> out;
  const std::uint64_t count = std::uint64_t{1} << pending.size();
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    MaskSource source{&graph, &psi, &pending, mask};
    out.push_back({observe_myopic_with(graph, model, source, psi), mask_weight(graph, pending, mask)});
  }
  return out;
}

std::vector<PartialRealization> reachable_partial_realizations(const LayeredGraph& graph, const DiffusionModel& model,
                                                               std::size_t k) {
  std::map<std::string, PartialRealization> found;
  std::unordered_set<std::string> visited;
  std::deque<std::pair<PartialRealization, std::size_t>> frontier;
  frontier.emplace_back(PartialRealization(graph), 0);

  while (!frontier.empty()) {
    auto [psi, used] = std::move(frontier.front());
    frontier.pop_front();
    std::string key = psi.encode();
    if (!visited.insert(key + "#" + std::to_string(used)).second) continue;
    found.emplace(key, psi);

    if (used < k) {
      for (NodeId v = 0; v < psi.node_count(); ++v) {
        if (psi.in_domain(v)) continue;
        NodeId seed[] = {v};
        frontier.emplace_back(with_seeds(psi, seed), used + 1);
      }
    }
    if (time_of(psi) < graph.horizon()) {
      for (ObservationOutcome& outcome : observation_outcomes(graph, model, psi)) {
        frontier.emplace_back(std::move(outcome.psi), used);
      }
    }
  }

  std::vector<PartialRealization> out;
  out.reserve(found.size());
  for (auto& [key, psi] : found) out.push_back(std::move(psi));
  return out;
}

SubmodularityReport check_adaptive_submodularity(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                                 double tolerance, std::size_t cap) {
  std::vector<PartialRealization> states = reachable_partial_realizations(graph, model, k);
  std::vector<std::vector<double>> gains;
  gains.reserve(states.size());
  for (const PartialRealization& psi : states) gains.push_back(exact_gains(graph, model, psi, cap));

  SubmodularityReport report;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (i == j || !is_subrealization(states[i], states[j])) continue;
      for (NodeId v = 0; v < graph.node_count(); ++v) {
        if (states[j].in_domain(v)) continue;
        ++report.instances_checked;
        if (gains[i][v] < gains[j][v] - tolerance) {
          report.violations.push_back({states[i], states[j], v, gains[i][v], gains[j][v]});
        }
      }
    }
  }
  return report;
}

MonotonicityReport check_adaptive_monotonicity(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                               double tolerance, std::size_t cap) {
  MonotonicityReport report;
  for (const PartialRealization& psi : reachable_partial_realizations(graph, model, k)) {
    std::vector<double> gains = exact_gains(graph, model, psi, cap);
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      if (psi.in_domain(v)) continue;
      ++report.instances_checked;
      if (gains[v] < -tolerance) report.violations.push_back({psi, v, gains[v]});
    }
  }
  return report;
}

void write_report(std::ostream& out, const SubmodularityReport& report) {
  auto precision = out.precision(17);
  for (const SubmodularityViolation& x : report.violations) {
    out << "psi=" << x.psi.encode() << "\tpsi_prime=" << x.psi_prime.encode() << "\tv=" << x.node
        << "\tgain=" << x.gain << "\tgain_prime=" << x.gain_prime << '\n';
  }
  out.precision(precision);
}

void write_report(std::ostream& out, const MonotonicityReport& report) {
  auto precision = out.precision(17);
  for (const MonotonicityViolation& x : report.violations) {
    out << "psi=" << x.psi.encode() << "\tv=" << x.node << "\tgain=" << x.gain << '\n';
  }
  out.precision(precision);
}

bool GainPair::matches(double tolerance) const {
  return std::abs(gain - expected_gain) <= tolerance && std::abs(gain_prime - expected_gain_prime) <= tolerance;
}

namespace {

/// psi = {u at 1}; psi_prime = psi after one step of feedback in which every
/// edge leaving u_1 is dead.
GainPair seeded_then_failed(const LayeredGraph& graph, const DiffusionModel& model, NodeId u, NodeId v) {
  NodeId seed[] = {u};
  PartialRealization psi = with_seeds(PartialRealization(graph), seed);
  Realization world = Realization::uniform(graph.timed_edge_count(), false);
  PartialRealization psi_prime = observe_myopic(graph, model, world, psi);
  MarginalGainEstimate before = exact_marginal_gain(graph, model, v, psi);
  MarginalGainEstimate after = exact_marginal_gain(graph, model, v, psi_prime);
  GainPair out;
  out.gain = before.mean;
  out.gain_prime = after.mean;
  out.realizations = before.sample_count;
  return out;
}

}  // namespace

TwoNodeReport two_node_counterexample(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
  InfluenceGraph base(2, {{0, 1, p}});
  TwoNodeReport report;
  report.p = p;

  // Under both models the persistence edge (u_1, u_2) has probability 1, so
  // an all-dead world is not consistent; build psi_prime by hand instead.
  auto evaluate = [&](const DiffusionModel& model) {
    LayeredGraph graph = build_layered_graph(base, 3, model);
    NodeId seed[] = {0};
    PartialRealization psi = with_seeds(PartialRealization(graph), seed);
    Realization world = Realization::uniform(graph.timed_edge_count(), true);
    world.set(graph.influence_edge(0, 1), false);
    PartialRealization psi_prime = observe_myopic(graph, model, world, psi);
    MarginalGainEstimate before = exact_marginal_gain(graph, model, 1, psi);
    MarginalGainEstimate after = exact_marginal_gain(graph, model, 1, psi_prime);
    GainPair out;
    out.gain = before.mean;
    out.gain_prime = after.mean;
    out.realizations = before.sample_count;
    return out;
  };

  report.standard_ic = evaluate(DiffusionModel::standard_ic());
  report.standard_ic.expected_gain = 3.0 - 2.0 * p;
  report.standard_ic.expected_gain_prime = 2.0;

  report.modified_ic = evaluate(DiffusionModel::modified_ic());
  report.modified_ic.expected_gain = p * p + 3.0 * p * (1.0 - p) + 3.0 * (1.0 - p) * (1.0 - p);
  report.modified_ic.expected_gain_prime = 2.0 - p;
  return report;
}

GainPair deactivation_cumulative_counterexample() {
  InfluenceGraph base(2, {{0, 1, 0.5}});
  DiffusionModel model = DiffusionModel::non_progressive_ic(0.5);
  LayeredGraph graph = build_layered_graph(base, 3, model);
  GainPair out = seeded_then_failed(graph, model, 0, 1);
  out.expected_gain = 86.0 / 64.0;
  out.expected_gain_prime = 1.5;
  return out;
}

double terminal_active_value(const InfluenceGraph& graph, int horizon, double q, const SeedSchedule& seeds) {
  if (horizon < 1) throw std::domain_error("horizon must be at least 1");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("deactivation probability must lie in [0, 1]");
  const std::size_t n = graph.node_count();
  const double survive = 1.0 - q;

  // Coin layout: random base edges first, then one survival coin per (node, step).
  std::vector<int> edge_coin(graph.edge_count(), -1);
  int coins = 0;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    if (random_probability(graph.edge(e).probability)) edge_coin[e] = coins++;
  }
  const int first_survival = coins;
  const bool random_survival = random_probability(survive);
  if (random_survival) coins += static_cast<int>(n) * (horizon - 1);
  check_enumerable(static_cast<std::size_t>(coins), kDefaultEnumerationCap, "terminal value");

  auto edge_live = [&](std::size_t e, std::uint64_t mask) {
    int c = edge_coin[e];
    if (c < 0) return graph.edge(e).probability >= 1.0;
    return ((mask >> c) & 1U) != 0;
  };
  auto survives = [&](NodeId v, TimeStep t, std::uint64_t mask) {
    if (!random_survival) return survive >= 1.0;
    int c = first_survival + static_cast<int>(v) * (horizon - 1) + (t - 1);
    return ((mask >> c) & 1U) != 0;
  };

  double total = 0.0;
  const std::uint64_t count = std::uint64_t{1} << coins;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double weight = 1.0;
    for (std::size_t e = 0; e < graph.edge_count(); ++e) {
      if (edge_coin[e] >= 0) weight *= edge_live(e, mask) ? graph.edge(e).probability : 1.0 - graph.edge(e).probability;
    }
    if (random_survival) {
      for (NodeId v = 0; v < n; ++v) {
        for (TimeStep t = 1; t < horizon; ++t) weight *= survives(v, t, mask) ? survive : q;
      }
    }

    std::vector<char> active(n, 0);
    std::vector<char> fresh(n, 0);
    auto next_seed = seeds.entries().begin();
    for (TimeStep t = 1;; ++t) {
      for (; next_seed != seeds.entries().end() && next_seed->time == t; ++next_seed) {
        if (!active[next_seed->node]) active[next_seed->node] = fresh[next_seed->node] = 1;
      }
      if (t == horizon) break;
      std::vector<char> next_active(n, 0);
      std::vector<char> next_fresh(n, 0);
      for (NodeId v = 0; v < n; ++v) {
        if (active[v] && survives(v, t, mask)) next_active[v] = 1;
      }
      for (NodeId v = 0; v < n; ++v) {
        if (!fresh[v]) continue;
        for (const OutEdge& oe : graph.out_edges(v)) {
          if (!edge_live(oe.edge, mask) || next_active[oe.target]) continue;
          next_active[oe.target] = 1;
          next_fresh[oe.target] = !active[oe.target];
        }
      }
      active.swap(next_active);
      fresh.swap(next_fresh);
    }
    // The cascade started at the final step runs to completion.
    std::vector<NodeId> stack;
    for (NodeId v = 0; v < n; ++v) {
      if (fresh[v]) stack.push_back(v);
    }
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const OutEdge& oe : graph.out_edges(v)) {
        if (!edge_live(oe.edge, mask) || active[oe.target]) continue;
        active[oe.target] = 1;
        stack.push_back(oe.target);
      }
    }
    total += weight * static_cast<double>(std::count(active.begin(), active.end(), 1));
  }
  return total;
}

GainPair deactivation_terminal_counterexample() {
  const NodeId u = 0, v = 1, w = 2, z = 3;
  InfluenceGraph base(4, {{v, w, 1.0}, {v, z, 1.0}});
  const int horizon = 2;
  const double q = 0.5;

  GainPair out;
  out.gain = terminal_active_value(base, horizon, q, SeedSchedule({{v, 1}})) -
             terminal_active_value(base, horizon, q, SeedSchedule{});
  out.gain_prime = terminal_active_value(base, horizon, q, SeedSchedule({{u, 1}, {v, 2}})) -
                   terminal_active_value(base, horizon, q, SeedSchedule({{u, 1}}));
  out.expected_gain = 2.5;
  out.expected_gain_prime = 3.0;
  out.realizations = std::uint64_t{1} << (base.node_count() * (horizon - 1));
  return out;
}

namespace {

/// Backward induction over (time, active set, first-activation set, domain, budget).
class OptimalSolver {
 public:
  OptimalSolver(const LayeredGraph& graph, const DiffusionModel& model) : graph_(graph), model_(model) {}

  double decide(TimeStep t, std::uint64_t active, std::uint64_t fresh, std::uint64_t dom, std::size_t budget) {
    Key key{t, active, fresh, dom, budget};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    double best = settle(t, active, fresh, dom, budget);
    if (budget > 0) {
      for (NodeId v = 0; v < graph_.node_count(); ++v) {
        std::uint64_t bit = std::uint64_t{1} << v;
        if (dom & bit) continue;
        best = std::max(best, settle(t, active | bit, fresh | bit, dom | bit, budget - 1));
      }
    }
    memo_.emplace(key, best);
    return best;
  }

  std::uint64_t states() const noexcept { return memo_.size(); }

 private:
  struct Key {
    TimeStep t;
    std::uint64_t active, fresh, dom;
    std::size_t budget;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = rng::derive(static_cast<std::uint64_t>(k.t), {k.active, k.fresh, k.dom, k.budget});
      return static_cast<std::size_t>(h);
    }
  };

  /// Seeds for step t are fixed: count this layer, then average over the
  /// outcomes of the edges leaving it.
  double settle(TimeStep t, std::uint64_t active, std::uint64_t fresh, std::uint64_t dom, std::size_t budget) {
    double here = static_cast<double>(std::popcount(active));
    if (t >= graph_.horizon()) return here;

    struct Attempt {
      EdgeId edge;
      NodeId target;
    };
    std::vector<Attempt> sure;
    std::vector<Attempt> coin;
    const bool persists = graph_.persistence().materialized();
    for (NodeId v = 0; v < graph_.node_count(); ++v) {
      std::uint64_t bit = std::uint64_t{1} << v;
      if (!(active & bit)) continue;
      auto add = [&](EdgeId e, NodeId target) {
        double p = graph_.probability(e);
        if (p >= 1.0) sure.push_back({e, target});
        else if (p > 0.0) coin.push_back({e, target});
      };
      if (persists) add(graph_.persistence_edge(v, t), v);
      bool attempts = model_.kind != DiffusionModel::Kind::standard_ic || (fresh & bit);
      if (!attempts) continue;
      for (const OutEdge& oe : graph_.base().out_edges(v)) add(graph_.influence_edge(oe.edge, t), oe.target);
    }
    check_enumerable(coin.size(), kDefaultEnumerationCap, "one optimal-policy step");

    std::uint64_t forced = 0;
    for (const Attempt& a : sure) forced |= std::uint64_t{1} << a.target;
    double expected = 0.0;
    const std::uint64_t count = std::uint64_t{1} << coin.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      std::uint64_t next = forced;
      double weight = 1.0;
      for (std::size_t i = 0; i < coin.size(); ++i) {
        double p = graph_.probability(coin[i].edge);
        if ((mask >> i) & 1U) {
          next |= std::uint64_t{1} << coin[i].target;
          weight *= p;
        } else {
          weight *= 1.0 - p;
        }
      }
      expected += weight * decide(t + 1, next, next & ~dom, dom | next, budget);
    }
    return here + expected;
  }

  const LayeredGraph& graph_;
  DiffusionModel model_;
  std::unordered_map<Key, double, KeyHash> memo_;
};

}  // namespace

OptimalPolicyValue optimal_adaptive_policy_value(const LayeredGraph& graph, const DiffusionModel& model,
                                                 std::size_t k, std::size_t cap) {
  check_enumerable(graph.random_edge_count(), cap, "optimal policy value");
  if (graph.node_count() > 64) throw CapacityError("optimal policy value supports at most 64 nodes");
  OptimalSolver solver(graph, model);
  OptimalPolicyValue out;
  out.value = solver.decide(1, 0, 0, 0, k);
  out.decision_tree_size = solver.states();
  return out;
}

double policy_value_by_tree(Policy& policy, const LayeredGraph& graph, const DiffusionModel& model, std::size_t k) {
  if (!policy.deterministic() || !policy.stateless()) {
    throw std::domain_error("tree evaluation needs a deterministic, stateless policy");
  }
  policy.reset(0);
  std::unordered_map<std::string, double> memo;

  auto value = [&](auto&& self, const PartialRealization& psi, std::size_t budget) -> double {
    std::string key = psi.encode() + "#" + std::to_string(budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    std::vector<NodeId> chosen;
    if (budget > 0) {
      chosen = policy.next_seeds(SelectionContext{graph, model, psi, budget});
      if (chosen.size() > budget) chosen.resize(budget);
    }
    std::vector<NodeId> fresh;
    for (NodeId v : chosen) {
      if (!psi.in_domain(v)) fresh.push_back(v);
    }
    PartialRealization seeded = with_seeds(psi, fresh);
    std::size_t left = budget - chosen.size();
    double here = static_cast<double>(replay_observed(graph, model, seeded).active_count());
    double total = here;
    if (time_of(seeded) < graph.horizon()) {
      for (const ObservationOutcome& outcome : observation_outcomes(graph, model, seeded)) {
        total += outcome.probability * self(self, outcome.psi, left);
      }
    }
    memo.emplace(std::move(key), total);
    return total;
  };
  return value(value, PartialRealization(graph), k);
}

double greedy_bound() { return 1.0 - std::exp(-1.0); }

bool RatioCheck::meets_bound() const { return ratio >= greedy_bound() - 1e-12; }

RatioCheck approximation_ratio_check(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                     std::size_t cap) {
  RatioCheck out;
  out.optimal_value = optimal_adaptive_policy_value(graph, model, k, cap).value;
  EstimatorConfig config;
  config.mode = EstimatorMode::exact;
  config.memoize = true;
  GainEstimator estimator(graph, model, config);
  AdaptiveGreedyPolicy greedy(estimator);
  out.greedy_value = exact_policy_value(greedy, graph, model, k);
  out.ratio = out.optimal_value > 0.0 ? out.greedy_value / out.optimal_value : 1.0;
  return out;
}

}  // namespace adaptim
