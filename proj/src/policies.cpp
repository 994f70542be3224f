#include "adaptim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "adaptim/rng.hpp"

namespace adaptim {

namespace {

std::vector<NodeId> as_list(std::optional<NodeId> v) {
  if (!v) return {};
  return {*v};
}

/// Heap order: larger bound on top, then smaller node id.
bool lower_priority(const LazyGreedyState::Entry& a, const LazyGreedyState::Entry& b) {
  if (a.bound != b.bound) return a.bound < b.bound;
  return a.node > b.node;
}

void check_estimator(const LayeredGraph& graph, const DiffusionModel& model, const GainEstimator& estimator) {
  if (&estimator.graph() != &graph || !(estimator.model() == model)) {
    throw std::invalid_argument("estimator was built for another graph or model");
  }
}

}  // namespace

PolicyRunResult run_adaptive_policy(Policy& policy, const LayeredGraph& graph, const DiffusionModel& model,
                                    std::size_t k, const Realization& realization, std::uint64_t run_key) {
  policy.reset(run_key);
  PolicyRunResult result;
  PartialRealization psi(graph);
  std::size_t remaining = k;
  for (TimeStep t = 1; t <= graph.horizon(); ++t) {
    std::vector<NodeId> chosen;
    if (remaining > 0) {
      chosen = policy.next_seeds(SelectionContext{graph, model, psi, remaining});
      if (chosen.size() > remaining) chosen.resize(remaining);
    }
    std::vector<NodeId> fresh;
    for (NodeId v : chosen) {
      result.seeds.add(v, t);
      if (!psi.in_domain(v)) fresh.push_back(v);
    }
    remaining -= chosen.size();
    result.seeds_by_step.push_back(std::move(chosen));
    psi = observe_myopic(graph, model, realization, psi, fresh);
  }
  result.trace = diffuse(graph, model, result.seeds, realization);
  result.utility_final = final_spread(result.trace, model);
  result.utility_cumulative = cumulative_spread(result.trace);
  return result;
}

std::optional<NodeId> adaptive_greedy_step(const PartialRealization& psi, GainEstimator& estimator) {
  std::optional<NodeId> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (NodeId v = 0; v < psi.node_count(); ++v) {
    if (psi.in_domain(v)) continue;
    double value = estimator.estimate(v, psi).mean;
    if (!best || value > best_value) {
      best = v;
      best_value = value;
    }
  }
  return best;
}

std::vector<NodeId> AdaptiveGreedyPolicy::next_seeds(const SelectionContext& context) {
  return as_list(adaptive_greedy_step(context.psi, *estimator_));
}

LazyGreedyState::LazyGreedyState(std::size_t node_count, bool strict) : strict_(strict) {
  heap_.reserve(node_count);
  for (std::size_t v = 0; v < node_count; ++v) {
    heap_.push_back({std::numeric_limits<double>::infinity(), 0.0, static_cast<NodeId>(v), 0});
  }
  std::make_heap(heap_.begin(), heap_.end(), lower_priority);
}

std::optional<NodeId> lazy_greedy_step(const PartialRealization& psi, LazyGreedyState& state,
                                       GainEstimator& estimator) {
  auto& heap = state.heap_;
  ++state.round_;
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), lower_priority);
    LazyGreedyState::Entry top = heap.back();
    if (psi.in_domain(top.node)) {
      heap.pop_back();
      continue;
    }
    if (top.round == state.round_) {
      heap.pop_back();
      return top.node;
    }
    MarginalGainEstimate fresh = estimator.estimate(top.node, psi);
    if (std::isfinite(top.bound)) {
      double slack = 4.0 * std::sqrt(top.std_error * top.std_error + fresh.std_error * fresh.std_error) + 1e-9;
      if (fresh.mean > top.bound + slack) {
        ++state.violations_;
        if (state.strict_) throw std::logic_error("lazy greedy bound violated: gains are not adaptive submodular");
      }
    }
    heap.back() = {fresh.mean, fresh.std_error, top.node, state.round_};
    std::push_heap(heap.begin(), heap.end(), lower_priority);
  }
  return std::nullopt;
}

LazyGreedyPolicy::LazyGreedyPolicy(GainEstimator& estimator, bool strict)
    : estimator_(&estimator), strict_(strict), state_(estimator.graph().node_count(), strict) {}

void LazyGreedyPolicy::reset(std::uint64_t) { state_ = LazyGreedyState(estimator_->graph().node_count(), strict_); }

std::vector<NodeId> LazyGreedyPolicy::next_seeds(const SelectionContext& context) {
  return as_list(lazy_greedy_step(context.psi, state_, *estimator_));
}

std::optional<NodeId> degree_step(const InfluenceGraph& graph, const PartialRealization& psi) {
  std::optional<NodeId> best;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (psi.in_domain(v)) continue;
    if (!best || graph.out_degree(v) > graph.out_degree(*best)) best = v;
  }
  return best;
}

std::optional<NodeId> centrality_step(std::span<const double> scores, const PartialRealization& psi) {
  std::optional<NodeId> best;
  for (NodeId v = 0; v < scores.size(); ++v) {
    if (psi.in_domain(v)) continue;
    if (!best || scores[v] > scores[*best]) best = v;
  }
  return best;
}

std::optional<NodeId> random_step(const PartialRealization& psi, std::uint64_t seed) {
  std::vector<NodeId> inactive;
  std::uint64_t fingerprint = rng::label("inactive");
  for (NodeId v = 0; v < psi.node_count(); ++v) {
    if (psi.in_domain(v)) continue;
    inactive.push_back(v);
    fingerprint = rng::derive(fingerprint, v);
  }
  if (inactive.empty()) return std::nullopt;
  std::mt19937_64 engine(rng::derive(seed, fingerprint));
  std::uniform_int_distribution<std::size_t> pick(0, inactive.size() - 1);
  return inactive[pick(engine)];
}

std::vector<NodeId> DegreePolicy::next_seeds(const SelectionContext& context) {
  return as_list(degree_step(context.graph.base(), context.psi));
}

CentralityPolicy::CentralityPolicy(const InfluenceGraph& graph) : scores_(betweenness_centrality(graph)) {}

std::vector<NodeId> CentralityPolicy::next_seeds(const SelectionContext& context) {
  return as_list(centrality_step(scores_, context.psi));
}

RandomPolicy::RandomPolicy(std::optional<std::uint64_t> seed) : seed_(seed) {}

void RandomPolicy::reset(std::uint64_t run_key) {
  if (seed_) {
    run_seed_ = rng::derive(*seed_, run_key);
  } else {
    std::random_device device;
    run_seed_ = (static_cast<std::uint64_t>(device()) << 32) | device();
  }
}

std::vector<NodeId> RandomPolicy::next_seeds(const SelectionContext& context) {
  return as_list(random_step(context.psi, run_seed_));
}

SeedSchedule nonadaptive_greedy_schedule(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                         GainEstimator& estimator) {
  check_estimator(graph, model, estimator);
  if (k > graph.node_count()) throw std::domain_error("budget exceeds the number of nodes");
  SeedSchedule schedule;
  PartialRealization blind(graph);
  const auto steps = std::min<std::size_t>(k, static_cast<std::size_t>(graph.horizon()));
  for (std::size_t i = 1; i <= steps; ++i) {
    auto t = static_cast<TimeStep>(i);
    blind.advance_clock(t);
    std::optional<NodeId> v = adaptive_greedy_step(blind, estimator);
    if (!v) break;
    schedule.add(*v, t);
    blind.mark_active(*v, t);
  }
  return schedule;
}

ScheduledPolicy::ScheduledPolicy(SeedSchedule schedule, std::string name)
    : schedule_(std::move(schedule)), name_(std::move(name)) {}

std::vector<NodeId> ScheduledPolicy::next_seeds(const SelectionContext& context) {
  std::vector<NodeId> out;
  for (const TimedSeed& s : schedule_.entries()) {
    if (s.time == time_of(context.psi)) out.push_back(s.node);
  }
  return out;
}

NonAdaptiveGreedyPolicy::NonAdaptiveGreedyPolicy(const LayeredGraph& graph, const DiffusionModel& model,
                                                 std::size_t k, GainEstimator& estimator)
    : ScheduledPolicy(SeedSchedule{}, "non-adaptive"), graph_(&graph), model_(model), k_(k), estimator_(&estimator) {}

void NonAdaptiveGreedyPolicy::reset(std::uint64_t) {
  if (ready_) return;
  computed_ = nonadaptive_greedy_schedule(*graph_, model_, std::min(k_, graph_->node_count()), *estimator_);
  set_schedule(computed_);
  ready_ = true;
}

PartialRealization active_set_observation(const LayeredGraph& graph, std::span<const NodeId> active, TimeStep t) {
  if (t < 1 || t > graph.horizon()) throw std::domain_error("layer outside [1, T]");
  PartialRealization psi(graph);
  psi.advance_clock(t);
  for (NodeId v : active) {
    if (v >= graph.node_count()) throw std::domain_error("active node out of range");
    psi.mark_active(v, t);
  }
  return psi;
}

std::vector<NodeId> per_step_batch_greedy(const LayeredGraph& graph, const DiffusionModel& model,
                                          std::span<const NodeId> active, TimeStep t, std::size_t k_t,
                                          GainEstimator& estimator) {
  check_estimator(graph, model, estimator);
  PartialRealization psi = active_set_observation(graph, active, t);
  std::vector<NodeId> batch;
  for (std::size_t i = 0; i < k_t; ++i) {
    std::optional<NodeId> v = adaptive_greedy_step(psi, estimator);
    if (!v) break;
    batch.push_back(*v);
    psi.mark_active(*v, t);
  }
  return batch;
}

}  // namespace adaptim
