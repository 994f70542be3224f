#include "adaptim/estimation.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "adaptim/policies.hpp"
#include "adaptim/utility.hpp"

namespace adaptim {

namespace {

__extension__ typedef __int128 Wide;

bool random_probability(double p) { return p > 0.0 && p < 1.0; }

/// Compensated (Neumaier) summation; order-stable to within one rounding.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Unobserved random edges take their status from the bits of `mask`.
struct AssignmentSource {
  const LayeredGraph* graph;
  const PartialRealization* psi;
  const std::vector<int>* bit_of;
  std::uint64_t mask;

  bool live(EdgeId e) const {
    EdgeStatus s = psi->status(e);
    if (s != EdgeStatus::unknown) return s == EdgeStatus::live;
    double p = graph->probability(e);
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    int bit = (*bit_of)[e];
    if (bit < 0) throw std::logic_error("enumeration reached an edge outside its support");
    return ((mask >> bit) & 1U) != 0;
  }
};

void check_candidate(const PartialRealization& psi, NodeId v) {
  if (v >= psi.node_count()) throw std::domain_error("candidate node out of range");
  if (psi.in_domain(v)) throw std::domain_error("candidate is already in the observed domain");
}

/// Replays dom(psi) reading observed statuses only. Empty when the replay
/// needed an unobserved random edge.
std::optional<Cascade> deterministic_prefix(const LayeredGraph& graph, const DiffusionModel& model,
                                            const PartialRealization& psi) {
  ObservedStatuses probe{&graph, &psi};
  Cascade cascade = replay_domain(graph, model, psi, probe);
  if (probe.needed_unobserved) return std::nullopt;
  return cascade;
}

/// Scratch marks for the frontier of nodes only the candidate reaches.
struct FrontierScratch {
  std::vector<std::uint64_t> mark;
  std::uint64_t generation = 0;
};

/// Gain of seeding v on the cascade's current layer, consuming `prefix`.
///
/// Where diffusion is plain reachability on the layered graph (every model
/// but standard IC), the gain is the number of timed nodes reachable from v
/// that the baseline misses; that frontier is pushed alongside the baseline
/// and the loop stops once it dies out. Standard IC runs both cascades.
template <EdgeStatusSource Source>
std::int64_t gain_after(const LayeredGraph& graph, const DiffusionModel& model, Cascade prefix, NodeId v,
                        const Source& source, FrontierScratch& scratch) {
  if (model.kind == DiffusionModel::Kind::standard_ic) {
    Cascade with = prefix;
    if (!with.seed(v)) return 0;
    return remaining_cumulative(std::move(with), source) - remaining_cumulative(std::move(prefix), source);
  }
  if (prefix.is_active(v)) return 0;
  if (scratch.mark.size() != graph.node_count()) scratch.mark.assign(graph.node_count(), 0);
  const std::uint64_t base = scratch.generation;
  scratch.generation += static_cast<std::uint64_t>(graph.horizon()) + 1;

  const bool persists = graph.persistence().materialized();
  std::vector<NodeId> extra{v};
  std::vector<NodeId> next;
  std::int64_t gain = 1;
  while (!prefix.at_horizon() && !extra.empty()) {
    const TimeStep t = prefix.time();
    prefix.advance(source);
    const std::uint64_t stamp = base + static_cast<std::uint64_t>(t) + 1;
    next.clear();
    auto reach = [&](NodeId u) {
      if (prefix.is_active(u) || scratch.mark[u] == stamp) return;
      scratch.mark[u] = stamp;
      next.push_back(u);
    };
    for (NodeId u : extra) {
      if (persists && source.live(graph.persistence_edge(u, t))) reach(u);
      for (const OutEdge& oe : graph.base().out_edges(u)) {
        if (source.live(graph.influence_edge(oe.edge, t))) reach(oe.target);
      }
    }
    extra.swap(next);
    gain += static_cast<std::int64_t>(extra.size());
  }
  return gain;
}

std::vector<EdgeId> support_from(const LayeredGraph& graph, const PartialRealization& psi, TimeStep first_layer) {
  std::vector<EdgeId> out;
  if (first_layer >= graph.horizon()) return out;
  EdgeId begin = static_cast<EdgeId>(first_layer - 1) * graph.edges_per_boundary();
  for (EdgeId e = begin; e < graph.timed_edge_count(); ++e) {
    if (!psi.observed(e) && random_probability(graph.probability(e))) out.push_back(e);
  }
  return out;
}

}  // namespace

std::int64_t realized_marginal_gain(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                    const PartialRealization& psi, const Realization& realization) {
  check_candidate(psi, v);
  if (realization.size() != graph.timed_edge_count()) throw std::domain_error("realization does not fit the graph");
  if (!is_consistent(realization, psi)) throw std::domain_error("realization is inconsistent with the observation");
  return realized_marginal_gain_with(graph, model, v, psi, realization);
}

std::vector<EdgeId> enumeration_edges(const LayeredGraph& graph, const DiffusionModel& model,
                                      const PartialRealization& psi) {
  if (deterministic_prefix(graph, model, psi)) return support_from(graph, psi, time_of(psi));
  TimeStep earliest = time_of(psi);
  for (NodeId v = 0; v < psi.node_count(); ++v) {
    if (psi.in_domain(v)) earliest = std::min(earliest, psi.activation_time(v));
  }
  return support_from(graph, psi, earliest);
}

MarginalGainEstimate exact_marginal_gain(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                         const PartialRealization& psi, std::size_t cap) {
  check_candidate(psi, v);
  std::optional<Cascade> prefix = deterministic_prefix(graph, model, psi);
  std::vector<EdgeId> support = enumeration_edges(graph, model, psi);
  if (support.size() > cap || support.size() >= 63) {
    throw CapacityError("exact gain needs " + std::to_string(support.size()) +
                        " unobserved random edges (cap " + std::to_string(cap) + "); use Monte Carlo");
  }

  std::vector<int> bit_of(graph.timed_edge_count(), -1);
  for (std::size_t i = 0; i < support.size(); ++i) bit_of[support[i]] = static_cast<int>(i);

  const std::uint64_t count = std::uint64_t{1} << support.size();
  FrontierScratch scratch;
  CompensatedSum total;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double weight = 1.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
      double p = graph.probability(support[i]);
      weight *= ((mask >> i) & 1U) ? p : 1.0 - p;
    }
    AssignmentSource source{&graph, &psi, &bit_of, mask};
    std::int64_t gain = gain_after(graph, model, prefix ? *prefix : replay_domain(graph, model, psi, source), v,
                                   source, scratch);
    total.add(weight * static_cast<double>(gain));
  }
  return {total.value(), 0.0, count, true};
}

MarginalGainEstimate mc_marginal_gain(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                      const PartialRealization& psi, std::size_t n_sims, std::uint64_t stream) {
  check_candidate(psi, v);
  if (n_sims == 0) throw std::domain_error("Monte Carlo needs at least one simulation");
  std::optional<Cascade> prefix = deterministic_prefix(graph, model, psi);

  FrontierScratch scratch;
  Wide sum = 0;
  Wide sum_sq = 0;
  for (std::size_t s = 0; s < n_sims; ++s) {
    ConditionalSampler source{&graph, &psi, rng::derive(stream, s)};
    std::int64_t gain = gain_after(graph, model, prefix ? *prefix : replay_domain(graph, model, psi, source), v,
                                   source, scratch);
    sum += gain;
    sum_sq += static_cast<Wide>(gain) * gain;
  }
  const auto n = static_cast<double>(n_sims);
  MarginalGainEstimate out;
  out.mean = static_cast<double>(sum) / n;
  out.sample_count = n_sims;
  if (n_sims > 1) {
    // n * sum_sq - sum^2 is exact in integers, so a constant gain has zero error.
    Wide spread = static_cast<Wide>(n_sims) * sum_sq - sum * sum;
    double variance = static_cast<double>(spread) / (n * (n - 1.0));
    out.std_error = std::sqrt(std::max(variance, 0.0) / n);
  }
  return out;
}

Realization sample_conditional(const LayeredGraph& graph, const PartialRealization& psi, std::uint64_t stream) {
  ConditionalSampler source{&graph, &psi, stream};
  std::vector<std::uint8_t> live(graph.timed_edge_count());
  for (EdgeId e = 0; e < live.size(); ++e) live[e] = source.live(e) ? 1 : 0;
  return Realization(std::move(live));
}

GainEstimator::GainEstimator(const LayeredGraph& graph, const DiffusionModel& model, EstimatorConfig config)
    : graph_(&graph), model_(model), config_(config) {
  if (config_.simulations == 0) throw std::domain_error("estimator needs at least one simulation");
}

MarginalGainEstimate GainEstimator::estimate(NodeId v, const PartialRealization& psi) {
  ++evaluations_;
  bool exact = config_.mode == EstimatorMode::exact;
  if (config_.mode == EstimatorMode::automatic) {
    std::size_t m = enumeration_edges(*graph_, model_, psi).size();
    exact = m <= config_.enumeration_cap && m < 63 && (std::uint64_t{1} << m) <= config_.simulations;
  }
  if (!exact) {
    std::uint64_t stream = rng::derive(config_.stream, {static_cast<std::uint64_t>(time_of(psi)), v});
    return mc_marginal_gain(*graph_, model_, v, psi, config_.simulations, stream);
  }
  if (!config_.memoize) return exact_marginal_gain(*graph_, model_, v, psi, config_.enumeration_cap);
  std::string key = psi.encode();
  key += '|';
  key += std::to_string(v);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  MarginalGainEstimate value = exact_marginal_gain(*graph_, model_, v, psi, config_.enumeration_cap);
  memo_.emplace(std::move(key), value);
  return value;
}

namespace {

/// Caches a stateless policy's decision per observation.
class MemoizedPolicy final : public Policy {
 public:
  explicit MemoizedPolicy(Policy& inner) : inner_(&inner) {}

  std::string name() const override { return inner_->name(); }
  void reset(std::uint64_t run_key) override { inner_->reset(run_key); }
  std::vector<NodeId> next_seeds(const SelectionContext& context) override {
    std::string key = context.psi.encode();
    key += '|';
    key += std::to_string(context.remaining_budget);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<NodeId> seeds = inner_->next_seeds(context);
    cache_.emplace(std::move(key), seeds);
    return seeds;
  }

 private:
  Policy* inner_;
  std::unordered_map<std::string, std::vector<NodeId>> cache_;
};

}  // namespace

double exact_policy_value(Policy& policy, const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                          std::size_t cap) {
  if (!policy.deterministic()) throw std::domain_error("exact policy value needs a deterministic policy");
  std::vector<EdgeId> random_edges;
  for (EdgeId e = 0; e < graph.timed_edge_count(); ++e) {
    if (random_probability(graph.probability(e))) random_edges.push_back(e);
  }
  if (random_edges.size() > cap || random_edges.size() >= 63) {
    throw CapacityError("exact policy value needs " + std::to_string(random_edges.size()) +
                        " random timed edges (cap " + std::to_string(cap) + ")");
  }

  std::vector<std::uint8_t> base(graph.timed_edge_count());
  for (EdgeId e = 0; e < base.size(); ++e) base[e] = graph.probability(e) >= 1.0 ? 1 : 0;

  MemoizedPolicy memoized(policy);
  Policy& runner = policy.stateless() ? static_cast<Policy&>(memoized) : policy;

  CompensatedSum total;
  const std::uint64_t count = std::uint64_t{1} << random_edges.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<std::uint8_t> live = base;
    double weight = 1.0;
    for (std::size_t i = 0; i < random_edges.size(); ++i) {
      bool on = ((mask >> i) & 1U) != 0;
      live[random_edges[i]] = on ? 1 : 0;
      double p = graph.probability(random_edges[i]);
      weight *= on ? p : 1.0 - p;
    }
    PolicyRunResult run = run_adaptive_policy(runner, graph, model, k, Realization(std::move(live)));
    total.add(weight * static_cast<double>(run.utility_cumulative));
  }
  return total.value();
}

}  // namespace adaptim
