#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adaptim/layered_graph.hpp"

namespace adaptim {

/// Diffusion semantics on the time-expanded graph.
///
/// modified_ic: active nodes stay active and retry every out-edge at every
/// step (one independent timed edge per step). standard_ic: a node attempts
/// its out-edges only on the step right after its first activation.
/// non_progressive_ic: modified_ic, except an active node survives to the
/// next step only through its persistence edge, live with probability 1 - q.
struct DiffusionModel {
  enum class Kind { modified_ic, standard_ic, non_progressive_ic };

  Kind kind = Kind::modified_ic;
  /// Per-step deactivation probability q (non_progressive_ic only).
  double deactivation = 0.0;

  static DiffusionModel modified_ic() { return {Kind::modified_ic, 0.0}; }
  static DiffusionModel standard_ic() { return {Kind::standard_ic, 0.0}; }
  static DiffusionModel non_progressive_ic(double q) { return {Kind::non_progressive_ic, q}; }

  bool progressive() const noexcept { return kind != Kind::non_progressive_ic; }

  Persistence persistence() const {
    return progressive() ? Persistence::always_live() : Persistence::random(1.0 - deactivation);
  }

  /// Whether a node first activated at `activated` attempts its out-edges from layer t.
  bool may_attempt(TimeStep activated, TimeStep t) const noexcept {
    return kind != Kind::standard_ic || activated == t;
  }

  friend bool operator==(const DiffusionModel&, const DiffusionModel&) = default;
};

std::string to_string(const DiffusionModel& model);
/// "modified-ic", "standard-ic" or "non-progressive-ic". Throws ConfigError.
DiffusionModel parse_diffusion_model(std::string_view name, double deactivation = 0.0);

/// Layered graph with the persistence edges `model` implies. Throws
/// std::domain_error when horizon < 1.
LayeredGraph build_layered_graph(InfluenceGraph graph, int horizon, const DiffusionModel& model);

/// Anything that answers "is timed edge e live?".
template <class S>
concept EdgeStatusSource = requires(const S& s, EdgeId e) {
  { s.live(e) } -> std::convertible_to<bool>;
};

/// A full live/dead assignment of every timed edge.
class Realization {
 public:
  Realization() = default;
  explicit Realization(std::vector<std::uint8_t> live) : live_(std::move(live)) {}
  static Realization uniform(std::size_t edge_count, bool live) {
    return Realization(std::vector<std::uint8_t>(edge_count, live ? 1 : 0));
  }

  std::size_t size() const noexcept { return live_.size(); }
  bool live(EdgeId e) const noexcept { return live_[e] != 0; }
  void set(EdgeId e, bool live) { live_[e] = live ? 1 : 0; }
  std::span<const std::uint8_t> statuses() const noexcept { return live_; }

  /// Product over timed edges of p^X (1-p)^(1-X).
  double prior_probability(const LayeredGraph& graph) const;
  /// FNV-1a over the statuses; identifies the world in experiment output.
  std::uint64_t digest() const noexcept;

  friend bool operator==(const Realization&, const Realization&) = default;

 private:
  std::vector<std::uint8_t> live_;
};

/// Independent Bernoulli draw per timed edge from counter stream `stream`.
/// Edges with probability 1 are always live, 0 always dead.
Realization sample_realization(const LayeredGraph& graph, std::uint64_t stream);

struct TimedSeed {
  NodeId node = 0;
  TimeStep time = 1;

  friend bool operator==(const TimedSeed&, const TimedSeed&) = default;
};

/// Seeds with activation times; times non-decreasing, no node twice.
class SeedSchedule {
 public:
  SeedSchedule() = default;
  /// Throws std::invalid_argument if the entries break the invariants.
  explicit SeedSchedule(std::vector<TimedSeed> entries);

  void add(NodeId node, TimeStep time);
  std::span<const TimedSeed> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool contains(NodeId node) const;

  friend bool operator==(const SeedSchedule&, const SeedSchedule&) = default;

 private:
  std::vector<TimedSeed> entries_;
};

/// Active sets sigma_t for t = 1..T, each sorted ascending.
struct DiffusionTrace {
  std::vector<std::vector<NodeId>> active_sets;

  int horizon() const noexcept { return static_cast<int>(active_sets.size()); }
  const std::vector<NodeId>& at(TimeStep t) const { return active_sets.at(static_cast<std::size_t>(t - 1)); }
};

/// Layer-by-layer cascade state: the set of nodes active at the current
/// layer, plus every node's first activation time (0 = never active).
class Cascade {
 public:
  Cascade(const LayeredGraph& graph, const DiffusionModel& model)
      : graph_(&graph),
        model_(model),
        stamp_(graph.node_count(), 0),
        activation_(graph.node_count(), 0) {}

  TimeStep time() const noexcept { return time_; }
  bool at_horizon() const noexcept { return time_ >= graph_->horizon(); }
  std::span<const NodeId> active() const noexcept { return active_; }
  std::size_t active_count() const noexcept { return active_.size(); }
  bool is_active(NodeId v) const noexcept { return stamp_[v] == time_; }
  TimeStep activation_time(NodeId v) const noexcept { return activation_[v]; }

  /// Activates v on the current layer. Returns false (no-op) if already active.
  bool seed(NodeId v) {
    if (stamp_[v] == time_) return false;
    stamp_[v] = time_;
    active_.push_back(v);
    if (activation_[v] == 0) activation_[v] = time_;
    return true;
  }

  /// Moves to the next layer, querying every eligible timed edge that departs
  /// the current layer from an active node. `observer(e, live)` sees each query.
  template <EdgeStatusSource Source, class Observer>
  void advance(const Source& source, Observer&& observer) {
    const TimeStep t = time_;
    const TimeStep next = t + 1;
    const bool persists = graph_->persistence().materialized();
    next_.clear();
    auto reach = [&](NodeId u) {
      if (stamp_[u] == next) return;
      stamp_[u] = next;
      next_.push_back(u);
      if (activation_[u] == 0) activation_[u] = next;
    };
    const InfluenceGraph& base = graph_->base();
    for (NodeId v : active_) {
      if (persists) {
        EdgeId e = graph_->persistence_edge(v, t);
        bool live = source.live(e);
        observer(e, live);
        if (live) reach(v);
      }
      if (!model_.may_attempt(activation_[v], t)) continue;
      for (const OutEdge& oe : base.out_edges(v)) {
        EdgeId e = graph_->influence_edge(oe.edge, t);
        bool live = source.live(e);
        observer(e, live);
        if (live) reach(oe.target);
      }
    }
    active_.swap(next_);
    time_ = next;
  }

  template <EdgeStatusSource Source>
  void advance(const Source& source) {
    advance(source, [](EdgeId, bool) {});
  }

 private:
  const LayeredGraph* graph_;
  DiffusionModel model_;
  TimeStep time_ = 1;
  std::vector<TimeStep> stamp_;
  std::vector<TimeStep> activation_;
  std::vector<NodeId> active_;
  std::vector<NodeId> next_;
};

/// Runs the schedule to the horizon. Seeding an already-active node is a
/// no-op. Throws std::domain_error if a seed time lies outside [1, T].
template <EdgeStatusSource Source>
DiffusionTrace diffuse_with(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                            const Source& source);

DiffusionTrace diffuse(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                       const Realization& realization);

enum class EdgeStatus : std::int8_t { unknown = -1, dead = 0, live = 1 };

/// What has been observed so far: timed-edge statuses, first activation
/// times of observed-active nodes (the domain), and the current time.
class PartialRealization {
 public:
  PartialRealization() = default;
  /// The empty observation at time 1.
  explicit PartialRealization(const LayeredGraph& graph)
      : edges_per_boundary_(graph.edges_per_boundary() == 0 ? 1 : graph.edges_per_boundary()),
        status_(graph.timed_edge_count(), static_cast<std::int8_t>(EdgeStatus::unknown)),
        activation_(graph.node_count(), 0) {}

  TimeStep clock() const noexcept { return clock_; }
  void advance_clock(TimeStep t) noexcept {
    if (t > clock_) clock_ = t;
  }

  EdgeStatus status(EdgeId e) const noexcept { return static_cast<EdgeStatus>(status_[e]); }
  bool observed(EdgeId e) const noexcept { return status_[e] >= 0; }
  /// Records a status and moves the clock to the edge's arrival layer.
  /// Throws std::logic_error if e already holds the opposite status.
  void record(EdgeId e, bool live);
  std::size_t observed_count() const noexcept { return observed_count_; }
  std::size_t timed_edge_count() const noexcept { return status_.size(); }

  TimeStep activation_time(NodeId v) const noexcept { return activation_[v]; }
  bool in_domain(NodeId v) const noexcept { return activation_[v] != 0; }
  std::vector<NodeId> domain() const;
  std::size_t node_count() const noexcept { return activation_.size(); }
  /// Marks v observed active from time t (keeps an earlier activation time).
  void mark_active(NodeId v, TimeStep t);

  /// Canonical text form, e.g. "t=2;dom=0@1;obs=0:D,4:L". Equal iff the
  /// partial realizations are equal.
  std::string encode() const;

  friend bool operator==(const PartialRealization&, const PartialRealization&) = default;

 private:
  std::size_t edges_per_boundary_ = 1;
  TimeStep clock_ = 1;
  std::vector<std::int8_t> status_;
  std::vector<TimeStep> activation_;
  std::size_t observed_count_ = 0;
};

/// Largest time index among observations (the clock), 1 for the empty one.
inline TimeStep time_of(const PartialRealization& psi) noexcept { return psi.clock(); }

/// psi with `seeds` activated at time_of(psi). Throws std::domain_error if a
/// seed is already in dom(psi).
PartialRealization with_seeds(PartialRealization psi, std::span<const NodeId> seeds);

/// Replays dom(psi) as timed seeds under `source` and stops at layer
/// time_of(psi), with every domain node due by then seeded.
template <EdgeStatusSource Source>
Cascade replay_domain(const LayeredGraph& graph, const DiffusionModel& model, const PartialRealization& psi,
                      const Source& source);

/// One step of myopic feedback: seeds `newly_seeded` at t = time_of(psi),
/// records the status of every eligible timed edge departing layer t from an
/// active node (failures included), adds the nodes activated at t+1 to the
/// domain and moves the clock to t+1. At the horizon only the seeds are
/// added. Throws std::logic_error if psi disagrees with the realization.
PartialRealization observe_myopic(const LayeredGraph& graph, const DiffusionModel& model,
                                  const Realization& realization, const PartialRealization& psi,
                                  std::span<const NodeId> newly_seeded = {});

template <EdgeStatusSource Source>
PartialRealization observe_myopic_with(const LayeredGraph& graph, const DiffusionModel& model, const Source& source,
                                       PartialRealization psi, std::span<const NodeId> newly_seeded = {});

bool is_consistent(const Realization& realization, const PartialRealization& psi);

/// psi is contained in psi_prime: every observed status agrees, dom(psi) is a
/// subset of dom(psi_prime) with the same activation times, and
/// time_of(psi) <= time_of(psi_prime).
bool is_subrealization(const PartialRealization& psi, const PartialRealization& psi_prime);

/// p(phi | psi): 0 if inconsistent, otherwise the Bernoulli product over the
/// timed edges psi leaves unobserved.
double conditional_probability(const LayeredGraph& graph, const Realization& realization,
                               const PartialRealization& psi);

// ---------------------------------------------------------------------------

template <EdgeStatusSource Source>
DiffusionTrace diffuse_with(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                            const Source& source) {
  const int horizon = graph.horizon();
  for (const TimedSeed& s : schedule.entries()) {
    if (s.time < 1 || s.time > horizon) throw std::domain_error("seed time outside [1, T]");
    if (s.node >= graph.node_count()) throw std::domain_error("seed node out of range");
  }
  DiffusionTrace trace;
  trace.active_sets.reserve(static_cast<std::size_t>(horizon));
  Cascade cascade(graph, model);
  auto next_seed = schedule.entries().begin();
  for (TimeStep t = 1;; ++t) {
    for (; next_seed != schedule.entries().end() && next_seed->time == t; ++next_seed) cascade.seed(next_seed->node);
    std::vector<NodeId> layer(cascade.active().begin(), cascade.active().end());
    std::sort(layer.begin(), layer.end());
    trace.active_sets.push_back(std::move(layer));
    if (t == horizon) break;
    cascade.advance(source);
  }
  return trace;
}

template <EdgeStatusSource Source>
Cascade replay_domain(const LayeredGraph& graph, const DiffusionModel& model, const PartialRealization& psi,
                      const Source& source) {
  const TimeStep now = time_of(psi);
  std::vector<std::vector<NodeId>> due(static_cast<std::size_t>(now) + 1);
  for (NodeId v = 0; v < psi.node_count(); ++v) {
    TimeStep a = psi.activation_time(v);
    if (a != 0 && a <= now) due[static_cast<std::size_t>(a)].push_back(v);
  }
  Cascade cascade(graph, model);
  for (TimeStep t = 1;; ++t) {
    for (NodeId v : due[static_cast<std::size_t>(t)]) cascade.seed(v);
    if (t == now) break;
    cascade.advance(source);
  }
  return cascade;
}

template <EdgeStatusSource Source>
PartialRealization observe_myopic_with(const LayeredGraph& graph, const DiffusionModel& model, const Source& source,
                                       PartialRealization psi, std::span<const NodeId> newly_seeded) {
  psi = with_seeds(std::move(psi), newly_seeded);
  const TimeStep now = time_of(psi);
  if (now >= graph.horizon()) return psi;
  Cascade cascade = replay_domain(graph, model, psi, source);
  cascade.advance(source, [&psi](EdgeId e, bool live) { psi.record(e, live); });
  for (NodeId v : cascade.active()) psi.mark_active(v, now + 1);
  psi.advance_clock(now + 1);
  return psi;
}

}  // namespace adaptim
