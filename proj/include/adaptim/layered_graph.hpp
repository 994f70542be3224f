#pragma once

#include <vector>

#include "adaptim/graph.hpp"

namespace adaptim {

/// How a node's own copy on layer t links to its copy on layer t+1.
struct Persistence {
  enum class Kind { always_live, random, none };
  Kind kind = Kind::always_live;
  /// Probability that a node active at t is still active at t+1 (Kind::random).
  double probability = 1.0;

  static Persistence always_live() { return {Kind::always_live, 1.0}; }
  static Persistence random(double q) { return {Kind::random, q}; }
  static Persistence none() { return {Kind::none, 0.0}; }

  bool materialized() const noexcept { return kind != Kind::none; }
};

struct TimedNode {
  NodeId node = 0;
  TimeStep time = 1;

  friend bool operator==(const TimedNode&, const TimedNode&) = default;
};

struct TimedEdge {
  TimedNode from;
  TimedNode to;
  double probability = 0.0;
  bool persistence = false;
};

/// Time-expanded graph: layer t holds a copy of every node, and every timed
/// edge joins layer t to layer t+1.
///
/// Each of the T-1 layer boundaries carries E influence edges (one per base
/// edge, same probability) followed, unless persistence is none, by |V|
/// persistence edges (v_t, v_{t+1}). Timed edge ids are laid out boundary by
/// boundary in that order.
class LayeredGraph {
 public:
  /// Throws std::domain_error when horizon < 1 or a random persistence
  /// probability lies outside [0, 1].
  LayeredGraph(InfluenceGraph base, int horizon, Persistence persistence = Persistence::always_live());

  const InfluenceGraph& base() const noexcept { return base_; }
  int horizon() const noexcept { return horizon_; }
  Persistence persistence() const noexcept { return persistence_; }
  std::size_t node_count() const noexcept { return base_.node_count(); }

  std::size_t edges_per_boundary() const noexcept { return slot_probability_.size(); }
  std::size_t timed_edge_count() const noexcept {
    return static_cast<std::size_t>(horizon_ - 1) * edges_per_boundary();
  }

  /// Id of (source_t, target_{t+1}) for base edge `base_edge`, 1 <= t < T.
  EdgeId influence_edge(std::size_t base_edge, TimeStep t) const noexcept {
    return static_cast<std::size_t>(t - 1) * edges_per_boundary() + base_edge;
  }
  /// Id of (v_t, v_{t+1}); only valid when persistence is materialized.
  EdgeId persistence_edge(NodeId v, TimeStep t) const noexcept {
    return static_cast<std::size_t>(t - 1) * edges_per_boundary() + base_.edge_count() + v;
  }

  double probability(EdgeId e) const noexcept { return slot_probability_[e % edges_per_boundary()]; }
  /// Layer the edge departs from.
  TimeStep departure(EdgeId e) const noexcept { return static_cast<TimeStep>(e / edges_per_boundary()) + 1; }
  TimedEdge timed_edge(EdgeId e) const;

  /// Every timed edge, in id order.
  std::vector<TimedEdge> timed_edges() const;

  /// Timed edges whose status is genuinely random (0 < p < 1).
  std::size_t random_edge_count() const;

 private:
  InfluenceGraph base_;
  int horizon_;
  Persistence persistence_;
  std::vector<double> slot_probability_;
};

LayeredGraph build_layered_graph(InfluenceGraph graph, int horizon, Persistence persistence);

}  // namespace adaptim
