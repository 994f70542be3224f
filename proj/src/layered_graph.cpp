#include "adaptim/layered_graph.hpp"

#include <stdexcept>

namespace adaptim {

LayeredGraph::LayeredGraph(InfluenceGraph base, int horizon, Persistence persistence)
    : base_(std::move(base)), horizon_(horizon), persistence_(persistence) {
  if (horizon_ < 1) throw std::domain_error("horizon must be at least 1");
  if (persistence_.kind == Persistence::Kind::random &&
      !(persistence_.probability >= 0.0 && persistence_.probability <= 1.0)) {
    throw std::domain_error("persistence probability must lie in [0, 1]");
  }
  if (persistence_.kind == Persistence::Kind::always_live) persistence_.probability = 1.0;

  slot_probability_.reserve(base_.edge_count() + (persistence_.materialized() ? base_.node_count() : 0));
  for (const Edge& e : base_.edges()) slot_probability_.push_back(e.probability);
  if (persistence_.materialized()) slot_probability_.insert(slot_probability_.end(), base_.node_count(), persistence_.probability);
}

TimedEdge LayeredGraph::timed_edge(EdgeId e) const {
  TimeStep t = departure(e);
  std::size_t slot = e % edges_per_boundary();
  if (slot < base_.edge_count()) {
    const Edge& base_edge = base_.edge(slot);
    return {{base_edge.source, t}, {base_edge.target, t + 1}, base_edge.probability, false};
  }
  auto v = static_cast<NodeId>(slot - base_.edge_count());
  return {{v, t}, {v, t + 1}, persistence_.probability, true};
}

std::vector<TimedEdge> LayeredGraph::timed_edges() const {
  std::vector<TimedEdge> out;
  out.reserve(timed_edge_count());
  for (EdgeId e = 0; e < timed_edge_count(); ++e) out.push_back(timed_edge(e));
  return out;
}

std::size_t LayeredGraph::random_edge_count() const {
  std::size_t per_boundary = 0;
  for (double p : slot_probability_) per_boundary += (p > 0.0 && p < 1.0) ? 1 : 0;
  return per_boundary * static_cast<std::size_t>(horizon_ - 1);
}

LayeredGraph build_layered_graph(InfluenceGraph graph, int horizon, Persistence persistence) {
  return LayeredGraph(std::move(graph), horizon, persistence);
}

}  // namespace adaptim
