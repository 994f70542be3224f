#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptim/types.hpp"

namespace adaptim {

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  double probability = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Out-adjacency entry: the target and the index of the edge in edges().
struct OutEdge {
  NodeId target = 0;
  std::size_t edge = 0;
};

/// Directed influence graph with per-edge activation probabilities.
///
/// Immutable after construction. Undirected graphs are stored as mirrored
/// directed pairs at consecutive indices (2i, 2i+1); the flag only changes how
/// the graph is reported and serialized.
class InfluenceGraph {
 public:
  InfluenceGraph() = default;

  /// Throws std::invalid_argument on out-of-range endpoints, self-loops,
  /// duplicate (source, target) pairs, probabilities outside [0, 1], or an
  /// undirected edge list that is not made of consecutive mirrored pairs.
  InfluenceGraph(std::size_t node_count, std::vector<Edge> edges, bool directed = true,
                 std::vector<std::int64_t> original_ids = {});

  std::size_t node_count() const noexcept { return node_count_; }
  /// Number of stored directed edges.
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool directed() const noexcept { return directed_; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t index) const { return edges_[index]; }
  std::span<const OutEdge> out_edges(NodeId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  /// Identifier the node had in the input file (its index when built directly).
  std::int64_t original_id(NodeId v) const { return original_ids_[v]; }
  std::span<const std::int64_t> original_ids() const noexcept { return original_ids_; }

  friend bool operator==(const InfluenceGraph& a, const InfluenceGraph& b) {
    return a.node_count_ == b.node_count_ && a.directed_ == b.directed_ && a.edges_ == b.edges_ &&
           a.original_ids_ == b.original_ids_;
  }

 private:
  std::size_t node_count_ = 0;
  bool directed_ = true;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> original_ids_;
  std::vector<std::size_t> offsets_{0};
  std::vector<OutEdge> adjacency_;
};

struct LoadOptions {
  /// false: each line is an undirected pair, expanded to both directions.
  bool directed = true;
};

/// Parses a SNAP-style edge list: one whitespace-separated "u v" integer pair
/// per line, '#' lines are comments. An optional third column is read as the
/// edge probability, otherwise probabilities start at 0. Nodes are re-indexed
/// densely in first-appearance order. Self-loops and repeated pairs are
/// dropped. Throws ParseError with the offending line, or on empty input.
InfluenceGraph load_snap_edge_list(std::string_view text, LoadOptions options = {});
InfluenceGraph load_snap_edge_list(std::istream& in, LoadOptions options = {});
/// Throws IoError when the file cannot be opened.
InfluenceGraph load_snap_edge_list_file(const std::string& path, LoadOptions options = {});

/// Writes the graph back as "u v" lines using original ids. Undirected pairs
/// are written once, in stored order.
std::string serialize_snap_edge_list(const InfluenceGraph& graph, bool with_probabilities = false);

/// Same graph with every edge probability set to p. Throws std::domain_error
/// unless 0 <= p <= 1.
InfluenceGraph assign_uniform_probability(const InfluenceGraph& graph, double p);

/// Brandes betweenness on the unweighted digraph: for every ordered pair
/// (s, t), s != t, the fraction of shortest s-t paths passing through each
/// interior node. Endpoints are not counted. Throws std::invalid_argument
/// for an empty graph.
std::vector<double> betweenness_centrality(const InfluenceGraph& graph);

struct GraphStats {
  std::size_t node_count = 0;
  /// Edges as listed in the input: undirected pairs count once.
  std::size_t edge_count = 0;
  std::size_t directed_edge_count = 0;
  /// Mean out-degree over the stored directed edges.
  double mean_degree = 0.0;
  std::size_t max_degree = 0;
};

GraphStats graph_stats(const InfluenceGraph& graph);

/// G(n, q) random graph used by tests and desk-scale experiments. Each
/// ordered pair (directed) or unordered pair (undirected) is an edge with
/// probability `edge_probability`; influence probabilities are set to
/// `influence`.
InfluenceGraph erdos_renyi(std::size_t node_count, double edge_probability, std::uint64_t seed,
                           bool directed = true, double influence = 0.0);

}  // namespace adaptim
