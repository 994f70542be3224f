#include "adaptim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace adaptim {

namespace {

std::uint64_t pair_key(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::int64_t parse_id(std::string_view token, std::size_t line_no) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "expected an integer node id, got '" + std::string(token) + "'");
  }
  return value;
}

double parse_probability(std::string_view token, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "expected a probability, got '" + std::string(token) + "'");
  }
  if (!(value >= 0.0 && value <= 1.0)) throw ParseError(line_no, "probability outside [0, 1]");
  return value;
}

}  // namespace

InfluenceGraph::InfluenceGraph(std::size_t node_count, std::vector<Edge> edges, bool directed,
                               std::vector<std::int64_t> original_ids)
    : node_count_(node_count), directed_(directed), edges_(std::move(edges)), original_ids_(std::move(original_ids)) {
  if (original_ids_.empty()) {
    original_ids_.resize(node_count_);
    for (std::size_t i = 0; i < node_count_; ++i) original_ids_[i] = static_cast<std::int64_t>(i);
  } else if (original_ids_.size() != node_count_) {
    throw std::invalid_argument("original id map does not match node count");
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (const Edge& e : edges_) {
    if (e.source >= node_count_ || e.target >= node_count_) throw std::invalid_argument("edge endpoint out of range");
    if (e.source == e.target) throw std::invalid_argument("self-loops are not allowed");
    if (!(e.probability >= 0.0 && e.probability <= 1.0)) throw std::invalid_argument("edge probability outside [0, 1]");
    if (!seen.insert(pair_key(e.source, e.target)).second) throw std::invalid_argument("duplicate edge");
  }
  if (!directed_) {
    if (edges_.size() % 2 != 0) throw std::invalid_argument("undirected edge list must hold mirrored pairs");
    for (std::size_t i = 0; i < edges_.size(); i += 2) {
      const Edge& a = edges_[i];
      const Edge& b = edges_[i + 1];
      if (a.source != b.target || a.target != b.source || a.probability != b.probability) {
        throw std::invalid_argument("undirected edge list must hold mirrored pairs");
      }
    }
  }

  offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) ++offsets_[e.source + 1];
  for (std::size_t v = 0; v < node_count_; ++v) offsets_[v + 1] += offsets_[v];
  adjacency_.resize(edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    adjacency_[cursor[edges_[i].source]++] = OutEdge{edges_[i].target, i};
  }
}

InfluenceGraph load_snap_edge_list(std::string_view text, LoadOptions options) {
  std::unordered_map<std::int64_t, NodeId> index;
  std::vector<std::int64_t> original;
  std::vector<Edge> edges;
  std::unordered_set<std::uint64_t> seen;

  auto intern = [&](std::int64_t id) {
    auto [it, inserted] = index.try_emplace(id, static_cast<NodeId>(original.size()));
    if (inserted) original.push_back(id);
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool any_pair = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw ParseError(line_no, "expected 'u v' or 'u v p'");
    }
    std::int64_t a = parse_id(tokens[0], line_no);
    std::int64_t b = parse_id(tokens[1], line_no);
    double p = tokens.size() == 3 ? parse_probability(tokens[2], line_no) : 0.0;
    any_pair = true;

    NodeId u = intern(a);
    NodeId v = intern(b);
    if (u != v) {
      if (options.directed) {
        if (seen.insert(pair_key(u, v)).second) edges.push_back({u, v, p});
      } else if (!seen.count(pair_key(u, v))) {
        seen.insert(pair_key(u, v));
        seen.insert(pair_key(v, u));
        edges.push_back({u, v, p});
        edges.push_back({v, u, p});
      }
    }
  }
  if (!any_pair) throw ParseError(line_no, "edge list is empty");
  std::size_t n = original.size();
  return InfluenceGraph(n, std::move(edges), options.directed, std::move(original));
}

InfluenceGraph load_snap_edge_list(std::istream& in, LoadOptions options) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_snap_edge_list(std::string_view(buffer.str()), options);
}

InfluenceGraph load_snap_edge_list_file(const std::string& path, LoadOptions options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  return load_snap_edge_list(in, options);
}

std::string serialize_snap_edge_list(const InfluenceGraph& graph, bool with_probabilities) {
  std::ostringstream out;
  out.precision(17);
  std::size_t stride = graph.directed() ? 1 : 2;
  for (std::size_t i = 0; i < graph.edge_count(); i += stride) {
    const Edge& e = graph.edge(i);
    out << graph.original_id(e.source) << ' ' << graph.original_id(e.target);
    if (with_probabilities) out << ' ' << e.probability;
    out << '\n';
  }
  return out.str();
}

InfluenceGraph assign_uniform_probability(const InfluenceGraph& graph, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("influence probability must lie in [0, 1]");
  std::vector<Edge> edges(graph.edges().begin(), graph.edges().end());
  for (Edge& e : edges) e.probability = p;
  return InfluenceGraph(graph.node_count(), std::move(edges), graph.directed(),
                        std::vector<std::int64_t>(graph.original_ids().begin(), graph.original_ids().end()));
}

std::vector<double> betweenness_centrality(const InfluenceGraph& graph) {
  const std::size_t n = graph.node_count();
  if (n == 0) throw std::invalid_argument("betweenness of an empty graph");
  std::vector<double> score(n, 0.0);

  std::vector<NodeId> order;
  std::vector<std::vector<NodeId>> predecessors(n);
  std::vector<double> paths(n);
  std::vector<long> dist(n);
  std::vector<double> dependency(n);
  order.reserve(n);

  for (NodeId s = 0; s < n; ++s) {
    order.clear();
    for (auto& p : predecessors) p.clear();
    std::fill(paths.begin(), paths.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(dependency.begin(), dependency.end(), 0.0);

    paths[s] = 1.0;
    dist[s] = 0;
    std::queue<NodeId> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      NodeId v = frontier.front();
      frontier.pop();
      order.push_back(v);
      for (const OutEdge& oe : graph.out_edges(v)) {
        NodeId w = oe.target;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          frontier.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          paths[w] += paths[v];
          predecessors[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      for (NodeId v : predecessors[w]) dependency[v] += paths[v] / paths[w] * (1.0 + dependency[w]);
      if (w != s) score[w] += dependency[w];
    }
  }
  return score;
}

GraphStats graph_stats(const InfluenceGraph& graph) {
  GraphStats stats;
  stats.node_count = graph.node_count();
  stats.directed_edge_count = graph.edge_count();
  stats.edge_count = graph.directed() ? graph.edge_count() : graph.edge_count() / 2;
  if (stats.node_count > 0) {
    stats.mean_degree = static_cast<double>(stats.directed_edge_count) / static_cast<double>(stats.node_count);
  }
  for (NodeId v = 0; v < graph.node_count(); ++v) stats.max_degree = std::max(stats.max_degree, graph.out_degree(v));
  return stats;
}

InfluenceGraph erdos_renyi(std::size_t node_count, double edge_probability, std::uint64_t seed, bool directed,
                           double influence) {
  std::mt19937_64 engine(seed);
  std::bernoulli_distribution coin(edge_probability);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < node_count; ++u) {
    for (NodeId v = directed ? 0 : u + 1; v < node_count; ++v) {
      if (u == v || !coin(engine)) continue;
      edges.push_back({u, v, influence});
      if (!directed) edges.push_back({v, u, influence});
    }
  }
  return InfluenceGraph(node_count, std::move(edges), directed);
}

}  // namespace adaptim
