#include "adaptim/diffusion.hpp"

#include <sstream>
#include <unordered_set>

#include "adaptim/rng.hpp"

namespace adaptim {

std::string to_string(const DiffusionModel& model) {
  switch (model.kind) {
    case DiffusionModel::Kind::modified_ic:
      return "modified-ic";
    case DiffusionModel::Kind::standard_ic:
      return "standard-ic";
    case DiffusionModel::Kind::non_progressive_ic:
      return "non-progressive-ic";
  }
  return "unknown";
}

DiffusionModel parse_diffusion_model(std::string_view name, double deactivation) {
  if (name == "modified-ic") return DiffusionModel::modified_ic();
  if (name == "standard-ic") return DiffusionModel::standard_ic();
  if (name == "non-progressive-ic") {
    if (!(deactivation >= 0.0 && deactivation <= 1.0)) throw ConfigError("deactivation probability must lie in [0, 1]");
    return DiffusionModel::non_progressive_ic(deactivation);
  }
  throw ConfigError("unknown diffusion model '" + std::string(name) + "'");
}

LayeredGraph build_layered_graph(InfluenceGraph graph, int horizon, const DiffusionModel& model) {
  return LayeredGraph(std::move(graph), horizon, model.persistence());
}

double Realization::prior_probability(const LayeredGraph& graph) const {
  double p = 1.0;
  for (EdgeId e = 0; e < live_.size(); ++e) {
    double q = graph.probability(e);
    p *= live_[e] ? q : 1.0 - q;
  }
  return p;
}

std::uint64_t Realization::digest() const noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::uint8_t b : live_) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Realization sample_realization(const LayeredGraph& graph, std::uint64_t stream) {
  std::vector<std::uint8_t> live(graph.timed_edge_count());
  for (EdgeId e = 0; e < live.size(); ++e) live[e] = rng::bernoulli(stream, e, graph.probability(e)) ? 1 : 0;
  return Realization(std::move(live));
}

SeedSchedule::SeedSchedule(std::vector<TimedSeed> entries) {
  for (const TimedSeed& s : entries) add(s.node, s.time);
}

void SeedSchedule::add(NodeId node, TimeStep time) {
  if (!entries_.empty() && time < entries_.back().time) throw std::invalid_argument("seed times must be non-decreasing");
  if (contains(node)) throw std::invalid_argument("node seeded twice");
  entries_.push_back({node, time});
}

bool SeedSchedule::contains(NodeId node) const {
  for (const TimedSeed& s : entries_) {
    if (s.node == node) return true;
  }
  return false;
}

DiffusionTrace diffuse(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                       const Realization& realization) {
  return diffuse_with(graph, model, schedule, realization);
}

void PartialRealization::record(EdgeId e, bool live) {
  auto s = static_cast<std::int8_t>(live ? EdgeStatus::live : EdgeStatus::dead);
  if (status_[e] == s) return;
  if (status_[e] >= 0) throw std::logic_error("conflicting status for an observed timed edge");
  status_[e] = s;
  ++observed_count_;
  advance_clock(static_cast<TimeStep>(e / edges_per_boundary_) + 2);
}

std::vector<NodeId> PartialRealization::domain() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < activation_.size(); ++v) {
    if (activation_[v] != 0) out.push_back(v);
  }
  return out;
}

void PartialRealization::mark_active(NodeId v, TimeStep t) {
  if (activation_[v] == 0 || t < activation_[v]) activation_[v] = t;
  advance_clock(t);
}

std::string PartialRealization::encode() const {
  std::ostringstream out;
  out << "t=" << clock_ << ";dom=";
  bool first = true;
  for (NodeId v = 0; v < activation_.size(); ++v) {
    if (activation_[v] == 0) continue;
    out << (first ? "" : ",") << v << '@' << activation_[v];
    first = false;
  }
  out << ";obs=";
  first = true;
  for (EdgeId e = 0; e < status_.size(); ++e) {
    if (status_[e] < 0) continue;
    out << (first ? "" : ",") << e << ':' << (status_[e] ? 'L' : 'D');
    first = false;
  }
  return out.str();
}

PartialRealization with_seeds(PartialRealization psi, std::span<const NodeId> seeds) {
  const TimeStep now = time_of(psi);
  for (NodeId v : seeds) {
    if (v >= psi.node_count()) throw std::domain_error("seed node out of range");
    if (psi.in_domain(v)) throw std::domain_error("seed is already in the observed domain");
    psi.mark_active(v, now);
  }
  return psi;
}

PartialRealization observe_myopic(const LayeredGraph& graph, const DiffusionModel& model,
                                  const Realization& realization, const PartialRealization& psi,
                                  std::span<const NodeId> newly_seeded) {
  if (!is_consistent(realization, psi)) throw std::logic_error("partial realization disagrees with the realization");
  return observe_myopic_with(graph, model, realization, psi, newly_seeded);
}

bool is_consistent(const Realization& realization, const PartialRealization& psi) {
  if (psi.observed_count() == 0) return true;
  for (EdgeId e = 0; e < psi.timed_edge_count(); ++e) {
    EdgeStatus s = psi.status(e);
    if (s != EdgeStatus::unknown && (s == EdgeStatus::live) != realization.live(e)) return false;
  }
  return true;
}

bool is_subrealization(const PartialRealization& psi, const PartialRealization& psi_prime) {
  if (psi.timed_edge_count() != psi_prime.timed_edge_count() || psi.node_count() != psi_prime.node_count()) return false;
  if (time_of(psi) > time_of(psi_prime)) return false;
  for (NodeId v = 0; v < psi.node_count(); ++v) {
    if (psi.in_domain(v) && psi.activation_time(v) != psi_prime.activation_time(v)) return false;
  }
  if (psi.observed_count() > psi_prime.observed_count()) return false;
  for (EdgeId e = 0; e < psi.timed_edge_count(); ++e) {
    if (psi.observed(e) && psi.status(e) != psi_prime.status(e)) return false;
  }
  return true;
}

double conditional_probability(const LayeredGraph& graph, const Realization& realization,
                               const PartialRealization& psi) {
  if (!is_consistent(realization, psi)) return 0.0;
  double p = 1.0;
  for (EdgeId e = 0; e < realization.size(); ++e) {
    if (psi.observed(e)) continue;
    double q = graph.probability(e);
    p *= realization.live(e) ? q : 1.0 - q;
  }
  return p;
}

}  // namespace adaptim
