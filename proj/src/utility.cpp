#include "adaptim/utility.hpp"

#include <vector>

namespace adaptim {

UtilityValue final_spread(const DiffusionTrace& trace, const DiffusionModel& model) {
  if (trace.active_sets.empty()) return 0;
  if (!model.progressive()) return trace.active_sets.back().size();
  std::vector<NodeId> ever;
  for (const auto& layer : trace.active_sets) ever.insert(ever.end(), layer.begin(), layer.end());
  std::sort(ever.begin(), ever.end());
  return static_cast<UtilityValue>(std::unique(ever.begin(), ever.end()) - ever.begin());
}

UtilityValue final_spread(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                          const Realization& realization) {
  return final_spread(diffuse(graph, model, schedule, realization), model);
}

UtilityValue cumulative_spread(const DiffusionTrace& trace) {
  UtilityValue total = 0;
  for (const auto& layer : trace.active_sets) total += layer.size();
  return total;
}

UtilityValue cumulative_spread(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                               const Realization& realization) {
  return cumulative_spread(diffuse(graph, model, schedule, realization));
}

UtilityValue layered_spread(const LayeredGraph& graph, std::span<const TimedNode> seeds,
                            const Realization& realization) {
  const std::size_t n = graph.node_count();
  const auto horizon = static_cast<std::size_t>(graph.horizon());
  auto index = [n](const TimedNode& x) { return static_cast<std::size_t>(x.time - 1) * n + x.node; };

  std::vector<std::vector<std::size_t>> live_out(n * horizon);
  const std::vector<TimedEdge> edges = graph.timed_edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (realization.live(e)) live_out[index(edges[e].from)].push_back(index(edges[e].to));
  }

  std::vector<std::uint8_t> reached(n * horizon, 0);
  std::vector<std::size_t> stack;
  UtilityValue count = 0;
  for (const TimedNode& s : seeds) {
    if (s.time < 1 || static_cast<std::size_t>(s.time) > horizon || s.node >= n) {
      throw std::domain_error("timed seed outside the layered graph");
    }
    std::size_t i = index(s);
    if (reached[i]) continue;
    reached[i] = 1;
    ++count;
    stack.push_back(i);
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t y : live_out[x]) {
        if (reached[y]) continue;
        reached[y] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count;
}

}  // namespace adaptim
