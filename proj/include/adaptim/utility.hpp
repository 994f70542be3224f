#pragma once

#include <cstdint>
#include <span>

#include "adaptim/diffusion.hpp"

namespace adaptim {

/// Node count (final spread) or node-steps (cumulative spread).
using UtilityValue = std::uint64_t;

/// f: nodes ever activated; for non-progressive models, nodes active at T.
UtilityValue final_spread(const DiffusionTrace& trace, const DiffusionModel& model);
UtilityValue final_spread(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                          const Realization& realization);

/// Cumulative spread: sum over t = 1..T of |sigma_t|.
UtilityValue cumulative_spread(const DiffusionTrace& trace);
UtilityValue cumulative_spread(const LayeredGraph& graph, const DiffusionModel& model, const SeedSchedule& schedule,
                               const Realization& realization);

/// Number of timed nodes reachable from the timed seeds through live timed
/// edges, seeds included. Plain reachability on the time-expanded graph.
UtilityValue layered_spread(const LayeredGraph& graph, std::span<const TimedNode> seeds,
                            const Realization& realization);

}  // namespace adaptim
