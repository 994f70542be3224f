#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "adaptim/diffusion.hpp"
#include "adaptim/rng.hpp"

namespace adaptim {

class Policy;

struct MarginalGainEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  /// Simulations drawn, or realizations enumerated when exact.
  std::uint64_t sample_count = 0;
  bool exact = false;
};

inline constexpr std::size_t kDefaultEnumerationCap = 24;

// Edge-status sources used by the estimators. All answer from psi first.

/// Observed statuses only; flags any query that would need an unobserved random edge.
struct ObservedStatuses {
  const LayeredGraph* graph;
  const PartialRealization* psi;
  mutable bool needed_unobserved = false;

  bool live(EdgeId e) const {
    EdgeStatus s = psi->status(e);
    if (s != EdgeStatus::unknown) return s == EdgeStatus::live;
    double p = graph->probability(e);
    if (p >= 1.0) return true;
    if (p > 0.0) needed_unobserved = true;
    return false;
  }
};

/// Draws from p(phi | psi): observed edges clamped, the rest sampled lazily
/// from counter stream `stream`.
struct ConditionalSampler {
  const LayeredGraph* graph;
  const PartialRealization* psi;
  std::uint64_t stream;

  bool live(EdgeId e) const {
    EdgeStatus s = psi->status(e);
    if (s != EdgeStatus::unknown) return s == EdgeStatus::live;
    return rng::bernoulli(stream, e, graph->probability(e));
  }
};

/// delta_phi(v | psi) for an arbitrary status source (no precondition checks).
template <EdgeStatusSource Source>
std::int64_t realized_marginal_gain_with(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                         const PartialRealization& psi, const Source& source);

/// Cumulative spread accumulated from the cascade's current layer to the horizon.
template <EdgeStatusSource Source>
std::int64_t remaining_cumulative(Cascade cascade, const Source& source) {
  auto total = static_cast<std::int64_t>(cascade.active_count());
  while (!cascade.at_horizon()) {
    cascade.advance(source);
    total += static_cast<std::int64_t>(cascade.active_count());
  }
  return total;
}

/// delta_phi(v | psi): cumulative spread of dom(psi) plus v seeded at
/// time_of(psi), minus that of dom(psi) alone, under the same realization.
/// Throws std::domain_error if v is in dom(psi) or phi is inconsistent with psi.
std::int64_t realized_marginal_gain(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                    const PartialRealization& psi, const Realization& realization);

/// The unobserved random timed edges an exact gain under psi must enumerate.
///
/// When replaying dom(psi) up to time_of(psi) needs no unobserved random
/// edge, only edges departing layers >= time_of(psi) can change a gain;
/// otherwise every edge departing a layer >= the earliest activation in
/// dom(psi). Statuses of the other unobserved edges are never read, so
/// summing them out leaves the expectation unchanged.
std::vector<EdgeId> enumeration_edges(const LayeredGraph& graph, const DiffusionModel& model,
                                      const PartialRealization& psi);

/// Delta(v | psi) by enumerating all 2^m statuses of the enumeration edges,
/// weighted by their Bernoulli probabilities. Throws CapacityError when
/// m > cap, std::domain_error if v is in dom(psi). Observed statuses are
/// clamped, so psi may even contradict a deterministic edge.
MarginalGainEstimate exact_marginal_gain(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                         const PartialRealization& psi,
                                         std::size_t cap = kDefaultEnumerationCap);

/// Sample mean of delta_phi(v | psi) over n_sims draws from p(phi | psi),
/// simulation s using counter stream derive(stream, s).
MarginalGainEstimate mc_marginal_gain(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                      const PartialRealization& psi, std::size_t n_sims, std::uint64_t stream);

/// A full realization drawn from p(phi | psi).
Realization sample_conditional(const LayeredGraph& graph, const PartialRealization& psi, std::uint64_t stream);

enum class EstimatorMode { exact, monte_carlo, automatic };

struct EstimatorConfig {
  EstimatorMode mode = EstimatorMode::automatic;
  std::size_t simulations = 1000;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  /// Root stream; candidate v at time t uses derive(stream, {t, v}).
  std::uint64_t stream = 0;
  /// Cache exact gains by (psi, v). Only useful on small instances.
  bool memoize = false;
};

/// Gain oracle shared by the greedy policies. Counts its evaluations.
///
/// automatic picks exact enumeration when 2^m <= simulations and m is within
/// the cap, Monte Carlo otherwise.
class GainEstimator {
 public:
  GainEstimator(const LayeredGraph& graph, const DiffusionModel& model, EstimatorConfig config = {});

  MarginalGainEstimate estimate(NodeId v, const PartialRealization& psi);

  const LayeredGraph& graph() const noexcept { return *graph_; }
  const DiffusionModel& model() const noexcept { return model_; }
  const EstimatorConfig& config() const noexcept { return config_; }
  void set_stream(std::uint64_t stream) noexcept { config_.stream = stream; }

  std::uint64_t evaluations() const noexcept { return evaluations_; }
  void reset_evaluations() noexcept { evaluations_ = 0; }

 private:
  const LayeredGraph* graph_;
  DiffusionModel model_;
  EstimatorConfig config_;
  std::uint64_t evaluations_ = 0;
  std::unordered_map<std::string, MarginalGainEstimate> memo_;
};

/// Expected cumulative spread of a deterministic policy with budget k:
/// sum over every realization phi of p(phi) * f~(E(pi, phi), phi), the policy
/// receiving myopic feedback from phi. Throws CapacityError when the layered
/// graph has more than `cap` random edges, std::domain_error for a
/// policy that is not deterministic.
double exact_policy_value(Policy& policy, const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                          std::size_t cap = kDefaultEnumerationCap);

// ---------------------------------------------------------------------------

template <EdgeStatusSource Source>
std::int64_t realized_marginal_gain_with(const LayeredGraph& graph, const DiffusionModel& model, NodeId v,
                                         const PartialRealization& psi, const Source& source) {
  Cascade without = replay_domain(graph, model, psi, source);
  Cascade with = without;
  if (!with.seed(v)) return 0;
  return remaining_cumulative(std::move(with), source) - remaining_cumulative(std::move(without), source);
}

}  // namespace adaptim
