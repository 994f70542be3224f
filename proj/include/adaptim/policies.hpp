#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaptim/diffusion.hpp"
#include "adaptim/estimation.hpp"
#include "adaptim/utility.hpp"

namespace adaptim {

struct SelectionContext {
  const LayeredGraph& graph;
  const DiffusionModel& model;
  const PartialRealization& psi;
  std::size_t remaining_budget;
};

/// A seed-selection rule. next_seeds returns nodes outside dom(psi), at most
/// remaining_budget of them (empty when no inactive node is left).
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  /// Called before every run; `run_key` seeds any per-run randomness.
  virtual void reset(std::uint64_t run_key) { (void)run_key; }
  virtual std::vector<NodeId> next_seeds(const SelectionContext& context) = 0;

  /// Same decisions for the same run key and observations.
  virtual bool deterministic() const { return true; }
  /// Decisions depend on the observation alone, not on earlier calls.
  virtual bool stateless() const { return true; }
};

struct PolicyRunResult {
  SeedSchedule seeds;
  /// Seeds chosen at each step t = 1..T.
  std::vector<std::vector<NodeId>> seeds_by_step;
  DiffusionTrace trace;
  UtilityValue utility_final = 0;
  UtilityValue utility_cumulative = 0;
};

/// Select, seed, observe one step of feedback, for t = 1..T, spending at most
/// k seeds; the cascade then runs to the horizon under `realization`.
PolicyRunResult run_adaptive_policy(Policy& policy, const LayeredGraph& graph, const DiffusionModel& model,
                                    std::size_t k, const Realization& realization, std::uint64_t run_key = 0);

/// argmax over V \ dom(psi) of the estimated gain, smallest id on ties.
std::optional<NodeId> adaptive_greedy_step(const PartialRealization& psi, GainEstimator& estimator);

class AdaptiveGreedyPolicy final : public Policy {
 public:
  explicit AdaptiveGreedyPolicy(GainEstimator& estimator) : estimator_(&estimator) {}
  std::string name() const override { return "greedy"; }
  std::vector<NodeId> next_seeds(const SelectionContext& context) override;

 private:
  GainEstimator* estimator_;
};

/// CELF queue of stale upper bounds, one entry per candidate node.
class LazyGreedyState {
 public:
  struct Entry {
    double bound;
    double std_error;
    NodeId node;
    std::uint64_t round;
  };

  /// Every node starts with an infinite bound. `strict` turns a bound
  /// violation into std::logic_error; by default it does so in debug builds.
  explicit LazyGreedyState(std::size_t node_count, bool strict = default_strict());

  std::uint64_t bound_violations() const noexcept { return violations_; }
  bool strict() const noexcept { return strict_; }

  static constexpr bool default_strict() {
#ifdef NDEBUG
    return false;
#else
    return true;
#endif
  }

 private:
  friend std::optional<NodeId> lazy_greedy_step(const PartialRealization&, LazyGreedyState&, GainEstimator&);

  std::vector<Entry> heap_;
  std::uint64_t round_ = 0;
  std::uint64_t violations_ = 0;
  bool strict_;
};

/// Same choice as adaptive_greedy_step under exact estimation, re-estimating
/// only nodes whose stale bound reaches the top of the queue. A fresh value
/// above its stale bound by more than four combined standard errors counts as
/// a bound violation: the gains were not adaptive submodular.
std::optional<NodeId> lazy_greedy_step(const PartialRealization& psi, LazyGreedyState& state,
                                       GainEstimator& estimator);

class LazyGreedyPolicy final : public Policy {
 public:
  explicit LazyGreedyPolicy(GainEstimator& estimator, bool strict = LazyGreedyState::default_strict());
  std::string name() const override { return "lazy-greedy"; }
  void reset(std::uint64_t run_key) override;
  std::vector<NodeId> next_seeds(const SelectionContext& context) override;
  bool stateless() const override { return false; }

  const LazyGreedyState& state() const noexcept { return state_; }

 private:
  GainEstimator* estimator_;
  bool strict_;
  LazyGreedyState state_;
};

/// Highest out-degree node outside dom(psi).
std::optional<NodeId> degree_step(const InfluenceGraph& graph, const PartialRealization& psi);
/// Highest score outside dom(psi).
std::optional<NodeId> centrality_step(std::span<const double> scores, const PartialRealization& psi);
/// Uniform node outside dom(psi); a function of (seed, inactive set) only.
std::optional<NodeId> random_step(const PartialRealization& psi, std::uint64_t seed);

class DegreePolicy final : public Policy {
 public:
  std::string name() const override { return "degree"; }
  std::vector<NodeId> next_seeds(const SelectionContext& context) override;
};

/// Ranks by betweenness of the base graph, computed once.
class CentralityPolicy final : public Policy {
 public:
  explicit CentralityPolicy(const InfluenceGraph& graph);
  explicit CentralityPolicy(std::vector<double> scores) : scores_(std::move(scores)) {}
  std::string name() const override { return "centrality"; }
  std::vector<NodeId> next_seeds(const SelectionContext& context) override;

 private:
  std::vector<double> scores_;
};

/// Without a seed the stream comes from std::random_device and the policy is
/// not deterministic.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::optional<std::uint64_t> seed = std::nullopt);
  std::string name() const override { return "random"; }
  void reset(std::uint64_t run_key) override;
  std::vector<NodeId> next_seeds(const SelectionContext& context) override;
  bool deterministic() const override { return seed_.has_value(); }
  bool stateless() const override { return false; }

 private:
  std::optional<std::uint64_t> seed_;
  std::uint64_t run_seed_ = 0;
};

/// Greedy over expected cumulative spread with no feedback: the i-th chosen
/// node is scheduled at time i (at most T of them), each choice maximizing
/// the gain given the earlier ones.
SeedSchedule nonadaptive_greedy_schedule(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                         GainEstimator& estimator);

/// Plays a fixed schedule. A scheduled node that is already active when its
/// turn comes is still returned; seeding it changes nothing.
class ScheduledPolicy : public Policy {
 public:
  explicit ScheduledPolicy(SeedSchedule schedule, std::string name = "schedule");
  std::string name() const override { return name_; }
  std::vector<NodeId> next_seeds(const SelectionContext& context) override;

 protected:
  void set_schedule(SeedSchedule schedule) { schedule_ = std::move(schedule); }

 private:
  SeedSchedule schedule_;
  std::string name_;
};

/// Non-adaptive baseline: computes the greedy schedule on the first reset and
/// plays it in every run.
class NonAdaptiveGreedyPolicy final : public ScheduledPolicy {
 public:
  NonAdaptiveGreedyPolicy(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                          GainEstimator& estimator);
  void reset(std::uint64_t run_key) override;

  const SeedSchedule& schedule() const noexcept { return computed_; }

 private:
  const LayeredGraph* graph_;
  DiffusionModel model_;
  std::size_t k_;
  GainEstimator* estimator_;
  bool ready_ = false;
  SeedSchedule computed_;
};

/// Greedy batch of k_t nodes outside `active`, all seeded at layer t, each
/// maximizing the expected spread over layers t..T given `active` at t and
/// the nodes chosen before it. Returns every inactive node when k_t exceeds
/// their number.
std::vector<NodeId> per_step_batch_greedy(const LayeredGraph& graph, const DiffusionModel& model,
                                          std::span<const NodeId> active, TimeStep t, std::size_t k_t,
                                          GainEstimator& estimator);

/// Observation with `active` active from time t and nothing else known.
PartialRealization active_set_observation(const LayeredGraph& graph, std::span<const NodeId> active, TimeStep t);

}  // namespace adaptim
