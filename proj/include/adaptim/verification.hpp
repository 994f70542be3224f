#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adaptim/diffusion.hpp"
#include "adaptim/estimation.hpp"
#include "adaptim/policies.hpp"

namespace adaptim {

inline constexpr std::size_t kDefaultOptimalCap = 14;

struct ObservationOutcome {
  PartialRealization psi;
  double probability = 0.0;
};

/// Every positive-probability result of one step of myopic feedback from
/// psi with no new seeds, with its probability under p(phi | psi). At the
/// horizon the single outcome is psi itself.
std::vector<ObservationOutcome> observation_outcomes(const LayeredGraph& graph, const DiffusionModel& model,
                                                     const PartialRealization& psi);

/// Partial realizations a seeding process can produce with at most k seeds:
/// from the empty observation, either seed another node outside the domain
/// at the current time or observe one step. Sorted by encoding.
std::vector<PartialRealization> reachable_partial_realizations(const LayeredGraph& graph, const DiffusionModel& model,
                                                               std::size_t k);

struct SubmodularityViolation {
  PartialRealization psi;
  PartialRealization psi_prime;
  NodeId node = 0;
  double gain = 0.0;
  double gain_prime = 0.0;
};

/// Pairs psi contained in psi_prime, nodes outside dom(psi_prime), with
/// gain(psi) < gain(psi_prime).
struct SubmodularityReport {
  std::uint64_t instances_checked = 0;
  std::vector<SubmodularityViolation> violations;
  bool holds() const noexcept { return violations.empty(); }
};

struct MonotonicityViolation {
  PartialRealization psi;
  NodeId node = 0;
  double gain = 0.0;
};

struct MonotonicityReport {
  std::uint64_t instances_checked = 0;
  std::vector<MonotonicityViolation> violations;
  bool holds() const noexcept { return violations.empty(); }
};

/// Exact comparison over all reachable pairs. Throws CapacityError when an
/// exact gain exceeds `cap` enumeration edges.
SubmodularityReport check_adaptive_submodularity(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                                 double tolerance = 1e-12, std::size_t cap = kDefaultEnumerationCap);
MonotonicityReport check_adaptive_monotonicity(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                               double tolerance = 1e-12, std::size_t cap = kDefaultEnumerationCap);

/// One line per violation: psi, psi_prime, node, both gains, tab separated.
void write_report(std::ostream& out, const SubmodularityReport& report);
void write_report(std::ostream& out, const MonotonicityReport& report);

/// Gains of one node under a smaller and a larger observation, with the
/// values they are expected to take.
struct GainPair {
  double gain = 0.0;
  double gain_prime = 0.0;
  double expected_gain = 0.0;
  double expected_gain_prime = 0.0;
  std::uint64_t realizations = 0;

  bool matches(double tolerance = 1e-12) const;
  /// gain(psi) < gain(psi_prime): diminishing returns fails.
  bool violation(double tolerance = 1e-12) const { return gain < gain_prime - tolerance; }
};

/// Two nodes u -> v with probability p, u seeded at t = 1, T = 3. psi holds
/// u alone; psi_prime also observes the first attempt on (u, v) failing.
/// Expected: 3 - 2p and 2 (standard IC), p^2 + 3p(1-p) + 3(1-p)^2 and 2 - p
/// (modified IC).
struct TwoNodeReport {
  double p = 0.0;
  GainPair standard_ic;
  GainPair modified_ic;
};
TwoNodeReport two_node_counterexample(double p);

/// Edge u -> v with probability 1/2, persistence probability 1/2, T = 3: six
/// random timed edges. psi holds u at t = 1; psi_prime also observes both
/// edges leaving u_1 dead. Expected 86/64 and 3/2.
GainPair deactivation_cumulative_counterexample();

/// Edges v -> w and v -> z with probability 1, T = 2, standard IC with
/// deactivation 1/2, utility = nodes active when the process ends. An active
/// node survives each step with probability 1/2; nodes first activated at
/// the final step finish their cascade without deactivation. psi is empty at
/// t = 1, psi_prime has u seeded at t = 1 and the clock at 2. Expected 2.5
/// and 3.
GainPair deactivation_terminal_counterexample();

/// Expected number of nodes active when a standard-IC cascade with per-step
/// deactivation probability q ends, under the rules of deactivation_terminal_counterexample.
/// Exact enumeration over edge and survival coins (at most 24 random ones).
double terminal_active_value(const InfluenceGraph& graph, int horizon, double q, const SeedSchedule& seeds);

struct OptimalPolicyValue {
  double value = 0.0;
  /// Distinct decision states solved.
  std::uint64_t decision_tree_size = 0;
};

/// Best expected cumulative spread over policies seeding at most one node per
/// step and at most k in total, by backward induction over the cascade state
/// with exact one-step observation distributions. Throws CapacityError above
/// `cap` random timed edges.
OptimalPolicyValue optimal_adaptive_policy_value(const LayeredGraph& graph, const DiffusionModel& model,
                                                 std::size_t k, std::size_t cap = kDefaultOptimalCap);

/// Expected cumulative spread of a stateless deterministic policy, by
/// recursion over one-step observation outcomes. Independent of
/// exact_policy_value, which enumerates full realizations.
double policy_value_by_tree(Policy& policy, const LayeredGraph& graph, const DiffusionModel& model, std::size_t k);

struct RatioCheck {
  double greedy_value = 0.0;
  double optimal_value = 0.0;
  double ratio = 1.0;
  bool meets_bound() const;
};

/// Exact adaptive greedy value over the optimal value. The ratio is 1 when
/// the optimum is 0.
RatioCheck approximation_ratio_check(const LayeredGraph& graph, const DiffusionModel& model, std::size_t k,
                                     std::size_t cap = kDefaultOptimalCap);

/// 1 - 1/e.
double greedy_bound();

}  // namespace adaptim
