#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adaptim/policies.hpp"
#include "oracles.hpp"

using namespace adaptim;

namespace {

constexpr NodeId kV = 0, kU = 1, kW = 2;

LayeredGraph toy_graph() {
  return build_layered_graph(InfluenceGraph(3, {{kV, kU, 0.9}, {kV, kW, 0.1}}), 3, DiffusionModel::modified_ic());
}

// (v, w) live and (v, u) dead at every step.
Realization toy_world(const LayeredGraph& g) {
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  for (TimeStep t = 1; t < g.horizon(); ++t) phi.set(g.influence_edge(0, t), false);
  return phi;
}

// Expected cumulative spread over layers t..T with `active` active at t.
double batch_value(const LayeredGraph& g, const DiffusionModel& m, const std::vector<NodeId>& active, TimeStep t) {
  double total = 0.0;
  oracle::for_each_realization(g, [&](const Realization& phi, double w) {
    std::vector<TimedNode> seeds;
    for (NodeId v : active) seeds.push_back({v, t});
    double from_t = 0.0;
    Cascade c(g, m);
    for (TimeStep s = 1; s < t; ++s) c.advance(phi);
    for (NodeId v : active) c.seed(v);
    from_t += static_cast<double>(c.active_count());
    while (!c.at_horizon()) {
      c.advance(phi);
      from_t += static_cast<double>(c.active_count());
    }
    total += w * from_t;
  });
  return total;
}

}  // namespace

TEST(AdaptiveGreedy, PicksTheMissedNeighbourSecond) {
  LayeredGraph g = toy_graph();
  DiffusionModel m = DiffusionModel::modified_ic();
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  Realization phi = toy_world(g);
  std::vector<NodeId> first{kV};
  PartialRealization psi = observe_myopic(g, m, phi, PartialRealization(g), first);
  ASSERT_TRUE(psi.in_domain(kW));
  ASSERT_FALSE(psi.in_domain(kU));
  EXPECT_EQ(adaptive_greedy_step(psi, est), std::optional<NodeId>(kU));

  AdaptiveGreedyPolicy greedy(est);
  PolicyRunResult run = run_adaptive_policy(greedy, g, m, 2, phi);
  EXPECT_EQ(run.seeds, SeedSchedule({{kV, 1}, {kU, 2}}));
  EXPECT_EQ(run.utility_final, 3U);
}

TEST(AdaptiveGreedy, TiesGoToTheSmallestId) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}, {1, 0, 0.5}}), 3, DiffusionModel::modified_ic());
  GainEstimator est(g, DiffusionModel::modified_ic(), {.mode = EstimatorMode::exact});
  EXPECT_EQ(adaptive_greedy_step(PartialRealization(g), est), std::optional<NodeId>(0));
}

TEST(AdaptiveGreedy, StarCenterFirst) {
  InfluenceGraph star(4, {{3, 0, 0.5}, {3, 1, 0.5}, {3, 2, 0.5}});
  DiffusionModel m = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(star, 3, m);
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  EXPECT_EQ(adaptive_greedy_step(PartialRealization(g), est), std::optional<NodeId>(3));
  for (NodeId leaf = 0; leaf < 3; ++leaf) {
    EXPECT_GT(exact_marginal_gain(g, m, 3, PartialRealization(g)).mean,
              exact_marginal_gain(g, m, leaf, PartialRealization(g)).mean);
  }
}

TEST(AdaptiveGreedy, ExhaustionReturnsNothing) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(1, {}), 2, DiffusionModel::modified_ic());
  GainEstimator est(g, DiffusionModel::modified_ic());
  PartialRealization psi(g);
  psi.mark_active(0, 1);
  EXPECT_FALSE(adaptive_greedy_step(psi, est).has_value());
}

TEST(RunAdaptivePolicy, ZeroBudget) {
  LayeredGraph g = toy_graph();
  GainEstimator est(g, DiffusionModel::modified_ic());
  AdaptiveGreedyPolicy greedy(est);
  PolicyRunResult run = run_adaptive_policy(greedy, g, DiffusionModel::modified_ic(), 0, toy_world(g));
  EXPECT_TRUE(run.seeds.empty());
  EXPECT_EQ(run.utility_final, 0U);
  EXPECT_EQ(run.utility_cumulative, 0U);
}

TEST(RunAdaptivePolicy, BudgetAndStepsRespected) {
  DiffusionModel m = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(erdos_renyi(15, 0.15, 4, true, 0.2), 4, m);
  DegreePolicy degree;
  PolicyRunResult run = run_adaptive_policy(degree, g, m, 10, sample_realization(g, 3));
  EXPECT_LE(run.seeds.size(), 4U);
  ASSERT_EQ(run.seeds_by_step.size(), 4U);
  for (const auto& step : run.seeds_by_step) EXPECT_LE(step.size(), 1U);
  EXPECT_EQ(run.utility_cumulative, cumulative_spread(run.trace));
}

TEST(LazyGreedy, SameChoicesAsPlainGreedyUnderExactGains) {
  std::mt19937_64 engine(80);
  DiffusionModel m = DiffusionModel::modified_ic();
  for (int trial = 0; trial < 30; ++trial) {
    LayeredGraph g = build_layered_graph(oracle::random_graph(engine, 4, 0.35, oracle::probability_grid()), 4, m);
    if (g.random_edge_count() > 12) continue;
    GainEstimator plain_est(g, m, {.mode = EstimatorMode::exact});
    GainEstimator lazy_est(g, m, {.mode = EstimatorMode::exact});
    AdaptiveGreedyPolicy plain(plain_est);
    LazyGreedyPolicy lazy(lazy_est, true);
    for (int world = 0; world < 5; ++world) {
      Realization phi = sample_realization(g, engine());
      PolicyRunResult a = run_adaptive_policy(plain, g, m, 3, phi);
      PolicyRunResult b = run_adaptive_policy(lazy, g, m, 3, phi);
      EXPECT_EQ(a.seeds, b.seeds);
    }
    EXPECT_LE(lazy_est.evaluations(), plain_est.evaluations());
    EXPECT_EQ(lazy.state().bound_violations(), 0U);
  }
}

TEST(LazyGreedy, FirstStepEvaluatesEveryNodeOnce) {
  LayeredGraph g = toy_graph();
  GainEstimator est(g, DiffusionModel::modified_ic(), {.mode = EstimatorMode::exact});
  LazyGreedyState state(3, true);
  lazy_greedy_step(PartialRealization(g), state, est);
  EXPECT_EQ(est.evaluations(), 3U);
}

TEST(LazyGreedy, StandardCascadeTripsTheBoundCheck) {
  // u = 0 -> v = 1 with p = 0.9, node 2 isolated.
  DiffusionModel m = DiffusionModel::standard_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(3, {{0, 1, 0.9}}), 3, m);
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  PartialRealization psi(g);
  psi.mark_active(0, 1);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  phi.set(g.influence_edge(0, 1), false);

  LazyGreedyState strict(3, true);
  ASSERT_EQ(lazy_greedy_step(psi, strict, est), std::optional<NodeId>(2));
  std::vector<NodeId> chosen{2};
  PartialRealization after = observe_myopic(g, m, phi, psi, chosen);
  EXPECT_THROW(lazy_greedy_step(after, strict, est), std::logic_error);

  LazyGreedyState lenient(3, false);
  lazy_greedy_step(psi, lenient, est);
  EXPECT_EQ(lazy_greedy_step(after, lenient, est), std::optional<NodeId>(1));
  EXPECT_EQ(lenient.bound_violations(), 1U);
}

TEST(Heuristics, DegreeOnStar) {
  InfluenceGraph star(4, {{2, 0, 0.5}, {2, 1, 0.5}, {2, 3, 0.5}});
  LayeredGraph g = build_layered_graph(star, 2, DiffusionModel::modified_ic());
  EXPECT_EQ(degree_step(star, PartialRealization(g)), std::optional<NodeId>(2));
}

TEST(Heuristics, CentralityOnPath) {
  InfluenceGraph path(3, {{0, 1, 0.5}, {1, 2, 0.5}});
  LayeredGraph g = build_layered_graph(path, 2, DiffusionModel::modified_ic());
  PartialRealization psi(g);
  psi.mark_active(0, 1);
  CentralityPolicy policy(path);
  EXPECT_EQ(policy.next_seeds({g, DiffusionModel::modified_ic(), psi, 1}), (std::vector<NodeId>{1}));
}

TEST(Heuristics, RandomDependsOnSeedAndInactiveSet) {
  LayeredGraph g = build_layered_graph(erdos_renyi(30, 0.1, 1), 2, DiffusionModel::modified_ic());
  PartialRealization a(g);
  a.mark_active(3, 1);
  PartialRealization b(g);
  b.mark_active(3, 1);
  b.record(g.influence_edge(0, 1), true);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::optional<NodeId> pick = random_step(a, seed);
    ASSERT_TRUE(pick.has_value());
    EXPECT_NE(*pick, 3U);
    EXPECT_EQ(pick, random_step(b, seed));
  }
  std::set<NodeId> picks;
  for (std::uint64_t seed = 0; seed < 200; ++seed) picks.insert(*random_step(a, seed));
  EXPECT_GT(picks.size(), 20U);
}

TEST(Heuristics, SeededRandomPolicyReproducible) {
  DiffusionModel m = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(erdos_renyi(30, 0.1, 1, true, 0.2), 5, m);
  Realization phi = sample_realization(g, 8);
  RandomPolicy a(42), b(42);
  EXPECT_TRUE(a.deterministic());
  EXPECT_FALSE(RandomPolicy().deterministic());
  EXPECT_EQ(run_adaptive_policy(a, g, m, 4, phi, 7).seeds, run_adaptive_policy(b, g, m, 4, phi, 7).seeds);
}

TEST(NonAdaptive, ToyScheduleAndItsWorldValue) {
  LayeredGraph g = toy_graph();
  DiffusionModel m = DiffusionModel::modified_ic();
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  SeedSchedule schedule = nonadaptive_greedy_schedule(g, m, 2, est);
  EXPECT_EQ(schedule, SeedSchedule({{kV, 1}, {kW, 2}}));
  EXPECT_EQ(final_spread(g, m, schedule, toy_world(g)), 2U);

  NonAdaptiveGreedyPolicy policy(g, m, 2, est);
  PolicyRunResult run = run_adaptive_policy(policy, g, m, 2, toy_world(g));
  EXPECT_EQ(run.seeds, schedule);
  EXPECT_EQ(policy.schedule(), schedule);
}

TEST(NonAdaptive, AdaptiveGreedyWorthMoreInExpectation) {
  LayeredGraph g = toy_graph();
  DiffusionModel m = DiffusionModel::modified_ic();
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  AdaptiveGreedyPolicy greedy(est);
  NonAdaptiveGreedyPolicy fixed(g, m, 2, est);
  EXPECT_GT(exact_policy_value(greedy, g, m, 2), exact_policy_value(fixed, g, m, 2) + 1e-9);
}

TEST(NonAdaptive, ScheduleNeverExceedsHorizon) {
  DiffusionModel m = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(5, {{0, 1, 0.5}}), 2, m);
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  EXPECT_EQ(nonadaptive_greedy_schedule(g, m, 4, est).size(), 2U);
}

TEST(BatchGreedy, MatchesGreedyOverEnumeratedValues) {
  std::mt19937_64 engine(90);
  DiffusionModel m = DiffusionModel::modified_ic();
  for (int trial = 0; trial < 20; ++trial) {
    LayeredGraph g = build_layered_graph(oracle::random_graph(engine, 4, 0.3, oracle::probability_grid()), 3, m);
    if (g.random_edge_count() > 14) continue;
    std::vector<NodeId> active{static_cast<NodeId>(trial % 4)};
    TimeStep t = 1 + trial % 2;
    GainEstimator est(g, m, {.mode = EstimatorMode::exact});
    std::vector<NodeId> batch = per_step_batch_greedy(g, m, active, t, 2, est);
    ASSERT_EQ(batch.size(), 2U);

    std::vector<NodeId> chosen = active;
    std::vector<NodeId> expect;
    for (int round = 0; round < 2; ++round) {
      double base = batch_value(g, m, chosen, t);
      std::optional<NodeId> best;
      double best_gain = -1.0;
      for (NodeId v = 0; v < 4; ++v) {
        if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
        std::vector<NodeId> more = chosen;
        more.push_back(v);
        double gain = batch_value(g, m, more, t) - base;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = v;
        }
      }
      expect.push_back(*best);
      chosen.push_back(*best);
    }
    EXPECT_EQ(batch, expect);

    double greedy_value = batch_value(g, m, chosen, t);
    double best_pair = 0.0;
    for (NodeId a = 0; a < 4; ++a) {
      for (NodeId b = a + 1; b < 4; ++b) {
        if (a == active[0] || b == active[0]) continue;
        best_pair = std::max(best_pair, batch_value(g, m, {active[0], a, b}, t));
      }
    }
    EXPECT_GE(greedy_value, (1 - 1 / std::exp(1.0)) * best_pair - 1e-12);
  }
}

TEST(BatchGreedy, LargeBatchTakesEveryInactiveNode) {
  DiffusionModel m = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(3, {{0, 1, 0.5}}), 2, m);
  GainEstimator est(g, m, {.mode = EstimatorMode::exact});
  std::vector<NodeId> active{0};
  std::vector<NodeId> batch = per_step_batch_greedy(g, m, active, 1, 5, est);
  std::sort(batch.begin(), batch.end());
  EXPECT_EQ(batch, (std::vector<NodeId>{1, 2}));
}

TEST(PolicyChecks, EstimatorForAnotherGraphRejected) {
  LayeredGraph g = toy_graph();
  LayeredGraph other = build_layered_graph(InfluenceGraph(3, {{0, 1, 0.5}}), 3, DiffusionModel::modified_ic());
  GainEstimator est(other, DiffusionModel::modified_ic());
  EXPECT_THROW(nonadaptive_greedy_schedule(g, DiffusionModel::modified_ic(), 2, est), std::invalid_argument);
}
