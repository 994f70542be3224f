#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "adaptim/diffusion.hpp"
#include "adaptim/verification.hpp"
#include "oracles.hpp"

using namespace adaptim;

namespace {

// Nodes reached at each layer by BFS over live timed edges, seeds injected at
// their layer.
std::vector<std::set<NodeId>> timed_reachability(const LayeredGraph& g, const SeedSchedule& schedule,
                                                 const Realization& phi) {
  std::vector<TimedEdge> edges = g.timed_edges();
  std::vector<std::set<NodeId>> layers(static_cast<std::size_t>(g.horizon()) + 1);
  for (const TimedSeed& s : schedule.entries()) layers[static_cast<std::size_t>(s.time)].insert(s.node);
  for (TimeStep t = 1; t < g.horizon(); ++t) {
    for (EdgeId e = 0; e < edges.size(); ++e) {
      if (edges[e].from.time != t || !phi.live(e)) continue;
      if (layers[static_cast<std::size_t>(t)].count(edges[e].from.node)) {
        layers[static_cast<std::size_t>(t) + 1].insert(edges[e].to.node);
      }
    }
  }
  return layers;
}

SeedSchedule random_schedule(std::mt19937_64& engine, std::size_t n, int horizon) {
  SeedSchedule s;
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[v] = v;
  std::shuffle(order.begin(), order.end(), engine);
  std::uniform_int_distribution<std::size_t> count(1, n);
  std::vector<TimedSeed> seeds;
  std::uniform_int_distribution<int> when(1, horizon);
  for (std::size_t i = 0, c = count(engine); i < c; ++i) seeds.push_back({order[i], when(engine)});
  std::stable_sort(seeds.begin(), seeds.end(), [](auto& a, auto& b) { return a.time < b.time; });
  return SeedSchedule(seeds);
}

}  // namespace

TEST(SampleRealization, ExtremeProbabilities) {
  LayeredGraph ones = build_layered_graph(InfluenceGraph(3, {{0, 1, 1.0}, {1, 2, 1.0}}), 4, DiffusionModel::modified_ic());
  Realization all = sample_realization(ones, 5);
  for (EdgeId e = 0; e < all.size(); ++e) EXPECT_TRUE(all.live(e));
  LayeredGraph zeros(InfluenceGraph(3, {{0, 1, 0.0}, {1, 2, 0.0}}), 4, Persistence::none());
  Realization none = sample_realization(zeros, 5);
  for (EdgeId e = 0; e < none.size(); ++e) EXPECT_FALSE(none.live(e));
}

TEST(SampleRealization, LiveFractionMatchesProbability) {
  LayeredGraph g(InfluenceGraph(2, {{0, 1, 0.1}}), 2, Persistence::none());
  int live = 0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) live += sample_realization(g, static_cast<std::uint64_t>(s)).live(0) ? 1 : 0;
  EXPECT_NEAR(live / static_cast<double>(n), 0.1, 0.005);
}

TEST(SampleRealization, SameStreamSameWorld) {
  LayeredGraph g(erdos_renyi(20, 0.2, 1, true, 0.4), 5, Persistence::always_live());
  EXPECT_EQ(sample_realization(g, 99), sample_realization(g, 99));
  EXPECT_NE(sample_realization(g, 99).digest(), sample_realization(g, 100).digest());
}

TEST(RealizationTest, PriorProbabilitiesSumToOne) {
  std::mt19937_64 engine(4);
  for (int trial = 0; trial < 20; ++trial) {
    InfluenceGraph base = oracle::random_graph(engine, 3, 0.4, oracle::probability_grid());
    DiffusionModel model = trial % 2 ? DiffusionModel::non_progressive_ic(0.3) : DiffusionModel::modified_ic();
    LayeredGraph g = build_layered_graph(base, 2 + trial % 2, model);
    if (g.random_edge_count() > 14) continue;
    double total = 0.0;
    oracle::for_each_realization(g, [&](const Realization& phi, double w) {
      EXPECT_NEAR(phi.prior_probability(g), w, 1e-15);
      total += w;
    });
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SeedScheduleTest, EnforcesInvariants) {
  EXPECT_THROW(SeedSchedule({{0, 2}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(SeedSchedule({{0, 1}, {0, 2}}), std::invalid_argument);
  SeedSchedule s;
  s.add(3, 1);
  EXPECT_TRUE(s.contains(3));
  EXPECT_THROW(s.add(3, 2), std::invalid_argument);
}

TEST(Diffuse, TwoNodeSeedSpreadsAlongLiveEdge) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, DiffusionModel::modified_ic());
  Realization phi = Realization::uniform(g.timed_edge_count(), false);
  phi.set(g.influence_edge(0, 1), true);
  for (NodeId v = 0; v < 2; ++v) {
    phi.set(g.persistence_edge(v, 1), true);
    phi.set(g.persistence_edge(v, 2), true);
  }
  DiffusionTrace trace = diffuse(g, DiffusionModel::modified_ic(), SeedSchedule({{0, 1}}), phi);
  EXPECT_EQ(trace.at(1), (std::vector<NodeId>{0}));
  EXPECT_EQ(trace.at(2), (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(trace.at(3), (std::vector<NodeId>{0, 1}));
}

TEST(Diffuse, NoSeedsNoActivity) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 1.0}}), 3, DiffusionModel::modified_ic());
  DiffusionTrace trace = diffuse(g, DiffusionModel::modified_ic(), SeedSchedule(), sample_realization(g, 1));
  ASSERT_EQ(trace.horizon(), 3);
  for (TimeStep t = 1; t <= 3; ++t) EXPECT_TRUE(trace.at(t).empty());
}

TEST(Diffuse, StandardCascadeUsesItsSingleChance) {
  DiffusionModel model = DiffusionModel::standard_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, model);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  phi.set(g.influence_edge(0, 1), false);
  DiffusionTrace trace = diffuse(g, model, SeedSchedule({{0, 1}}), phi);
  EXPECT_EQ(trace.at(3), (std::vector<NodeId>{0}));
  DiffusionTrace retry = diffuse(g, DiffusionModel::modified_ic(), SeedSchedule({{0, 1}}), phi);
  EXPECT_EQ(retry.at(3), (std::vector<NodeId>{0, 1}));
}

TEST(Diffuse, SeedOutsideHorizonRejected) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 1.0}}), 2, DiffusionModel::modified_ic());
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  EXPECT_THROW(diffuse(g, DiffusionModel::modified_ic(), SeedSchedule({{0, 3}}), phi), std::domain_error);
}

TEST(Diffuse, SeedingActiveNodeIsNoOp) {
  DiffusionModel model = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 1.0}}), 3, model);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  DiffusionTrace a = diffuse(g, model, SeedSchedule({{0, 1}}), phi);
  DiffusionTrace b = diffuse(g, model, SeedSchedule({{0, 1}, {1, 2}}), phi);
  EXPECT_EQ(a.active_sets, b.active_sets);
}

TEST(Diffuse, ProgressiveTracesNeverShrink) {
  std::mt19937_64 engine(21);
  for (int trial = 0; trial < 200; ++trial) {
    DiffusionModel model = trial % 2 ? DiffusionModel::standard_ic() : DiffusionModel::modified_ic();
    LayeredGraph g = build_layered_graph(oracle::random_graph(engine, 6, 0.3, oracle::probability_grid()), 5, model);
    SeedSchedule s = random_schedule(engine, 6, 5);
    DiffusionTrace trace = diffuse(g, model, s, sample_realization(g, engine()));
    for (TimeStep t = 1; t < 5; ++t) {
      EXPECT_TRUE(std::includes(trace.at(t + 1).begin(), trace.at(t + 1).end(), trace.at(t).begin(), trace.at(t).end()));
    }
    for (const TimedSeed& seed : s.entries()) {
      EXPECT_TRUE(std::binary_search(trace.at(seed.time).begin(), trace.at(seed.time).end(), seed.node));
    }
  }
}

TEST(Diffuse, ModifiedCascadeEqualsTimedReachability) {
  std::mt19937_64 engine(8);
  DiffusionModel model = DiffusionModel::modified_ic();
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int horizon = 1; horizon <= 4; ++horizon) {
      for (int trial = 0; trial < 3; ++trial) {
        LayeredGraph g = build_layered_graph(oracle::random_graph(engine, n, 0.4, oracle::probability_grid()),
                                             horizon, model);
        if (g.random_edge_count() > 12) continue;
        SeedSchedule s = random_schedule(engine, n, horizon);
        oracle::for_each_realization(g, [&](const Realization& phi, double) {
          DiffusionTrace trace = diffuse(g, model, s, phi);
          std::vector<std::set<NodeId>> expect = timed_reachability(g, s, phi);
          for (TimeStep t = 1; t <= horizon; ++t) {
            std::vector<NodeId> layer(expect[static_cast<std::size_t>(t)].begin(),
                                      expect[static_cast<std::size_t>(t)].end());
            ASSERT_EQ(trace.at(t), layer);
          }
          ++checked;
        });
      }
    }
  }
  EXPECT_GT(checked, 1000U);
}

TEST(Diffuse, StandardCascadeConsultsEachPairOnce) {
  std::mt19937_64 engine(31);
  DiffusionModel model = DiffusionModel::standard_ic();
  for (int trial = 0; trial < 200; ++trial) {
    LayeredGraph g = build_layered_graph(oracle::random_graph(engine, 6, 0.4, oracle::probability_grid()), 6, model);
    Realization phi = sample_realization(g, engine());
    Cascade cascade(g, model);
    cascade.seed(static_cast<NodeId>(trial % 6));
    std::map<std::size_t, int> consulted;
    while (!cascade.at_horizon()) {
      cascade.advance(phi, [&](EdgeId e, bool) {
        std::size_t slot = e % g.edges_per_boundary();
        if (slot < g.base().edge_count()) ++consulted[slot];
      });
    }
    for (const auto& [slot, count] : consulted) EXPECT_EQ(count, 1) << "base edge " << slot;
  }
}

TEST(Diffuse, NonProgressiveNodesDropWithoutPersistence) {
  DiffusionModel model = DiffusionModel::non_progressive_ic(0.5);
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, model);
  Realization phi = Realization::uniform(g.timed_edge_count(), false);
  DiffusionTrace trace = diffuse(g, model, SeedSchedule({{0, 1}}), phi);
  EXPECT_EQ(trace.at(1), (std::vector<NodeId>{0}));
  EXPECT_TRUE(trace.at(2).empty());
  phi.set(g.persistence_edge(0, 1), true);
  phi.set(g.influence_edge(0, 2), true);
  trace = diffuse(g, model, SeedSchedule({{0, 1}}), phi);
  EXPECT_EQ(trace.at(2), (std::vector<NodeId>{0}));
  EXPECT_EQ(trace.at(3), (std::vector<NodeId>{1}));
}

TEST(ObserveMyopic, SeedOutcomesRecorded) {
  // v = 0, u = 1, w = 2.
  DiffusionModel model = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(3, {{0, 1, 0.9}, {0, 2, 0.1}}), 3, model);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  phi.set(g.influence_edge(0, 1), false);
  phi.set(g.influence_edge(0, 2), false);
  std::vector<NodeId> seed{0};
  PartialRealization psi = observe_myopic(g, model, phi, PartialRealization(g), seed);
  EXPECT_EQ(time_of(psi), 2);
  EXPECT_EQ(psi.status(g.influence_edge(0, 1)), EdgeStatus::dead);
  EXPECT_EQ(psi.status(g.influence_edge(1, 1)), EdgeStatus::live);
  EXPECT_EQ(psi.activation_time(0), 1);
  EXPECT_EQ(psi.activation_time(2), 2);
  EXPECT_FALSE(psi.in_domain(1));
}

TEST(ObserveMyopic, EmptyStepOnlyMovesTheClock) {
  DiffusionModel model = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, model);
  PartialRealization psi = observe_myopic(g, model, sample_realization(g, 3), PartialRealization(g));
  EXPECT_EQ(time_of(psi), 2);
  EXPECT_EQ(psi.observed_count(), 0U);
  EXPECT_TRUE(psi.domain().empty());
}

TEST(ObserveMyopic, RepeatedAttemptsEachRecorded) {
  DiffusionModel model = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, model);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  phi.set(g.influence_edge(0, 1), false);
  std::vector<NodeId> seed{0};
  PartialRealization psi = observe_myopic(g, model, phi, PartialRealization(g), seed);
  psi = observe_myopic(g, model, phi, psi);
  EXPECT_EQ(psi.status(g.influence_edge(0, 1)), EdgeStatus::dead);
  EXPECT_EQ(psi.status(g.influence_edge(0, 2)), EdgeStatus::live);
  EXPECT_EQ(time_of(psi), 3);
  EXPECT_EQ(psi.activation_time(1), 3);
}

TEST(ObserveMyopic, RecordsAgreeWithTheWorld) {
  std::mt19937_64 engine(2);
  for (int trial = 0; trial < 300; ++trial) {
    DiffusionModel model = trial % 3 == 0   ? DiffusionModel::standard_ic()
                           : trial % 3 == 1 ? DiffusionModel::modified_ic()
                                            : DiffusionModel::non_progressive_ic(0.4);
    LayeredGraph g = build_layered_graph(oracle::random_graph(engine, 7, 0.3, oracle::probability_grid()), 5, model);
    Realization phi = sample_realization(g, engine());
    PartialRealization psi(g);
    PartialRealization previous = psi;
    for (TimeStep t = 1; t < 5; ++t) {
      std::vector<NodeId> seeds;
      NodeId candidate = static_cast<NodeId>(engine() % 7);
      if (!psi.in_domain(candidate)) seeds.push_back(candidate);
      psi = observe_myopic(g, model, phi, psi, seeds);
      ASSERT_TRUE(is_consistent(phi, psi));
      ASSERT_TRUE(is_subrealization(previous, psi));
      previous = psi;
    }
  }
}

TEST(ObserveMyopic, DisagreementIsALogicError) {
  DiffusionModel model = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, model);
  PartialRealization psi(g);
  psi.mark_active(0, 1);
  psi.record(g.influence_edge(0, 1), false);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  EXPECT_THROW(observe_myopic(g, model, phi, psi), std::logic_error);
  EXPECT_THROW(psi.record(g.influence_edge(0, 1), true), std::logic_error);
}

TEST(PartialRealizationTest, TimeOf) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 4, DiffusionModel::modified_ic());
  PartialRealization psi(g);
  EXPECT_EQ(time_of(psi), 1);
  psi.record(g.influence_edge(0, 2), true);
  EXPECT_EQ(time_of(psi), 3);
  PartialRealization only(g);
  only.mark_active(1, 2);
  EXPECT_EQ(time_of(only), 2);
}

TEST(PartialRealizationTest, EncodingIdentifiesObservation) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, DiffusionModel::modified_ic());
  PartialRealization a(g);
  a.mark_active(0, 1);
  a.record(g.influence_edge(0, 1), false);
  PartialRealization b(g);
  b.record(g.influence_edge(0, 1), false);
  b.mark_active(0, 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.encode(), b.encode());
  b.record(g.persistence_edge(0, 1), true);
  EXPECT_NE(a.encode(), b.encode());
}

TEST(PartialRealizationTest, WithSeedsRejectsDomainNodes) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, DiffusionModel::modified_ic());
  PartialRealization psi(g);
  std::vector<NodeId> seed{0};
  psi = with_seeds(psi, seed);
  EXPECT_EQ(psi.activation_time(0), 1);
  EXPECT_THROW(with_seeds(psi, seed), std::domain_error);
}

TEST(Consistency, BasicCases) {
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, DiffusionModel::modified_ic());
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  EXPECT_TRUE(is_consistent(phi, PartialRealization(g)));
  PartialRealization psi(g);
  psi.record(g.influence_edge(0, 1), false);
  EXPECT_FALSE(is_consistent(phi, psi));
  EXPECT_DOUBLE_EQ(conditional_probability(g, phi, psi), 0.0);
}

TEST(Consistency, TwoNodePairIsNested) {
  DiffusionModel model = DiffusionModel::standard_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.3}}), 3, model);
  PartialRealization psi(g);
  psi.mark_active(0, 1);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  phi.set(g.influence_edge(0, 1), false);
  PartialRealization psi_prime = observe_myopic(g, model, phi, psi);
  EXPECT_TRUE(is_subrealization(psi, psi_prime));
  EXPECT_FALSE(is_subrealization(psi_prime, psi));
}

TEST(ConditionalProbability, FullyObservedIsOne) {
  DiffusionModel model = DiffusionModel::modified_ic();
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 2, model);
  Realization phi = Realization::uniform(g.timed_edge_count(), true);
  PartialRealization psi(g);
  for (EdgeId e = 0; e < g.timed_edge_count(); ++e) psi.record(e, true);
  EXPECT_DOUBLE_EQ(conditional_probability(g, phi, psi), 1.0);
}

TEST(ConditionalProbability, TwoFairEdges) {
  LayeredGraph g(InfluenceGraph(2, {{0, 1, 0.5}, {1, 0, 0.5}}), 2, Persistence::none());
  double total = 0.0;
  oracle::for_each_realization(g, [&](const Realization& phi, double) {
    EXPECT_DOUBLE_EQ(conditional_probability(g, phi, PartialRealization(g)), 0.25);
    total += conditional_probability(g, phi, PartialRealization(g));
  });
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(ConditionalProbability, SixCoinInstanceIsUniform) {
  DiffusionModel model = DiffusionModel::non_progressive_ic(0.5);
  LayeredGraph g = build_layered_graph(InfluenceGraph(2, {{0, 1, 0.5}}), 3, model);
  PartialRealization psi(g);
  psi.mark_active(0, 1);
  std::size_t count = 0;
  oracle::for_each_realization(g, [&](const Realization& phi, double) {
    EXPECT_DOUBLE_EQ(conditional_probability(g, phi, psi), 1.0 / 64.0);
    ++count;
  });
  EXPECT_EQ(count, 64U);
}

TEST(ConditionalProbability, SumsToOneOverReachableObservations) {
  std::mt19937_64 engine(17);
  for (int trial = 0; trial < 10; ++trial) {
    DiffusionModel model = trial % 2 ? DiffusionModel::standard_ic() : DiffusionModel::modified_ic();
    LayeredGraph g = build_layered_graph(oracle::random_graph(engine, 3, 0.35, oracle::probability_grid()), 3, model);
    if (g.random_edge_count() > 14) continue;
    for (const PartialRealization& psi : reachable_partial_realizations(g, model, 1)) {
      double total = 0.0;
      oracle::for_each_realization(g, [&](const Realization& phi, double) {
        total += conditional_probability(g, phi, psi);
      });
      EXPECT_NEAR(total, 1.0, 1e-12) << psi.encode();
    }
  }
}
