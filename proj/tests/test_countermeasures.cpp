#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rumor/rumor.hpp"

using namespace rumor;

TEST(BlockNodes, CountsForHundredNodes) {
  const auto g = gen_er(100, 0.1, 4);
  for (RngSeed s = 1; s <= 10; ++s) {
    Rng rng(s);
    const auto blocked = cm1_block(g, rng, BlockNodes{});
    EXPECT_EQ(blocked.size(), 25u);
    // The five highest-degree nodes are always in.
    std::vector<NodeId> order(100);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return g.degree(a) > g.degree(b); });
    for (int i = 0; i < 5; ++i) EXPECT_TRUE(blocked.contains(order[i]));
  }
}

TEST(BlockNodes, StarCenterAlwaysBlocked) {
  const auto star = oracle::star_graph(19);
  for (RngSeed s = 1; s <= 20; ++s) {
    ProcessConfig cfg;
    cfg.seed = s;
    cfg.countermeasure = BlockNodes{};
    const auto r = run(star, cfg);
    Process p(star, cfg);
    EXPECT_TRUE(p.is_blocked(0));
    // With the hub cut out nothing can travel beyond the seed.
    EXPECT_EQ(r.ever_red, 1u);
  }
}

TEST(BlockNodes, BlockedNodesStayUncolored) {
  const auto g = gen_moderate_expander(1600, 4, 16, 2);
  ProcessConfig cfg;
  cfg.countermeasure = BlockNodes{};
  for (RngSeed s = 1; s <= 5; ++s) {
    cfg.seed = s;
    Process p(g, cfg);
    drive(p, {});
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (p.is_blocked(v)) ASSERT_EQ(p.color(v), Color::Uncolored);
  }
}

TEST(BlockEdges, BridgeBetweenCliquesIsCut) {
  const auto g = oracle::clique_chain(2, 5, false);
  const auto part = std::make_shared<const Partition>(louvain(g, 1));
  ASSERT_EQ(part->community_count, 2u);
  // Every node of the first clique red: that community is a spreader.
  std::vector<Color> colors(10, Color::Uncolored);
  for (NodeId v = 0; v < 5; ++v) colors[v] = Color::Red;
  const auto mask = cm2_update_mask(g, *part, colors, BlockEdges{});
  EXPECT_TRUE(mask.blocked(4, 5));
  EXPECT_EQ(mask.blocked_edges(g).size(), 1u);
  EXPECT_FALSE(mask.blocked(0, 1));

  // Red confined to the first clique: the rumor can never cross.
  ProcessConfig cfg;
  cfg.seeds = SeedNodes{{0, 1, 2, 3, 4}};
  cfg.countermeasure = BlockEdges{};
  cfg.partition = part;
  for (RngSeed s = 1; s <= 30; ++s) {
    cfg.seed = s;
    const auto r = run(g, cfg);
    EXPECT_EQ(r.ever_red, 5u);
    EXPECT_DOUBLE_EQ(r.max_blocked_edge_fraction, 1.0 / static_cast<double>(g.num_edges()));
  }
}

TEST(BlockEdges, QuietBelowGlobalThreshold) {
  const auto g = oracle::clique_chain(4, 5, true);
  const auto part = louvain(g, 1);
  std::vector<Color> colors(20, Color::Uncolored);
  colors[0] = Color::Red;  // 5% of nodes, not strictly above tau_g
  EXPECT_FALSE(cm2_update_mask(g, part, colors, BlockEdges{}).active());
  colors[1] = Color::Red;
  EXPECT_TRUE(cm2_update_mask(g, part, colors, BlockEdges{}).active());
}

TEST(AccuracyFlags, RejectionRates) {
  const AccuracyFlags never{0.0}, always{1.0}, some{0.3};
  Rng rng(5);
  int rej_never = 0, rej_always = 0, rej_some = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    rej_never += cm3_reject(rng, never);
    rej_always += cm3_reject(rng, always);
    rej_some += cm3_reject(rng, some);
  }
  EXPECT_EQ(rej_never, 0);
  EXPECT_EQ(rej_always, trials);
  EXPECT_NEAR(rej_some / static_cast<double>(trials), 0.3, 0.005);
}

TEST(AccuracyFlags, RejectAllStopsAtTheSeed) {
  const auto g = gen_er(200, 0.05, 6);
  ProcessConfig cfg;
  cfg.countermeasure = AccuracyFlags{1.0};
  for (RngSeed s = 1; s <= 10; ++s) {
    cfg.seed = s;
    const auto r = run(g, cfg);
    EXPECT_EQ(r.ever_red, 1u);
    EXPECT_EQ(r.trajectory.back()[Color::Orange], 1u + r.rejections);
  }
}

TEST(AccuracyFlags, RejectedNodesDoNotSpread) {
  // Orange nodes that never were red account for every rejection.
  const auto g = gen_moderate_expander(1600, 4, 16, 3);
  ProcessConfig cfg;
  cfg.countermeasure = AccuracyFlags{};
  for (RngSeed s = 1; s <= 5; ++s) {
    cfg.seed = s;
    Process p(g, cfg);
    drive(p, {});
    std::size_t orange_never_red = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      orange_never_red += p.color(v) == Color::Orange && !p.ever_red(v);
    EXPECT_EQ(orange_never_red, p.rejections());
    EXPECT_EQ(p.counts()[Color::Orange], p.ever_red_count() + p.rejections());
  }
}

TEST(SpreadTruth, HighestDegreeUncoloredWithLowIdTies) {
  const auto star = oracle::star_graph(4);
  std::vector<Color> colors(5, Color::Uncolored);
  EXPECT_EQ(cm4_seed_truth(star, colors), std::optional<NodeId>(0));
  colors[0] = Color::Red;
  EXPECT_EQ(cm4_seed_truth(star, colors), std::optional<NodeId>(1));
  std::fill(colors.begin(), colors.end(), Color::Orange);
  EXPECT_EQ(cm4_seed_truth(star, colors), std::nullopt);
}

TEST(SpreadTruth, SeedPlacedAfterDelay) {
  const auto g = gen_er(300, 0.03, 2);
  ProcessConfig cfg;
  cfg.countermeasure = SpreadTruth{3};
  for (RngSeed s = 1; s <= 10; ++s) {
    cfg.seed = s;
    cfg.seeds = SeedNodes{{static_cast<NodeId>(s)}};
    Process p(g, cfg);
    p.step();
    p.step();
    EXPECT_FALSE(p.truth_seed());
    p.step();
    ASSERT_TRUE(p.truth_seed());
    const NodeId t = *p.truth_seed();
    EXPECT_EQ(p.color(t), Color::Green);
    EXPECT_EQ(p.age(t), 1);
    // Nothing left uncolored beats it on degree, and ties go to the lower id.
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (p.color(v) != Color::Uncolored) continue;
      EXPECT_TRUE(g.degree(v) < g.degree(t) || (g.degree(v) == g.degree(t) && v > t)) << v;
    }
  }
}

TEST(SpreadTruth, NoOpWhenEverythingIsColored) {
  const auto k3 = oracle::complete_graph(3);
  ProcessConfig cfg;
  cfg.seeds = SeedNodes{{0}};
  cfg.countermeasure = SpreadTruth{1};
  Process p(k3, cfg);
  p.set_state(std::vector<Color>(3, Color::Red), std::vector<int>{1, 1, 1});
  p.step();
  EXPECT_FALSE(p.truth_seed());
  EXPECT_TRUE(p.truth_seed_skipped());
}

TEST(FactCheckers, SampleSizeAndExclusion) {
  const auto g = gen_er(95, 0.1, 1);
  Rng rng(3);
  const auto checkers = cm5_sample_fact_checkers(g, rng, FactCheckers{});
  EXPECT_EQ(checkers.size(), 10u);  // ceil(9.5)
  NodeSet excluded(95);
  for (NodeId v = 0; v < 90; ++v) excluded.insert(v);
  const auto rest = cm5_sample_fact_checkers(g, rng, FactCheckers{}, &excluded);
  EXPECT_EQ(rest.size(), 5u);
  for (NodeId v : rest.members()) EXPECT_GE(v, 90u);
}

TEST(FactCheckers, NeverRedAndAgeOncePerRound) {
  const auto g = gen_moderate_expander(1600, 4, 16, 4);
  ProcessConfig cfg;
  cfg.countermeasure = FactCheckers{};
  for (RngSeed s = 1; s <= 5; ++s) {
    cfg.seed = s;
    Process p(g, cfg);
    std::vector<int> prev_age(g.num_nodes());
    std::vector<Color> prev(g.num_nodes());
    while (!p.fixed()) {
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        prev_age[v] = p.age(v);
        prev[v] = p.color(v);
      }
      p.step();
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (p.is_fact_checker(v)) ASSERT_NE(p.color(v), Color::Red);
        // A spreader that keeps its color ages by exactly one per round.
        if (prev[v] == p.color(v) && (prev[v] == Color::Red || prev[v] == Color::Green))
          ASSERT_EQ(p.age(v), prev_age[v] + 1);
      }
    }
  }
}

TEST(FactCheckers, ConvertRedOffKeepsRedNodes) {
  const auto g = gen_er(300, 0.04, 8);
  ProcessConfig cfg;
  FactCheckers spec;
  spec.convert_red = false;
  cfg.countermeasure = spec;
  for (RngSeed s = 1; s <= 5; ++s) {
    cfg.seed = s;
    Process p(g, cfg);
    std::vector<Color> prev(p.colors().begin(), p.colors().end());
    while (!p.fixed()) {
      p.step();
      for (NodeId v = 0; v < g.num_nodes(); ++v)
        if (prev[v] == Color::Red) ASSERT_NE(p.color(v), Color::Green);
      prev.assign(p.colors().begin(), p.colors().end());
    }
  }
}

TEST(HearTwice, GateCases) {
  const HearTwice spec{};
  std::vector<NodeId> heard;
  EXPECT_FALSE(cm6_gate(heard, 3, spec));
  EXPECT_FALSE(cm6_gate(heard, 3, spec));  // same neighbor twice counts once
  EXPECT_TRUE(cm6_gate(heard, 7, spec));
  EXPECT_EQ(heard.size(), 2u);

  const HearTwice three{3};
  std::vector<NodeId> h3;
  EXPECT_FALSE(cm6_gate(h3, 1, three));
  EXPECT_FALSE(cm6_gate(h3, 2, three));
  EXPECT_TRUE(cm6_gate(h3, 4, three));
}

TEST(HearTwice, SingleSpreaderCannotConvinceAlone) {
  // A path: every node has at most one red neighbor at a time from the left.
  const auto path = oracle::path_graph(10);
  ProcessConfig cfg;
  cfg.seeds = SeedNodes{{0}};
  cfg.countermeasure = HearTwice{};
  for (RngSeed s = 1; s <= 20; ++s) {
    cfg.seed = s;
    EXPECT_EQ(run(path, cfg).ever_red, 1u);
  }
}

TEST(HearTwice, RedNodesHeardFromTwoNeighbors) {
  const auto g = gen_er(300, 0.05, 9);
  ProcessConfig cfg;
  cfg.countermeasure = HearTwice{};
  for (RngSeed s = 1; s <= 5; ++s) {
    cfg.seed = s;
    Process p(g, cfg);
    drive(p, {});
    const std::set<NodeId> seeds(p.seeds().begin(), p.seeds().end());
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (p.ever_red(v) && !seeds.count(v)) ASSERT_GE(p.hit_count(v), 2u);
  }
}

TEST(Countermeasures, Validation) {
  EXPECT_THROW(validate(CountermeasureSpec{BlockNodes{-0.1, 0.2}}), UsageError);
  EXPECT_THROW(validate(CountermeasureSpec{BlockEdges{0.1, 1.5}}), UsageError);
  EXPECT_THROW(validate(CountermeasureSpec{FactCheckers{0.1, 0, 3, true}}), UsageError);
  EXPECT_THROW(validate(CountermeasureSpec{FactCheckers{0.1, 20, 0, true}}), UsageError);
  EXPECT_NO_THROW(validate(CountermeasureSpec{NoCountermeasure{}}));
  EXPECT_EQ(ceil_fraction(0.2, 100), 20u);
  EXPECT_EQ(ceil_fraction(0.05, 4039), 202u);
}
