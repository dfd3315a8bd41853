#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "rumor/rumor.hpp"

using namespace rumor;

namespace {

// |N^(u) ∩ N^(v)| / |N(u) ∪ N(v)| computed with std::set, closed
// neighborhoods in the numerator and open ones in the denominator.
double jaccard_by_sets(const Graph& g, NodeId u, NodeId v) {
  std::set<NodeId> nu(g.neighbors(u).begin(), g.neighbors(u).end());
  std::set<NodeId> nv(g.neighbors(v).begin(), g.neighbors(v).end());
  std::set<NodeId> cu = nu, cv = nv;
  cu.insert(u);
  cv.insert(v);
  std::size_t inter = 0;
  for (NodeId x : cu) inter += cv.count(x);
  std::set<NodeId> uni = nu;
  uni.insert(nv.begin(), nv.end());
  return static_cast<double>(inter) / static_cast<double>(uni.size());
}

}  // namespace

TEST(Degree, CompleteAndPath) {
  const auto k3 = oracle::complete_graph(3);
  for (NodeId v = 0; v < 3; ++v) EXPECT_EQ(degree(k3, v), 2u);
  const auto path = oracle::path_graph(3);
  EXPECT_EQ(degree(path, 1), 2u);
  EXPECT_EQ(degree(path, 0), 1u);
}

TEST(Degree, OutOfRangeIsUsageError) {
  const auto k3 = oracle::complete_graph(3);
  EXPECT_THROW(degree(k3, 3), UsageError);
  EXPECT_THROW(k3.neighbors(17), UsageError);
}

TEST(Jaccard, Triangle) {
  const auto k3 = oracle::complete_graph(3);
  const auto s = jaccard_similarity(k3, 0, 1);
  EXPECT_EQ(s.numerator, 3u);
  EXPECT_EQ(s.denominator, 3u);
  EXPECT_DOUBLE_EQ(s.value(), 1.0);
}

TEST(Jaccard, PathEndpointPair) {
  const auto path = oracle::path_graph(3);
  EXPECT_DOUBLE_EQ(jaccard_similarity(path, 0, 1).value(), 2.0 / 3.0);
}

TEST(Jaccard, FlowerInnerCliqueNodesTrustFully) {
  const auto g = gen_flower(12, 3);
  // Super node 0 is {0,1,2}; node 0 is its boundary node.
  EXPECT_DOUBLE_EQ(jaccard_similarity(g, 1, 2).value(), 1.0);
  const auto big = gen_flower(400, 20);
  EXPECT_DOUBLE_EQ(jaccard_similarity(big, 21, 39).value(), 1.0);
}

TEST(Jaccard, NonAdjacentPairIsUsageError) {
  const auto path = oracle::path_graph(3);
  EXPECT_THROW(jaccard_similarity(path, 0, 2), UsageError);
}

TEST(NodeBoundary, Examples) {
  const auto star = oracle::star_graph(5);
  const NodeSet center(6, std::vector<NodeId>{0});
  EXPECT_EQ(node_boundary(star, center).members(), (std::vector<NodeId>{1, 2, 3, 4, 5}));

  NodeSet all(6);
  for (NodeId v = 0; v < 6; ++v) all.insert(v);
  EXPECT_TRUE(node_boundary(star, all).empty());

  const auto c8 = oracle::cycle_graph(8);
  const NodeSet a(8, std::vector<NodeId>{0, 1});
  EXPECT_EQ(node_boundary(c8, a).members(), (std::vector<NodeId>{2, 7}));
}

TEST(GraphBuild, DedupAndSelfLoops) {
  const auto g = Graph::from_edges(3, {{0, 1}, {1, 0}, {1, 2}, {2, 2}, {1, 2}});
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_FALSE(g.has_edge(2, 2));
  EXPECT_THROW(Graph::from_edges(2, {{0, 2}}), UsageError);
}

// Property suite over random graphs of mixed density.
class RandomGraphProperties : public ::testing::TestWithParam<int> {};

TEST_P(RandomGraphProperties, Invariants) {
  const int seed = GetParam();
  Rng rng(seed);
  const std::size_t n = 5 + rng.below(40);
  const double p = 0.05 + 0.6 * rng.uniform();
  const Graph g = gen_er(n, p, seed);

  std::size_t degree_sum = 0;
  for (NodeId v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    degree_sum += nb.size();
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
    for (NodeId w : nb) {
      EXPECT_NE(w, v);
      EXPECT_TRUE(g.has_edge(w, v));
    }
  }
  EXPECT_EQ(degree_sum, 2 * g.num_edges());

  const SimilarityTable table(g);
  for (NodeId u = 0; u < n; ++u) {
    const auto nb = g.neighbors(u);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const NodeId v = nb[j];
      const double s = jaccard_similarity(g, u, v).value();
      EXPECT_DOUBLE_EQ(s, jaccard_similarity(g, v, u).value());
      EXPECT_DOUBLE_EQ(s, jaccard_by_sets(g, u, v));
      EXPECT_DOUBLE_EQ(s, table.at_slot(g.offset(u) + j));
      const auto uni = jaccard_similarity(g, u, v).denominator;
      EXPECT_GE(s, 2.0 / static_cast<double>(uni) - 1e-15);
      EXPECT_LE(s, 1.0);
    }
  }

  // Boundary never exceeds the degree sum of the set.
  NodeSet a(n);
  std::size_t deg_a = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (rng.bernoulli(0.3)) {
      a.insert(v);
      deg_a += g.degree(v);
    }
  }
  const auto boundary = node_boundary(g, a);
  EXPECT_LE(boundary.size(), deg_a);
  for (NodeId v : boundary.members()) EXPECT_FALSE(a.contains(v));

  // Round trip through the edge-list format.
  std::stringstream ss;
  write_edge_list(ss, g);
  const auto back = parse_edge_list(ss);
  EXPECT_TRUE(back.graph == g);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomGraphProperties, ::testing::Range(1, 41));

TEST(GraphBuild, RebuildFromDumpedEdgesIsIdentity) {
  const auto g = gen_er(60, 0.1, 9);
  const auto again = Graph::from_edges(g.num_nodes(), g.edges());
  EXPECT_TRUE(again == g);
  // Shuffled, reversed and duplicated input collapses to the same graph.
  auto messy = g.edges();
  for (const auto& e : g.edges()) messy.push_back({e.v, e.u});
  Rng rng(3);
  rng.shuffle(messy.begin(), messy.end());
  EXPECT_TRUE(Graph::from_edges(g.num_nodes(), messy) == g);
}
