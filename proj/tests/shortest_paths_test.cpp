#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "netequil/shortest_paths.hpp"
#include "support.hpp"

using namespace netequil;
using namespace testing_support;

namespace {

// Every node's label is achieved by its parent arc and no arc can improve it.
void expect_consistent_tree(const Graph& g, const LabelTree& t, const std::vector<Seed>& seeds) {
  for (const Arc& a : g.arcs()) {
    if (t.dist[a.tail] == kInfinity) continue;
    EXPECT_LE(t.dist[a.head], t.dist[a.tail] + a.cost);
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!t.reached(v)) {
      EXPECT_EQ(t.parent[v], kNoArc);
      continue;
    }
    double along = 0.0;
    const std::vector<ArcId> path = t.path_to(g, v);
    NodeId start = v;
    if (!path.empty()) start = g.arc(path.front()).tail;
    for (std::size_t k = 0; k < path.size(); ++k) {
      along += g.arc(path[k]).cost;
      if (k + 1 < path.size()) EXPECT_EQ(g.arc(path[k]).head, g.arc(path[k + 1]).tail);
    }
    bool seeded = false;
    for (const Seed& s : seeds) {
      if (s.node == start && s.source_id == t.origin[v]) {
        EXPECT_EQ(t.dist[v], s.initial_label + along);
        seeded = true;
      }
    }
    EXPECT_TRUE(seeded) << "node " << v;
  }
}

}  // namespace

TEST(Dijkstra, LineFromEnd) {
  const Graph g = line3();
  const std::vector<Seed> seeds = {{0, 0.0, 0}};
  const LabelTree t = dijkstra(g, seeds);
  EXPECT_EQ(t.dist, (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(t.path_to(g, 2).size(), 2u);
  EXPECT_EQ(t.parent[0], kNoArc);
}

TEST(Dijkstra, SeedLabelsShiftTheRace) {
  // A at 5, C at 0: B is reached from C at 1 and A is beaten by C's 2.
  const Graph g = line3();
  const std::vector<Seed> seeds = {{0, 5.0, 0}, {2, 0.0, 1}};
  const LabelTree t = dijkstra(g, seeds);
  EXPECT_EQ(t.dist, (std::vector<double>{2, 1, 0}));
  EXPECT_EQ(t.origin[1], 1u);
  EXPECT_EQ(t.origin[0], 1u);
  EXPECT_EQ(t.initial_label[0], 0.0);
}

TEST(Dijkstra, TieGoesToSmallerSourceId) {
  const Graph g = line3();
  const std::vector<Seed> seeds = {{2, 0.0, 4}, {0, 0.0, 3}};
  const LabelTree t = dijkstra(g, seeds);
  EXPECT_EQ(t.dist[1], 1.0);
  EXPECT_EQ(t.origin[1], 3u);
}

TEST(Dijkstra, UnreachableStaysInfinite) {
  const Graph g = graph_of(3, {{0, 1, 2.0}});
  const std::vector<Seed> seeds = {{0, 0.0, 0}};
  const LabelTree t = dijkstra(g, seeds);
  EXPECT_EQ(t.dist[2], kInfinity);
  EXPECT_FALSE(t.reached(2));
  EXPECT_EQ(t.origin[2], kNoSource);
}

TEST(Dijkstra, ReverseFollowsArcsBackward) {
  const Graph g = graph_of(3, {{0, 1, 2.0}, {1, 2, 3.0}});
  const std::vector<Seed> seeds = {{2, 0.0, 0}};
  const LabelTree fwd = dijkstra(g, seeds);
  const LabelTree rev = dijkstra(g, seeds, Direction::Reverse);
  EXPECT_EQ(fwd.dist[0], kInfinity);
  EXPECT_EQ(rev.dist, (std::vector<double>{5, 3, 0}));
}

TEST(Dijkstra, RandomTreesAreConsistent) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 100; ++round) {
    const RandomInstance r = random_instance(rng);
    const Graph& g = *r.graph;
    std::vector<Seed> seeds;
    const auto count = 1 + rng() % 3;
    for (std::uint32_t k = 0; k < count; ++k) {
      seeds.push_back({static_cast<NodeId>(rng() % g.node_count()), static_cast<double>(rng() % 6), k});
    }
    const LabelTree t = dijkstra(g, seeds);
    expect_consistent_tree(g, t, seeds);
    const auto d = floyd_warshall(g);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      double best = kInfinity;
      for (const Seed& s : seeds) best = std::min(best, s.initial_label + d[s.node][v]);
      EXPECT_EQ(t.dist[v], best);
    }
  }
}

TEST(GeodesicMatrix, MatchesFloydWarshall) {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 40; ++round) {
    const RandomInstance r = random_instance(rng);
    const Graph& g = *r.graph;
    std::vector<NodeId> all(g.node_count());
    for (NodeId v = 0; v < all.size(); ++v) all[v] = v;
    const auto d = floyd_warshall(g);
    EXPECT_EQ(geodesic_matrix(g, all, all, 1), d);
    EXPECT_EQ(geodesic_matrix(g, all, all, 3), d);
  }
}

TEST(GeodesicMatrix, AlphaExampleTable) {
  const Graph g = alpha4();
  const std::vector<NodeId> sellers = {2, 3};
  const std::vector<NodeId> buyers = {0, 1};
  const auto m = geodesic_matrix(g, sellers, buyers);
  EXPECT_EQ(m, (std::vector<std::vector<double>>{{1, 2}, {3, 4}}));
}
