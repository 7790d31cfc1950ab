#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "netequil/error.hpp"
#include "netequil/graph.hpp"
#include "support.hpp"

using namespace netequil;
using namespace testing_support;

namespace {

std::multiset<std::tuple<NodeId, NodeId, double>> arc_multiset(const Graph& g) {
  std::multiset<std::tuple<NodeId, NodeId, double>> s;
  for (const Arc& a : g.arcs()) s.insert({a.tail, a.head, a.cost});
  return s;
}

bool weakly_connected(const Graph& g) {
  std::uint32_t count = 0;
  weak_components(g, &count);
  return count <= 1;
}

}  // namespace

TEST(Build, AdjacencyFollowsArcOrder) {
  const Graph g = graph_of(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  EXPECT_EQ(g.out_degree(0), 1u);
  EXPECT_EQ(g.in_degree(2), 1u);
  EXPECT_EQ(g.arc(1).tail, 1u);
  for (NodeId v = 0; v < 3; ++v) {
    for (ArcId e : g.out_arcs(v)) EXPECT_EQ(g.arc(e).tail, v);
    for (ArcId e : g.in_arcs(v)) EXPECT_EQ(g.arc(e).head, v);
  }
}

TEST(Build, EmptyGraph) {
  const Graph g = Graph::build({}, {});
  EXPECT_TRUE(g.empty());
  EXPECT_EQ(g.arc_count(), 0u);
}

TEST(Build, RejectsBadInput) {
  try {
    graph_of(2, {{0, 1, 1.0}, {1, 0, -1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeCost);
    EXPECT_NE(std::string(e.what()).find("arc 1"), std::string::npos);
  }
  try {
    graph_of(2, {{0, 5, 1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DanglingEndpoint);
  }
  EXPECT_THROW(Graph::build({Node{0.0, 91.0, {}}}, {}), Error);
}

TEST(Build, DropsSelfLoopsKeepsParallelArcs) {
  const Graph g = graph_of(2, {{0, 0, 1.0}, {0, 1, 2.0}, {0, 1, 3.0}});
  EXPECT_EQ(g.arc_count(), 2u);
}

TEST(LargestComponent, PicksBiggerComponent) {
  const Graph g = graph_of(5, {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}});
  const Subgraph s = largest_component(g);
  EXPECT_EQ(s.graph.node_count(), 3u);
  EXPECT_EQ(s.old_to_new[3], kNoNode);
  EXPECT_EQ(s.old_to_new[2], 2u);
}

TEST(LargestComponent, ConnectedGraphIsKept) {
  const Graph g = line3();
  const Subgraph s = largest_component(g);
  EXPECT_EQ(arc_multiset(s.graph), arc_multiset(g));
}

TEST(LargestComponent, TieGoesToSmallerMinimumId) {
  // {1,3,5,7,9} and {0,2,4,6,8} both have five nodes; node 0 decides.
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 2 < 10; ++v) edges.push_back({v + 2, v, 1.0});
  const Subgraph s = largest_component(graph_of(10, edges));
  EXPECT_EQ(s.graph.node_count(), 5u);
  for (NodeId v = 0; v < 10; ++v) EXPECT_EQ(s.old_to_new[v] != kNoNode, v % 2 == 0);
}

TEST(LargestComponent, OutputIsConnected) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 30; ++round) {
    std::vector<Edge> edges;
    for (int k = 0; k < 12; ++k) {
      edges.push_back({static_cast<NodeId>(rng() % 20), static_cast<NodeId>(rng() % 20), 1.0});
    }
    const Subgraph s = largest_component(graph_of(20, edges));
    EXPECT_TRUE(weakly_connected(s.graph));
  }
}

TEST(SimplifyChains, ContractsPassThrough) {
  const Graph g = graph_of(3, {{0, 1, 1.0}, {1, 2, 2.0}});
  const Subgraph s = simplify_chains(g, {0, 2});
  ASSERT_EQ(s.graph.arc_count(), 1u);
  EXPECT_EQ(s.graph.arc(0).cost, 3.0);
  EXPECT_EQ(s.old_to_new[1], kNoNode);
}

TEST(SimplifyChains, ProtectedNodeStays) {
  const Graph g = graph_of(3, {{0, 1, 1.0}, {1, 2, 2.0}});
  const Subgraph s = simplify_chains(g, {1});
  EXPECT_EQ(arc_multiset(s.graph), arc_multiset(g));
}

TEST(SimplifyChains, TwoWayRunMergesTags) {
  std::vector<Node> nodes(4, Node{0.0, 0.0, {}});
  std::vector<Arc> arcs;
  const char* kind[] = {"a", "a", "b"};
  for (NodeId v = 0; v < 3; ++v) {
    arcs.push_back(Arc{v, v + 1, 1.0, {{"class", kind[v]}, {"ref", "N7"}}});
    arcs.push_back(Arc{v + 1, v, 1.0, {{"class", kind[v]}, {"ref", "N7"}}});
  }
  const Subgraph s = simplify_chains(Graph::build(nodes, arcs), {});
  ASSERT_EQ(s.graph.arc_count(), 2u);
  EXPECT_EQ(s.graph.arc(0).cost, 3.0);
  EXPECT_EQ(s.graph.arc(0).tags.at("ref"), "N7");
  EXPECT_EQ(s.graph.arc(0).tags.at("class"), "a;b");
}

TEST(SimplifyChains, CycleKeepsSecondAnchor) {
  // Ten unit arcs around a one-way cycle, node 0 protected: the run from 0
  // back to 0 keeps its middle node 5, leaving the arcs 0->5 and 5->0.
  std::vector<Edge> edges;
  for (NodeId v = 0; v < 10; ++v) edges.push_back({v, (v + 1) % 10, 1.0});
  const Subgraph s = simplify_chains(graph_of(10, edges), {0});
  ASSERT_EQ(s.graph.node_count(), 2u);
  EXPECT_NE(s.old_to_new[5], kNoNode);
  const NodeId a = s.old_to_new[0];
  const NodeId b = s.old_to_new[5];
  EXPECT_EQ(arc_multiset(s.graph), (std::multiset<std::tuple<NodeId, NodeId, double>>{
                                       {a, b, 5.0}, {b, a, 5.0}}));
}

TEST(SimplifyChains, PreservesProtectedDistances) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    const NodeId n = 6 + rng() % 10;
    std::vector<Edge> edges;
    for (NodeId v = 1; v < n; ++v) {
      const NodeId u = static_cast<NodeId>(rng() % v);
      edges.push_back({u, v, static_cast<double>(rng() % 10)});
      if (rng() % 3) edges.push_back({v, u, static_cast<double>(rng() % 10)});
    }
    const Graph g = graph_of(n, edges);
    std::set<NodeId> keep;
    for (NodeId v = 0; v < n; ++v) {
      if (rng() % 4 == 0) keep.insert(v);
    }
    const Subgraph s = simplify_chains(g, keep);
    const auto before = floyd_warshall(g);
    const auto after = floyd_warshall(s.graph);
    for (NodeId a : keep) {
      for (NodeId b : keep) {
        ASSERT_NE(s.old_to_new[a], kNoNode);
        EXPECT_EQ(after[s.old_to_new[a]][s.old_to_new[b]], before[a][b]);
      }
    }
  }
}

TEST(MakeBidirectional, AddsMissingReverse) {
  const Graph g = make_bidirectional(graph_of(2, {{0, 1, 2.0}}));
  EXPECT_EQ(arc_multiset(g), (std::multiset<std::tuple<NodeId, NodeId, double>>{
                                 {0, 1, 2.0}, {1, 0, 2.0}}));
}

TEST(MakeBidirectional, CountsAndIdempotence) {
  const Graph mixed = graph_of(3, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 4.0}});
  const Graph once = make_bidirectional(mixed);
  EXPECT_EQ(once.arc_count(), 4u);
  EXPECT_EQ(arc_multiset(make_bidirectional(once)), arc_multiset(once));
  const Graph symmetric = line3();
  EXPECT_EQ(arc_multiset(make_bidirectional(symmetric)), arc_multiset(symmetric));
}
