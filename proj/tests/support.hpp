#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <tuple>
#include <vector>

#include "netequil/equilibrium.hpp"
#include "netequil/graph.hpp"
#include "netequil/mcf.hpp"

namespace testing_support {

using netequil::Arc;
using netequil::Graph;
using netequil::Node;
using netequil::NodeId;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
  NodeId tail;
  NodeId head;
  double cost;
};

// Nodes sit on a line of longitudes so every graph is also a valid geometry.
inline Graph graph_of(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = Node{0.01 * static_cast<double>(i), 45.0, {}};
  std::vector<Arc> arcs;
  for (const Edge& e : edges) arcs.push_back(Arc{e.tail, e.head, e.cost, {}});
  return Graph::build(std::move(nodes), std::move(arcs));
}

inline std::vector<Edge> both_ways(const std::vector<Edge>& edges) {
  std::vector<Edge> out;
  for (const Edge& e : edges) {
    out.push_back(e);
    out.push_back({e.head, e.tail, e.cost});
  }
  return out;
}

// A - B - C with unit costs both ways.
inline Graph line3() { return graph_of(3, both_ways({{0, 1, 1.0}, {1, 2, 1.0}})); }

// Buyers 1, 2 are nodes 0, 1; sellers 3, 4 are nodes 2, 3.
inline Graph degen4() {
  return graph_of(4, {{2, 0, 2.0}, {3, 0, 1.0}, {2, 1, 2.0}, {3, 1, 1.0}});
}
inline std::vector<double> degen4_excess() { return {-1.0, -1.0, 1.0, 1.0}; }

// Same numbering; geodesics d(1,3)=1, d(1,4)=3, d(2,3)=2, d(2,4)=4.
inline Graph alpha4() {
  return graph_of(4, both_ways({{2, 0, 1.0}, {3, 0, 3.0}, {2, 1, 2.0}, {3, 1, 4.0}}));
}

// All-pairs geodesics by Floyd-Warshall over the arc list.
inline std::vector<std::vector<double>> floyd_warshall(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (std::size_t v = 0; v < n; ++v) d[v][v] = 0.0;
  for (const Arc& a : g.arcs()) d[a.tail][a.head] = std::min(d[a.tail][a.head], a.cost);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

// Minimum cost of an integral transshipment: every supply unit is paired
// with a demand unit, every pairing is tried.
inline double enumerate_min_cost(const Graph& g, const std::vector<double>& excess) {
  const auto d = floyd_warshall(g);
  std::vector<NodeId> from;
  std::vector<NodeId> to;
  for (NodeId v = 0; v < excess.size(); ++v) {
    const auto units = static_cast<int>(std::lround(std::abs(excess[v])));
    for (int k = 0; k < units; ++k) (excess[v] > 0 ? from : to).push_back(v);
  }
  std::vector<std::size_t> perm(to.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) cost += d[from[i]][to[perm[i]]];
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

struct RandomInstance {
  std::shared_ptr<const Graph> graph;
  std::vector<double> excess;
};

// Connected graph on 2..8 nodes: a random spanning tree plus extra arcs, each
// link present in both directions with independent integer costs 0..10.
// Integral excess with total supply 1..6.
inline RandomInstance random_instance(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int n = pick(2, 8);
  std::vector<Edge> edges;
  auto link = [&](int a, int b) {
    edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b), static_cast<double>(pick(0, 10))});
    edges.push_back({static_cast<NodeId>(b), static_cast<NodeId>(a), static_cast<double>(pick(0, 10))});
  };
  for (int v = 1; v < n; ++v) link(v, pick(0, v - 1));
  const int extra = pick(0, n);
  for (int k = 0; k < extra; ++k) {
    const int a = pick(0, n - 1);
    const int b = pick(0, n - 1);
    if (a != b) link(a, b);
  }
  RandomInstance r;
  r.graph = std::make_shared<const Graph>(graph_of(static_cast<std::size_t>(n), edges));
  r.excess.assign(static_cast<std::size_t>(n), 0.0);
  const int units = pick(1, 6);
  for (int k = 0; k < units; ++k) {
    r.excess[static_cast<std::size_t>(pick(0, n - 1))] += 1.0;
    r.excess[static_cast<std::size_t>(pick(0, n - 1))] -= 1.0;
  }
  return r;
}

inline std::vector<std::uint8_t> support_of(const std::vector<double>& flow) {
  std::vector<std::uint8_t> s(flow.size());
  for (std::size_t e = 0; e < flow.size(); ++e) s[e] = flow[e] > 0.0;
  return s;
}

}  // namespace testing_support
