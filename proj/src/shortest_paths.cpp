#include "netequil/shortest_paths.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <tuple>

#include "netequil/error.hpp"

namespace netequil {

namespace {

struct HeapEntry {
  double dist;
  std::uint32_t origin;
  NodeId node;
  bool operator>(const HeapEntry& o) const {
    return std::tie(dist, origin, node) > std::tie(o.dist, o.origin, o.node);
  }
};

}  // namespace

std::vector<ArcId> LabelTree::path_to(const Graph& g, NodeId v) const {
  std::vector<ArcId> path;
  if (!reached(v)) return path;
  while (parent[v] != kNoArc) {
    path.push_back(parent[v]);
    const Arc& a = g.arc(parent[v]);
    v = direction == Direction::Forward ? a.tail : a.head;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

LabelTree dijkstra(const Graph& g, std::span<const Seed> seeds, Direction direction) {
  const std::size_t n = g.node_count();
  LabelTree t;
  t.direction = direction;
  t.dist.assign(n, kInfinity);
  t.parent.assign(n, kNoArc);
  t.origin.assign(n, kNoSource);
  t.initial_label.assign(n, kInfinity);

  for (const Arc& a : g.arcs()) {
    if (!(a.cost >= 0.0)) throw Error(ErrorKind::NegativeCost, "arc cost " + std::to_string(a.cost));
  }

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
  for (const Seed& s : seeds) {
    if (s.node >= n) throw Error(ErrorKind::UnknownNode, "seed node " + std::to_string(s.node));
    const NodeId v = s.node;
    if (std::tie(s.initial_label, s.source_id) < std::tie(t.dist[v], t.origin[v])) {
      t.dist[v] = s.initial_label;
      t.origin[v] = s.source_id;
      t.initial_label[v] = s.initial_label;
      heap.push({s.initial_label, s.source_id, v});
    }
  }

  std::vector<bool> settled(n, false);
  const bool forward = direction == Direction::Forward;
  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    const NodeId u = top.node;
    if (settled[u] || top.dist != t.dist[u] || top.origin != t.origin[u]) continue;
    settled[u] = true;
    for (ArcId e : forward ? g.out_arcs(u) : g.in_arcs(u)) {
      const Arc& a = g.arc(e);
      const NodeId w = forward ? a.head : a.tail;
      if (settled[w]) continue;
      const double nd = t.dist[u] + a.cost;
      const auto cand = std::tie(nd, t.origin[u], e);
      if (cand < std::tie(t.dist[w], t.origin[w], t.parent[w])) {
        const bool improves_key = std::tie(nd, t.origin[u]) < std::tie(t.dist[w], t.origin[w]);
        t.dist[w] = nd;
        t.origin[w] = t.origin[u];
        t.parent[w] = e;
        t.initial_label[w] = t.initial_label[u];
        if (improves_key) heap.push({nd, t.origin[w], w});
      }
    }
  }
  return t;
}

std::vector<std::vector<double>> geodesic_matrix(const Graph& g, std::span<const NodeId> rows,
                                                 std::span<const NodeId> cols, unsigned threads) {
  for (NodeId c : cols) {
    if (c >= g.node_count()) throw Error(ErrorKind::UnknownNode, "column node " + std::to_string(c));
  }
  std::vector<std::vector<double>> table(rows.size(), std::vector<double>(cols.size(), kInfinity));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const Seed seed{rows[i], 0.0, 0};
    const LabelTree tree = dijkstra(g, std::span<const Seed>(&seed, 1));
    for (std::size_t j = 0; j < cols.size(); ++j) table[i][j] = tree.dist[cols[j]];
  });
  return table;
}

}  // namespace netequil
