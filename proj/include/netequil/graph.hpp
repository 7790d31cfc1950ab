#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace netequil {

using NodeId = std::uint32_t;
using ArcId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr ArcId kNoArc = std::numeric_limits<ArcId>::max();

using Tags = std::map<std::string, std::string>;

/// A located vertex. Its NodeId is its position in the graph's node list.
struct Node {
  double lon = 0.0;
  double lat = 0.0;
  Tags tags;
};

struct Arc {
  NodeId tail = kNoNode;
  NodeId head = kNoNode;
  double cost = 0.0;
  Tags tags;
};

/// Immutable directed graph with CSR out- and in-adjacency.
///
/// Parallel arcs are kept; self-loops are dropped at construction because a
/// nonnegative loop never shortens a path.
class Graph {
 public:
  Graph() = default;

  /// Validates and indexes. Throws NegativeCost, DanglingEndpoint or
  /// InvalidCoordinate, reporting the offending input index.
  static Graph build(std::vector<Node> nodes, std::vector<Arc> arcs);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t arc_count() const noexcept { return arcs_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const Node& node(NodeId v) const { return nodes_[v]; }
  const Arc& arc(ArcId e) const { return arcs_[e]; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Arc>& arcs() const noexcept { return arcs_; }

  std::span<const ArcId> out_arcs(NodeId v) const {
    return {out_index_.data() + out_offset_[v], out_index_.data() + out_offset_[v + 1]};
  }
  std::span<const ArcId> in_arcs(NodeId v) const {
    return {in_index_.data() + in_offset_[v], in_index_.data() + in_offset_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const { return out_offset_[v + 1] - out_offset_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offset_[v + 1] - in_offset_[v]; }

 private:
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_offset_{0};
  std::vector<ArcId> out_index_;
  std::vector<std::size_t> in_offset_{0};
  std::vector<ArcId> in_index_;
};

/// Result of a node-dropping transformation. `old_to_new[v]` is kNoNode for
/// nodes that did not survive.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> old_to_new;
};

/// Weakly connected component label per node, labels dense in order of the
/// smallest NodeId of each component.
std::vector<std::uint32_t> weak_components(const Graph& g, std::uint32_t* count = nullptr);

/// Subgraph induced by the largest weakly connected component. Ties go to the
/// component holding the smaller minimum NodeId.
Subgraph largest_component(const Graph& g);

/// Contracts unprotected pass-through nodes into single arcs with summed cost.
///
/// A pass-through node has exactly two distinct neighbors a and b and either
/// exactly the arcs {a->v, v->b} (one-way) or exactly {a->v, v->b, b->v, v->a}
/// (two-way). A maximal run of such nodes between anchors a != b becomes a->b
/// (and b->a when two-way). When a run closes on a single anchor, its most
/// central node (max of min(prefix, suffix) cost, first in walk order on ties)
/// is kept as a second anchor; a cycle with no anchor at all is anchored at
/// its smallest NodeId. Tags along a run are merged: equal values kept,
/// differing values joined with ';' in walk order.
Subgraph simplify_chains(const Graph& g, const std::set<NodeId>& protected_nodes);

/// Adds (v,u,c) for every arc (u,v,c) with no reverse arc. Idempotent.
Graph make_bidirectional(const Graph& g);

}  // namespace netequil
