#include "netequil/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "netequil/error.hpp"

namespace netequil {

namespace {

void build_csr(std::size_t n, const std::vector<Arc>& arcs, bool by_tail,
               std::vector<std::size_t>& offset, std::vector<ArcId>& index) {
  offset.assign(n + 1, 0);
  for (const Arc& a : arcs) ++offset[(by_tail ? a.tail : a.head) + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  index.assign(arcs.size(), 0);
  std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
  for (ArcId e = 0; e < arcs.size(); ++e) {
    const NodeId v = by_tail ? arcs[e].tail : arcs[e].head;
    index[cursor[v]++] = e;
  }
}

}  // namespace

Graph Graph::build(std::vector<Node> nodes, std::vector<Arc> arcs) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& v = nodes[i];
    if (!std::isfinite(v.lon) || !std::isfinite(v.lat) || v.lat < -90.0 || v.lat > 90.0 ||
        v.lon < -180.0 || v.lon > 180.0) {
      throw Error(ErrorKind::InvalidCoordinate, "node " + std::to_string(i));
    }
  }
  if (arcs.size() >= kNoArc) throw Error(ErrorKind::TooLarge, "arc count");
  std::vector<Arc> kept;
  kept.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    Arc& a = arcs[i];
    if (a.tail >= nodes.size() || a.head >= nodes.size()) {
      throw Error(ErrorKind::DanglingEndpoint, "arc " + std::to_string(i));
    }
    if (!(a.cost >= 0.0) || !std::isfinite(a.cost)) {
      throw Error(ErrorKind::NegativeCost, "arc " + std::to_string(i));
    }
    if (a.tail == a.head) continue;
    kept.push_back(std::move(a));
  }

  Graph g;
  g.nodes_ = std::move(nodes);
  g.arcs_ = std::move(kept);
  build_csr(g.nodes_.size(), g.arcs_, true, g.out_offset_, g.out_index_);
  build_csr(g.nodes_.size(), g.arcs_, false, g.in_offset_, g.in_index_);
  return g;
}

std::vector<std::uint32_t> weak_components(const Graph& g, std::uint32_t* count) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> label(g.node_count(), kUnset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (ArcId e : g.out_arcs(v)) {
        const NodeId w = g.arc(e).head;
        if (label[w] == kUnset) {
          label[w] = next;
          stack.push_back(w);
        }
      }
      for (ArcId e : g.in_arcs(v)) {
        const NodeId w = g.arc(e).tail;
        if (label[w] == kUnset) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  if (count != nullptr) *count = next;
  return label;
}

Subgraph largest_component(const Graph& g) {
  std::uint32_t count = 0;
  const auto label = weak_components(g, &count);
  Subgraph out;
  out.old_to_new.assign(g.node_count(), kNoNode);
  if (count == 0) return out;

  std::vector<std::size_t> size(count, 0);
  for (auto c : label) ++size[c];
  // Labels are assigned in order of smallest member, so the first maximum
  // is the tie-break winner.
  const auto best = static_cast<std::uint32_t>(
      std::max_element(size.begin(), size.end()) - size.begin());

  std::vector<Node> nodes;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (label[v] != best) continue;
    out.old_to_new[v] = static_cast<NodeId>(nodes.size());
    nodes.push_back(g.node(v));
  }
  std::vector<Arc> arcs;
  for (const Arc& a : g.arcs()) {
    if (label[a.tail] != best) continue;
    Arc b = a;
    b.tail = out.old_to_new[a.tail];
    b.head = out.old_to_new[a.head];
    arcs.push_back(std::move(b));
  }
  out.graph = Graph::build(std::move(nodes), std::move(arcs));
  return out;
}

namespace {

enum class PassKind { None, OneWay, TwoWay };

struct PassInfo {
  PassKind kind = PassKind::None;
  NodeId a = kNoNode;  // for one-way: predecessor
  NodeId b = kNoNode;  // for one-way: successor
};

PassInfo classify(const Graph& g, NodeId v) {
  PassInfo info;
  const auto in = g.in_arcs(v);
  const auto out = g.out_arcs(v);
  if (in.size() == 1 && out.size() == 1) {
    const NodeId a = g.arc(in[0]).tail;
    const NodeId b = g.arc(out[0]).head;
    if (a != b) info = {PassKind::OneWay, a, b};
    return info;
  }
  if (in.size() == 2 && out.size() == 2) {
    const NodeId i0 = g.arc(in[0]).tail, i1 = g.arc(in[1]).tail;
    const NodeId o0 = g.arc(out[0]).head, o1 = g.arc(out[1]).head;
    if (i0 == i1 || o0 == o1) return info;
    if (std::minmax(i0, i1) != std::minmax(o0, o1)) return info;
    info = {PassKind::TwoWay, std::min(i0, i1), std::max(i0, i1)};
  }
  return info;
}

// Unique arc from -> to, looked up through whichever endpoint is pass-through.
ArcId find_arc(const Graph& g, NodeId from, NodeId to) {
  if (g.out_degree(from) <= g.in_degree(to)) {
    for (ArcId e : g.out_arcs(from)) {
      if (g.arc(e).head == to) return e;
    }
  } else {
    for (ArcId e : g.in_arcs(to)) {
      if (g.arc(e).tail == from) return e;
    }
  }
  return kNoArc;
}

void merge_tags(Tags& acc, const Tags& next, bool first) {
  if (first) {
    acc = next;
    return;
  }
  for (const auto& [key, value] : next) {
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(key, value);
      continue;
    }
    std::string& cur = it->second;
    bool present = false;
    std::size_t start = 0;
    while (start <= cur.size()) {
      const std::size_t end = std::min(cur.find(';', start), cur.size());
      if (cur.compare(start, end - start, value) == 0) {
        present = true;
        break;
      }
      start = end + 1;
    }
    if (!present) cur += ";" + value;
  }
}

Arc merge_path(const Graph& g, const std::vector<NodeId>& seq, std::size_t from, std::size_t to,
               bool reverse) {
  Arc merged;
  merged.cost = 0.0;
  bool first = true;
  for (std::size_t i = from; i < to; ++i) {
    const NodeId x = reverse ? seq[i + 1] : seq[i];
    const NodeId y = reverse ? seq[i] : seq[i + 1];
    const Arc& a = g.arc(find_arc(g, x, y));
    merged.cost += a.cost;
    merge_tags(merged.tags, a.tags, first);
    first = false;
  }
  merged.tail = reverse ? seq[to] : seq[from];
  merged.head = reverse ? seq[from] : seq[to];
  return merged;
}

}  // namespace

Subgraph simplify_chains(const Graph& g, const std::set<NodeId>& protected_nodes) {
  const std::size_t n = g.node_count();
  std::vector<PassInfo> info(n);
  for (NodeId v = 0; v < n; ++v) {
    if (!protected_nodes.contains(v)) info[v] = classify(g, v);
  }
  auto passes = [&](NodeId v) { return info[v].kind != PassKind::None; };

  std::vector<bool> removed(n, false);
  std::vector<bool> visited(n, false);
  std::vector<Arc> new_arcs;

  for (NodeId start = 0; start < n; ++start) {
    if (!passes(start) || visited[start]) continue;
    const bool two_way = info[start].kind == PassKind::TwoWay;

    // Next node along the run when arriving at `cur` from `prev`.
    auto next_along = [&](NodeId prev, NodeId cur) -> NodeId {
      if (!two_way) return info[cur].b;
      return info[cur].a == prev ? info[cur].b : info[cur].a;
    };
    auto continues = [&](NodeId v) { return info[v].kind == info[start].kind; };

    // Walk against the run direction to its first anchor, or all the way
    // around a pure cycle.
    NodeId anchor = kNoNode;
    NodeId first = start;
    {
      NodeId ahead = info[start].b;
      NodeId cur = start;
      while (true) {
        const NodeId back = two_way ? next_along(ahead, cur) : info[cur].a;
        if (!continues(back)) {
          anchor = back;
          break;
        }
        if (back == start) break;
        ahead = cur;
        cur = back;
      }
      first = cur;
    }

    std::vector<NodeId> seq;
    if (anchor == kNoNode) {
      // Pure cycle: anchor at its smallest node.
      std::vector<NodeId> ring{start};
      NodeId p = two_way ? info[start].a : kNoNode;
      NodeId c = start;
      while (true) {
        const NodeId nx = next_along(p, c);
        if (nx == start) break;
        ring.push_back(nx);
        p = c;
        c = nx;
      }
      std::rotate(ring.begin(), std::min_element(ring.begin(), ring.end()), ring.end());
      for (NodeId v : ring) visited[v] = true;
      seq = ring;
      seq.push_back(ring.front());
      for (std::size_t i = 1; i + 1 < seq.size(); ++i) removed[seq[i]] = true;
    } else {
      seq.push_back(anchor);
      NodeId p = anchor;
      NodeId c = first;
      while (true) {
        seq.push_back(c);
        visited[c] = true;
        removed[c] = true;
        const NodeId nx = next_along(p, c);
        if (!continues(nx) || visited[nx]) {
          seq.push_back(nx);
          break;
        }
        p = c;
        c = nx;
      }
    }

    const std::size_t last = seq.size() - 1;
    if (seq.front() != seq.back()) {
      new_arcs.push_back(merge_path(g, seq, 0, last, false));
      if (two_way) new_arcs.push_back(merge_path(g, seq, 0, last, true));
      continue;
    }

    // Closed run: keep the most central interior node so no self-loop forms.
    std::vector<double> prefix(seq.size(), 0.0);
    for (std::size_t i = 0; i < last; ++i) {
      prefix[i + 1] = prefix[i] + g.arc(find_arc(g, seq[i], seq[i + 1])).cost;
    }
    std::size_t keep = 1;
    double best = -1.0;
    for (std::size_t i = 1; i < last; ++i) {
      const double score = std::min(prefix[i], prefix[last] - prefix[i]);
      if (score > best) {
        best = score;
        keep = i;
      }
    }
    removed[seq[keep]] = false;
    new_arcs.push_back(merge_path(g, seq, 0, keep, false));
    new_arcs.push_back(merge_path(g, seq, keep, last, false));
    if (two_way) {
      new_arcs.push_back(merge_path(g, seq, 0, keep, true));
      new_arcs.push_back(merge_path(g, seq, keep, last, true));
    }
  }

  Subgraph out;
  out.old_to_new.assign(n, kNoNode);
  std::vector<Node> nodes;
  for (NodeId v = 0; v < n; ++v) {
    if (removed[v]) continue;
    out.old_to_new[v] = static_cast<NodeId>(nodes.size());
    nodes.push_back(g.node(v));
  }
  std::vector<Arc> arcs;
  auto remap = [&](Arc a) {
    a.tail = out.old_to_new[a.tail];
    a.head = out.old_to_new[a.head];
    arcs.push_back(std::move(a));
  };
  for (const Arc& a : g.arcs()) {
    if (!removed[a.tail] && !removed[a.head]) remap(a);
  }
  for (Arc& a : new_arcs) remap(std::move(a));
  out.graph = Graph::build(std::move(nodes), std::move(arcs));
  return out;
}

Graph make_bidirectional(const Graph& g) {
  std::set<std::pair<NodeId, NodeId>> present;
  for (const Arc& a : g.arcs()) present.emplace(a.tail, a.head);
  std::vector<Arc> arcs = g.arcs();
  for (const Arc& a : g.arcs()) {
    if (!present.contains({a.head, a.tail})) arcs.push_back(Arc{a.head, a.tail, a.cost, a.tags});
  }
  return Graph::build(g.nodes(), std::move(arcs));
}

}  // namespace netequil
