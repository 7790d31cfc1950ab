#include "netequil/mcf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "netequil/error.hpp"
#include "netequil/shortest_paths.hpp"

namespace netequil {

namespace {

// A phase stops its Dijkstra once the deficits settled so far could absorb
// this share of the remaining excess.
constexpr double kStopFraction = 0.3;
constexpr int kPriceRounds = 60;

// Residual arcs are encoded as 2*e (forward, along arc e) and 2*e+1
// (backward, cancelling flow on e).
using ResidualArc = std::uint64_t;
constexpr ResidualArc kNoResidual = std::numeric_limits<ResidualArc>::max();

struct Label {
  double dist;
  NodeId rank;
  NodeId node;
  NodeId root;
  bool operator>(const Label& o) const {
    if (dist != o.dist) return dist > o.dist;
    return rank != o.rank ? rank > o.rank : root > o.root;
  }
};

struct HeapEntry {
  double dist;
  NodeId rank;
  NodeId node;
  bool operator>(const HeapEntry& o) const {
    return dist != o.dist ? dist > o.dist : rank > o.rank;
  }
};

// Residual arc as seen from its tail: cost is negated for backward arcs.
struct Step {
  double cost;
  NodeId to;
  ResidualArc code;
};

class SuccessiveShortestPaths {
 public:
  SuccessiveShortestPaths(const Graph& g, std::vector<double> excess, SolveOrder order)
      : g_(g),
        n_(static_cast<NodeId>(g.node_count())),
        order_(order),
        excess_(std::move(excess)),
        flow_(g.arc_count(), 0.0),
        pot_(n_, 0.0),
        dist_(n_, kInfinity),
        parent_(n_, kNoResidual),
        settled_(n_, 0),
        dead_(n_, 0),
        position_(n_, 0),
        cursor_(n_, 0) {
    double supply = 0.0;
    for (double z : excess_) supply += std::max(z, 0.0);
    eps_ = 1e-14 * std::max(1.0, supply);
    residual_tol_ = 1e-9 * std::max(1.0, supply);

    // Residual adjacency in scan order: out arcs then in arcs, reversed for
    // the descending order.
    first_.assign(n_ + 1, 0);
    steps_.reserve(2 * g.arc_count());
    for (NodeId u = 0; u < n_; ++u) {
      const std::size_t begin = steps_.size();
      for (ArcId e : g.out_arcs(u)) steps_.push_back({g.arc(e).cost, g.arc(e).head, ResidualArc{e} << 1});
      for (ArcId e : g.in_arcs(u)) {
        steps_.push_back({-g.arc(e).cost, g.arc(e).tail, (ResidualArc{e} << 1) | 1});
      }
      if (order_ == SolveOrder::Descending) std::reverse(steps_.begin() + begin, steps_.end());
      first_[u + 1] = steps_.size();
    }
    for (NodeId v = 0; v < n_; ++v) {
      if (excess_[v] > eps_) sources_.push_back(v);
    }
    if (order_ == SolveOrder::Descending) std::reverse(sources_.begin(), sources_.end());
  }

  void run() {
    while (true) {
      // Excess only ever leaves sources, so the list just shrinks.
      std::erase_if(sources_, [&](NodeId v) { return !(excess_[v] > eps_); });
      double remaining = 0.0;
      for (NodeId v : sources_) remaining += excess_[v];
      if (sources_.empty()) return;
      const bool ok = phase(remaining);
      if (!ok) {
        if (remaining <= residual_tol_) return;
        throw Error(ErrorKind::Disconnected,
                    "remaining excess " + std::to_string(remaining) + " cannot reach any deficit");
      }
    }
  }

  // Prices the sources so each one's nearest-deficit territory roughly
  // matches its supply, then serves every deficit along the shortest-path
  // forest of those prices. Potentials equal to the forest labels keep
  // every residual reduced cost nonnegative and the forest arcs tight, so
  // the phases that follow only repair the leftover imbalance.
  //
  // The prices maximize the concave dual
  //   sum_v demand_v * label_v - sum_s supply_s * price_s
  // by damped Newton steps. Raising a source's price hands deficits whose
  // runner-up source is only slightly dearer to that runner-up, so those
  // masses, weighted by how close the runner-up is, form a Laplacian over
  // neighboring sources that stands in for the Hessian.
  void warm_start(int rounds) {
    if (sources_.size() < 2) return;
    const std::size_t k = sources_.size();
    std::vector<std::uint32_t> slot(n_, 0);
    for (std::size_t i = 0; i < k; ++i) slot[sources_[i]] = static_cast<std::uint32_t>(i);
    std::vector<double> label(n_, 0.0);
    std::vector<double> best_label = label;
    std::vector<double> demand(k);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    double best_value = -kInfinity;
    double radius = 0.0;
    auto move = [&] {
      const double big = step.cwiseAbs().maxCoeff();
      const double f = big > radius ? radius / big : 1.0;
      for (std::size_t i = 0; i < k; ++i) label[sources_[i]] = best_label[sources_[i]] + f * step[i];
    };
    for (int round = 0; round <= rounds; ++round) {
      forest(label);
      std::fill(demand.begin(), demand.end(), 0.0);
      double value = 0.0;
      double margin_sum = 0.0;
      double margin_mass = 0.0;
      for (NodeId v : settle_order_) {
        if (!(excess_[v] < -eps_) || root_[v] == v) continue;
        demand[slot[root_[v]]] += -excess_[v];
        value += -excess_[v] * dist_[v];
        if (runner_root_[v] != kNoNode) {
          margin_sum += -excess_[v] * (runner_dist_[v] - dist_[v]);
          margin_mass += -excess_[v];
        }
      }
      double imbalance = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        value -= label[sources_[i]] * excess_[sources_[i]];
        imbalance += std::abs(demand[i] - excess_[sources_[i]]);
      }
      if (!(value > best_value)) {
        // No ascent: retry from the best point with half the radius.
        radius *= 0.5;
        if (round == rounds || radius <= 1e-12 * std::max(1.0, std::abs(best_value) / k)) break;
        move();
        continue;
      }
      best_value = value;
      best_label = label;
      if (round == rounds || imbalance <= eps_ || margin_mass <= 0.0) break;

      const double h = margin_sum / margin_mass;
      std::vector<Eigen::Triplet<double>> entries;
      std::vector<double> diag(k, 0.0);
      for (NodeId v : settle_order_) {
        if (!(excess_[v] < -eps_) || root_[v] == v || runner_root_[v] == kNoNode) continue;
        const double w = -excess_[v] / h * std::exp(-(runner_dist_[v] - dist_[v]) / h);
        const std::uint32_t i = slot[root_[v]];
        const std::uint32_t j = slot[runner_root_[v]];
        entries.emplace_back(i, j, -w);
        entries.emplace_back(j, i, -w);
        diag[i] += w;
        diag[j] += w;
      }
      double ridge = 0.0;
      for (double d : diag) ridge += d;
      ridge = std::max(1e-3 * ridge / k, 1e-300);
      Eigen::VectorXd gradient(static_cast<Eigen::Index>(k));
      for (std::size_t i = 0; i < k; ++i) {
        entries.emplace_back(i, i, diag[i] + ridge);
        gradient[i] = demand[i] - excess_[sources_[i]];
      }
      Eigen::SparseMatrix<double> laplacian(k, k);
      laplacian.setFromTriplets(entries.begin(), entries.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(laplacian);
      if (solver.info() != Eigen::Success) break;
      step = solver.solve(gradient);
      radius = radius == 0.0 ? 20.0 * h : 1.5 * radius;
      move();
    }
    label = best_label;
    forest(label);

    // Potentials from the labels; unreached nodes sit above every label.
    double top = 0.0;
    for (NodeId v : settle_order_) top = std::max(top, dist_[v]);
    for (NodeId v = 0; v < n_; ++v) pot_[v] = settled_[v] == stamp_ ? dist_[v] : top;

    // Serve each deficit from its root: subtree demand flows down each tree
    // arc.
    std::vector<double> below(n_, 0.0);
    for (auto it = settle_order_.rbegin(); it != settle_order_.rend(); ++it) {
      const NodeId v = *it;
      if (root_[v] != v && excess_[v] < -eps_) {
        below[v] += -excess_[v];
        excess_[root_[v]] += excess_[v];
        excess_[v] = 0.0;
      }
      if (parent_[v] == kNoResidual) continue;
      const ResidualArc code = parent_[v];
      flow_[code >> 1] += below[v];
      below[residual_tail(code)] += below[v];
    }
    sources_.clear();
    for (NodeId v = 0; v < n_; ++v) {
      if (excess_[v] > eps_) sources_.push_back(v);
    }
    if (order_ == SolveOrder::Descending) std::reverse(sources_.begin(), sources_.end());
  }

  // Multi-source Dijkstra over forward arcs seeded with label[s] at each
  // source. Every node gets its nearest root (dist_, parent_, root_, in
  // settle_order_) and the nearest label from any other root (runner_dist_,
  // runner_root_).
  void forest(const std::vector<double>& label) {
    ++stamp_;
    for (NodeId v : touched_) {
      dist_[v] = kInfinity;
      parent_[v] = kNoResidual;
      root_[v] = kNoNode;
      runner_dist_[v] = kInfinity;
      runner_root_[v] = kNoNode;
      runner_done_[v] = 0;
    }
    if (root_.size() != n_) {
      root_.assign(n_, kNoNode);
      runner_dist_.assign(n_, kInfinity);
      runner_root_.assign(n_, kNoNode);
      runner_done_.assign(n_, 0);
    }
    touched_.clear();
    settle_order_.clear();
    labels_.clear();
    auto offer = [&](NodeId w, double d, NodeId r, ResidualArc code) {
      if (dist_[w] == kInfinity && runner_dist_[w] == kInfinity) touched_.push_back(w);
      if (r == root_[w]) {
        if (settled_[w] == stamp_ || !(d < dist_[w])) return;
        dist_[w] = d;
        parent_[w] = code;
      } else if (settled_[w] != stamp_ && d < dist_[w]) {
        if (root_[w] != kNoNode) {
          runner_dist_[w] = dist_[w];
          runner_root_[w] = root_[w];
        }
        dist_[w] = d;
        root_[w] = r;
        parent_[w] = code;
      } else if (!runner_done_[w] && d < runner_dist_[w]) {
        runner_dist_[w] = d;
        runner_root_[w] = r;
      } else {
        return;
      }
      labels_.push_back({d, rank(w), w, r});
      std::push_heap(labels_.begin(), labels_.end(), std::greater<>());
    };
    for (NodeId s : sources_) offer(s, label[s], s, kNoResidual);
    while (!labels_.empty()) {
      std::pop_heap(labels_.begin(), labels_.end(), std::greater<>());
      const Label top = labels_.back();
      labels_.pop_back();
      const NodeId u = top.node;
      NodeId from = top.root;
      if (settled_[u] != stamp_) {
        if (top.root == runner_root_[u] && top.dist == runner_dist_[u] && top.dist == dist_[u]) {
          // The runner-up tied and popped first. Settle the best label now,
          // since best parent chains must stay within one root, and queue
          // the runner-up again.
          from = root_[u];
          labels_.push_back(top);
          std::push_heap(labels_.begin(), labels_.end(), std::greater<>());
        } else if (top.root != root_[u] || top.dist != dist_[u]) {
          continue;
        }
        settled_[u] = stamp_;
        settle_order_.push_back(u);
      } else {
        if (runner_done_[u] || top.root != runner_root_[u] || top.dist != runner_dist_[u]) continue;
        runner_done_[u] = 1;
      }
      for (std::size_t k = first_[u]; k < first_[u + 1]; ++k) {
        const Step& s = steps_[k];
        if (s.code & 1) continue;
        offer(s.to, top.dist + s.cost, from, s.code);
      }
    }
  }

  FlowSolution solution(std::optional<NodeId> reference) const {
    FlowSolution s;
    s.flow = flow_;
    s.potential.resize(n_);
    for (NodeId v = 0; v < n_; ++v) s.potential[v] = pot_[v] + offset_;
    std::uint32_t count = 0;
    const auto label = weak_components(g_, &count);
    std::vector<NodeId> anchor(count, kNoNode);
    if (reference && *reference < n_) anchor[label[*reference]] = *reference;
    for (NodeId v = 0; v < n_; ++v) {
      if (anchor[label[v]] == kNoNode) anchor[label[v]] = v;
    }
    std::vector<double> shift(count);
    for (std::uint32_t c = 0; c < count; ++c) shift[c] = s.potential[anchor[c]];
    for (NodeId v = 0; v < n_; ++v) s.potential[v] -= shift[label[v]];
    for (ArcId e = 0; e < g_.arc_count(); ++e) s.total_cost += g_.arc(e).cost * flow_[e];
    return s;
  }

 private:
  NodeId rank(NodeId v) const { return order_ == SolveOrder::Ascending ? v : n_ - 1 - v; }
  bool prefer(ResidualArc a, ResidualArc b) const {
    if (b == kNoResidual) return true;
    return order_ == SolveOrder::Ascending ? a < b : a > b;
  }
  bool open(const Step& s) const { return !(s.code & 1) || flow_[s.code >> 1] > eps_; }
  double reduced(NodeId u, const Step& s) const { return std::max(0.0, s.cost + pot_[u] - pot_[s.to]); }

  // One Dijkstra over the residual network from every source, then a
  // blocking flow on its tight arcs. Returns false if no deficit was
  // reachable.
  bool phase(double remaining) {
    ++stamp_;
    for (NodeId v : touched_) {
      dist_[v] = kInfinity;
      parent_[v] = kNoResidual;
    }
    touched_.clear();
    settle_order_.clear();
    heap_.clear();
    for (NodeId v : sources_) {
      dist_[v] = 0.0;
      touched_.push_back(v);
      heap_.push_back({0.0, rank(v), v});
    }
    std::make_heap(heap_.begin(), heap_.end(), std::greater<>());

    double absorbed = 0.0;
    double last = 0.0;
    bool reached_deficit = false;
    level_.clear();
    while (!heap_.empty() || !level_.empty()) {
      NodeId u;
      if (!level_.empty()) {
        u = level_.back();
        level_.pop_back();
        if (settled_[u] == stamp_) continue;
      } else {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
        const HeapEntry top = heap_.back();
        heap_.pop_back();
        u = top.node;
        if (settled_[u] == stamp_ || top.dist != dist_[u]) continue;
      }
      settled_[u] = stamp_;
      settle_order_.push_back(u);
      last = dist_[u];
      if (excess_[u] < -eps_) {
        reached_deficit = true;
        absorbed += -excess_[u];
        if (absorbed >= kStopFraction * remaining) break;
      }
      for (std::size_t k = first_[u]; k < first_[u + 1]; ++k) {
        const Step& s = steps_[k];
        if (settled_[s.to] == stamp_ || !open(s)) continue;
        const double nd = dist_[u] + reduced(u, s);
        const NodeId w = s.to;
        if (nd < dist_[w]) {
          if (dist_[w] == kInfinity) touched_.push_back(w);
          dist_[w] = nd;
          parent_[w] = s.code;
          if (nd == last) {
            // Tight arcs from the current level skip the heap.
            level_.push_back(w);
          } else {
            heap_.push_back({nd, rank(w), w});
            std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
          }
        } else if (nd == dist_[w] && prefer(s.code, parent_[w])) {
          parent_[w] = s.code;
        }
      }
    }
    if (!reached_deficit) return false;

    block_flow();

    // Raise potentials by min(dist, last); stored relative to a global offset
    // so only settled nodes need touching.
    offset_ += last;
    for (NodeId v : settle_order_) pot_[v] += dist_[v] - last;
    return true;
  }

  // Node a residual arc starts from.
  NodeId residual_tail(ResidualArc code) const {
    const Arc& a = g_.arc(static_cast<ArcId>(code >> 1));
    return (code & 1) ? a.head : a.tail;
  }

  // Tight residual arc of this phase's shortest-path DAG. Requiring the head
  // to settle later keeps the DAG acyclic under zero-cost ties.
  bool admissible(NodeId u, const Step& s) const {
    const NodeId w = s.to;
    if (settled_[w] != stamp_ || position_[w] <= position_[u] || dead_[w] == stamp_) return false;
    return open(s) && dist_[u] + reduced(u, s) == dist_[w];
  }

  // Saturates the DAG: depth-first augmenting paths with current-arc
  // pointers from each source in settle order. Every augmentation empties a
  // source, fills a sink or saturates a backward arc, and a node whose arcs
  // are exhausted is never entered again this phase.
  void block_flow() {
    for (std::size_t i = 0; i < settle_order_.size(); ++i) {
      const NodeId v = settle_order_[i];
      position_[v] = static_cast<NodeId>(i);
      cursor_[v] = first_[v];
    }
    std::vector<ResidualArc>& path = path_;
    for (NodeId s : settle_order_) {
      if (dist_[s] != 0.0) break;
      if (!(excess_[s] > eps_) || dead_[s] == stamp_) continue;
      path.clear();
      NodeId u = s;
      while (excess_[s] > eps_) {
        if (u != s && excess_[u] < -eps_) {
          u = push_along(path, s, u);
          continue;
        }
        const std::size_t end = first_[u + 1];
        while (cursor_[u] < end && !admissible(u, steps_[cursor_[u]])) ++cursor_[u];
        if (cursor_[u] < end) {
          const Step& step = steps_[cursor_[u]];
          path.push_back(step.code);
          u = step.to;
          continue;
        }
        dead_[u] = stamp_;
        if (path.empty()) break;
        u = residual_tail(path.back());
        path.pop_back();
      }
    }
  }

  // Pushes the path's bottleneck from s to sink t and returns the node to
  // resume from: the tail of the first saturated arc, else t.
  NodeId push_along(std::vector<ResidualArc>& path, NodeId s, NodeId t) {
    double amount = std::min(excess_[s], -excess_[t]);
    for (ResidualArc code : path) {
      if (code & 1) amount = std::min(amount, flow_[code >> 1]);
    }
    std::size_t cut = path.size();
    for (std::size_t i = 0; i < path.size(); ++i) {
      const ResidualArc code = path[i];
      double& f = flow_[code >> 1];
      if (code & 1) {
        f -= amount;
        if (f <= eps_) {
          f = 0.0;
          cut = std::min(cut, i);
        }
      } else {
        f += amount;
      }
    }
    excess_[s] -= amount;
    excess_[t] += amount;
    if (excess_[s] <= eps_) excess_[s] = 0.0;
    if (std::abs(excess_[t]) <= eps_) excess_[t] = 0.0;
    if (cut == path.size()) return t;
    const NodeId resume = residual_tail(path[cut]);
    path.resize(cut);
    return resume;
  }

  const Graph& g_;
  const NodeId n_;
  const SolveOrder order_;
  std::vector<double> excess_;
  std::vector<double> flow_;
  std::vector<double> pot_;
  double offset_ = 0.0;
  std::vector<std::size_t> first_;
  std::vector<Step> steps_;
  std::vector<NodeId> sources_;
  std::vector<double> dist_;
  std::vector<ResidualArc> parent_;
  std::vector<std::uint32_t> settled_;
  std::vector<std::uint32_t> dead_;
  std::vector<NodeId> position_;
  std::vector<std::size_t> cursor_;
  std::uint32_t stamp_ = 0;
  std::vector<NodeId> touched_;
  std::vector<NodeId> settle_order_;
  std::vector<HeapEntry> heap_;
  std::vector<NodeId> level_;
  std::vector<ResidualArc> path_;
  double eps_ = 0.0;
  double residual_tol_ = 0.0;
  std::vector<NodeId> root_;
  std::vector<double> runner_dist_;
  std::vector<NodeId> runner_root_;
  std::vector<std::uint8_t> runner_done_;
  std::vector<Label> labels_;
};

}  // namespace

FlowSolution solve_mcf(const FlowProblem& p, const SolveOptions& options) {
  if (!p.graph) throw Error(ErrorKind::InvalidArgument, "flow problem without graph");
  const Graph& g = *p.graph;
  if (p.excess.size() != g.node_count()) {
    throw Error(ErrorKind::DimensionMismatch, "excess has " + std::to_string(p.excess.size()) +
                                                  " entries for " +
                                                  std::to_string(g.node_count()) + " nodes");
  }
  double sum = 0.0;
  double magnitude = 0.0;
  for (double z : p.excess) {
    if (!std::isfinite(z)) throw Error(ErrorKind::InvalidArgument, "non-finite excess");
    sum += z;
    magnitude += std::abs(z);
  }
  if (std::abs(sum) > 1e-9 * std::max(1.0, magnitude)) {
    throw Error(ErrorKind::Unbalanced, "excess sums to " + std::to_string(sum));
  }
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    if (!(g.arc(e).cost >= 0.0)) throw Error(ErrorKind::NegativeCost, "arc " + std::to_string(e));
  }

  SuccessiveShortestPaths ssp(g, p.excess, options.order);
  if (options.warm_start.value_or(g.node_count() >= kWarmStartNodes)) ssp.warm_start(kPriceRounds);
  ssp.run();
  return ssp.solution(options.reference);
}

SlacknessReport verify_slackness(const FlowProblem& p, const FlowSolution& s, double tol) {
  if (!p.graph) throw Error(ErrorKind::InvalidArgument, "flow problem without graph");
  const Graph& g = *p.graph;
  if (p.excess.size() != g.node_count() || s.potential.size() != g.node_count() ||
      s.flow.size() != g.arc_count()) {
    throw Error(ErrorKind::DimensionMismatch, "solution does not match problem dimensions");
  }
  SlacknessReport r;
  std::vector<double> net(g.node_count(), 0.0);
  bool negative_flow = false;
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    const Arc& a = g.arc(e);
    const double slack = s.potential[a.head] - s.potential[a.tail] - a.cost;
    r.max_dual_violation = std::max(r.max_dual_violation, slack);
    if (s.flow[e] > 0.0) r.max_support_gap = std::max(r.max_support_gap, std::abs(slack));
    if (s.flow[e] < 0.0) negative_flow = true;
    net[a.tail] += s.flow[e];
    net[a.head] -= s.flow[e];
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    r.max_conservation_residual = std::max(r.max_conservation_residual, std::abs(net[v] - p.excess[v]));
  }
  r.optimal = !negative_flow && r.max_dual_violation <= tol && r.max_support_gap <= tol &&
              r.max_conservation_residual <= tol;
  return r;
}

double oracle_min_cost(const FlowProblem& p) {
  if (!p.graph) throw Error(ErrorKind::InvalidArgument, "flow problem without graph");
  const Graph& g = *p.graph;
  if (p.excess.size() != g.node_count()) throw Error(ErrorKind::DimensionMismatch, "excess size");
  std::vector<NodeId> supply_units;
  std::vector<NodeId> demand_units;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double z = p.excess[v];
    if (z != std::round(z)) throw Error(ErrorKind::InvalidArgument, "non-integral excess");
    const auto units = static_cast<long long>(std::abs(z));
    if (units > 8) throw Error(ErrorKind::TooLarge, "more than 8 units at a node");
    for (long long k = 0; k < units; ++k) (z > 0 ? supply_units : demand_units).push_back(v);
    if (supply_units.size() > 8 || demand_units.size() > 8) {
      throw Error(ErrorKind::TooLarge, "oracle enumerates at most 8 units");
    }
  }
  if (supply_units.size() != demand_units.size()) {
    throw Error(ErrorKind::InvalidArgument, "oracle needs balanced integral excess");
  }
  if (supply_units.empty()) return 0.0;

  const auto table = geodesic_matrix(g, supply_units, demand_units, 1);
  std::vector<std::size_t> perm(demand_units.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  double best = kInfinity;
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) cost += table[i][perm[i]];
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best == kInfinity) throw Error(ErrorKind::Disconnected, "no feasible pairing");
  return best;
}

}  // namespace netequil
