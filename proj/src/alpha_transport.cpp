#include "netequil/alpha_transport.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <tuple>

#include "netequil/error.hpp"
#include "netequil/shortest_paths.hpp"

namespace netequil {

double TransportProblem::cost(std::size_t buyer, std::size_t seller) const {
  const auto& row = rows[buyer];
  const auto it = std::lower_bound(row.begin(), row.end(), seller,
                                   [](const TransportEntry& e, std::size_t s) { return e.seller < s; });
  return (it != row.end() && it->seller == seller) ? it->cost : kInfinity;
}

namespace {

double powered(double d, double alpha) {
  if (d == 0.0) return 0.0;
  return alpha == 1.0 ? d : std::pow(d, alpha);
}

}  // namespace

TransportProblem build_transport(const Graph& g, std::span<const Buyer> buyers,
                                 std::span<const Seller> sellers, double alpha,
                                 const TransportOptions& options) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::NegativeAlpha, "alpha must be >= 1, got " + std::to_string(alpha));
  }
  TransportProblem tp;
  tp.alpha = alpha;
  double demand = 0.0;
  double supply = 0.0;
  std::vector<NodeId> buyer_nodes;
  std::vector<NodeId> seller_nodes;
  for (const Buyer& b : buyers) {
    if (b.node >= g.node_count()) throw Error(ErrorKind::UnknownNode, "buyer node");
    tp.demand.push_back(b.mass);
    buyer_nodes.push_back(b.node);
    demand += b.mass;
  }
  for (const Seller& s : sellers) {
    if (s.node >= g.node_count()) throw Error(ErrorKind::UnknownNode, "seller node");
    if (!s.observed_supply) {
      throw Error(ErrorKind::MixedSellerModes, "seller " + s.label + " has no supply");
    }
    tp.supply.push_back(*s.observed_supply);
    seller_nodes.push_back(s.node);
    supply += *s.observed_supply;
  }
  if (std::abs(supply - demand) > 1e-9 * std::max({1.0, supply, demand})) {
    throw Error(ErrorKind::Unbalanced, "supply " + std::to_string(supply) + " vs demand " +
                                           std::to_string(demand));
  }

  const std::size_t nb = buyers.size();
  const std::size_t ns = sellers.size();
  tp.rows.assign(nb, {});
  if (nb * ns <= options.max_dense_cells) {
    const auto table = geodesic_matrix(g, seller_nodes, buyer_nodes, options.threads);
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = 0; j < ns; ++j) {
        if (table[j][i] == kInfinity) continue;
        tp.rows[i].push_back({static_cast<std::uint32_t>(j), powered(table[j][i], alpha)});
      }
    }
    return tp;
  }

  // Sparse: keep the k nearest sellers per buyer, ties to the smaller index.
  tp.sparsified = true;
  const std::size_t k = std::max<std::size_t>(1, options.k_nearest);
  using Candidate = std::pair<double, std::uint32_t>;
  std::vector<std::priority_queue<Candidate>> best(nb);
  const std::size_t batch = resolve_threads(options.threads);
  for (std::size_t first = 0; first < ns; first += batch) {
    const std::size_t count = std::min(batch, ns - first);
    const auto table = geodesic_matrix(
        g, std::span<const NodeId>(seller_nodes).subspan(first, count), buyer_nodes, options.threads);
    for (std::size_t r = 0; r < count; ++r) {
      const auto j = static_cast<std::uint32_t>(first + r);
      for (std::size_t i = 0; i < nb; ++i) {
        const double d = table[r][i];
        if (d == kInfinity) continue;
        auto& heap = best[i];
        if (heap.size() < k) {
          heap.emplace(d, j);
        } else if (Candidate{d, j} < heap.top()) {
          heap.pop();
          heap.emplace(d, j);
        }
      }
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    auto& heap = best[i];
    while (!heap.empty()) {
      tp.rows[i].push_back({heap.top().second, powered(heap.top().first, alpha)});
      heap.pop();
    }
    std::sort(tp.rows[i].begin(), tp.rows[i].end(),
              [](const TransportEntry& a, const TransportEntry& b) { return a.seller < b.seller; });
  }
  return tp;
}

FlowProblem transport_flow_problem(const TransportProblem& tp) {
  const std::size_t ns = tp.seller_count();
  const std::size_t nb = tp.buyer_count();
  std::vector<Node> nodes(ns + nb);
  std::vector<Arc> arcs;
  // Seller-major arc order.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> by_seller(ns);
  for (std::size_t i = 0; i < nb; ++i) {
    for (const TransportEntry& e : tp.rows[i]) {
      by_seller[e.seller].emplace_back(static_cast<std::uint32_t>(i), e.cost);
    }
  }
  for (std::size_t j = 0; j < ns; ++j) {
    for (const auto& [i, c] : by_seller[j]) {
      arcs.push_back(Arc{static_cast<NodeId>(j), static_cast<NodeId>(ns + i), c, {}});
    }
  }
  FlowProblem p;
  p.graph = std::make_shared<const Graph>(Graph::build(std::move(nodes), std::move(arcs)));
  p.excess.resize(ns + nb);
  for (std::size_t j = 0; j < ns; ++j) p.excess[j] = tp.supply[j];
  for (std::size_t i = 0; i < nb; ++i) p.excess[ns + i] = -tp.demand[i];
  return p;
}

TransportPlan solve_transport(const TransportProblem& tp, SolveOrder order) {
  const FlowProblem p = transport_flow_problem(tp);
  FlowSolution s;
  SolveOptions options;
  options.order = order;
  try {
    s = solve_mcf(p, options);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Disconnected) throw Error(ErrorKind::Infeasible, e.what());
    throw;
  }

  const std::size_t ns = tp.seller_count();
  const Graph& g = *p.graph;
  TransportPlan plan;
  for (ArcId e = 0; e < g.arc_count(); ++e) {
    if (s.flow[e] <= 0.0) continue;
    const Arc& a = g.arc(e);
    plan.cells.push_back({static_cast<std::uint32_t>(a.head - ns), a.tail, s.flow[e]});
  }
  std::sort(plan.cells.begin(), plan.cells.end(), [](const TransportCell& a, const TransportCell& b) {
    return std::tie(a.buyer, a.seller) < std::tie(b.buyer, b.seller);
  });
  plan.total_cost = s.total_cost;
  plan.seller_potential.assign(s.potential.begin(), s.potential.begin() + ns);
  plan.buyer_potential.assign(s.potential.begin() + ns, s.potential.end());
  return plan;
}

PowerDiagram extract_power_diagram(const TransportPlan& plan, std::size_t buyer_count,
                                   double tie_tol) {
  PowerDiagram diagram;
  diagram.assignment.resize(buyer_count);
  std::vector<double> mass(buyer_count, 0.0);
  for (const TransportCell& c : plan.cells) mass[c.buyer] += c.weight;
  for (const TransportCell& c : plan.cells) {
    auto& a = diagram.assignment[c.buyer];
    if (c.weight >= (1.0 - tie_tol) * mass[c.buyer]) {
      a.seller = c.seller;
    }
  }
  for (const TransportCell& c : plan.cells) {
    auto& a = diagram.assignment[c.buyer];
    if (!a.seller) a.split.push_back(c.seller);
  }
  for (const auto& a : diagram.assignment) {
    if (!a.split.empty()) ++diagram.split_count;
  }
  return diagram;
}

TransportDegeneracy probe_degeneracy(const TransportProblem& tp) {
  TransportDegeneracy probe;
  probe.ascending = solve_transport(tp, SolveOrder::Ascending);
  probe.descending = solve_transport(tp, SolveOrder::Descending);
  auto support = [](const TransportPlan& plan) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
    for (const TransportCell& c : plan.cells) cells.emplace_back(c.buyer, c.seller);
    return cells;
  };
  probe.degenerate = support(probe.ascending) != support(probe.descending);
  return probe;
}

FlowDegeneracy probe_degeneracy(const FlowProblem& p) {
  FlowDegeneracy probe;
  probe.ascending = solve_mcf(p, {SolveOrder::Ascending, std::nullopt, std::nullopt});
  probe.descending = solve_mcf(p, {SolveOrder::Descending, std::nullopt, std::nullopt});
  for (std::size_t e = 0; e < probe.ascending.flow.size(); ++e) {
    if ((probe.ascending.flow[e] > 0.0) != (probe.descending.flow[e] > 0.0)) {
      probe.degenerate = true;
      break;
    }
  }
  return probe;
}

}  // namespace netequil
