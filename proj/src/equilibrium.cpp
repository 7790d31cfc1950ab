#include "netequil/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netequil/error.hpp"

namespace netequil {

Graph Market::road_graph() const {
  std::vector<Node> nodes(graph->nodes().begin(), graph->nodes().begin() + outside_node);
  std::vector<Arc> arcs(graph->arcs().begin(), graph->arcs().begin() + road_arc_count);
  return Graph::build(std::move(nodes), std::move(arcs));
}

Market build_market(const Graph& g, std::vector<Buyer> buyers, std::vector<Seller> sellers,
                    MarketMode mode) {
  const std::size_t n = g.node_count();
  double demand = 0.0;
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    const Buyer& b = buyers[i];
    if (b.node >= n) throw Error(ErrorKind::UnknownNode, "buyer " + std::to_string(i));
    if (!(b.mass > 0.0) || !std::isfinite(b.mass)) {
      throw Error(ErrorKind::InvalidArgument, "buyer " + std::to_string(i) + " mass must be > 0");
    }
    if (!(b.reservation_utility >= 0.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "buyer " + std::to_string(i) + " reservation utility must be >= 0");
    }
    demand += b.mass;
  }
  double supply = 0.0;
  for (std::size_t j = 0; j < sellers.size(); ++j) {
    const Seller& s = sellers[j];
    if (s.node >= n) throw Error(ErrorKind::UnknownNode, "seller " + std::to_string(j));
    const bool ok = mode == MarketMode::Forward ? (s.price && !s.observed_supply)
                                                : (s.observed_supply && !s.price);
    if (!ok) {
      throw Error(ErrorKind::MixedSellerModes,
                  "seller " + std::to_string(j) + " does not match the market mode");
    }
    if (mode == MarketMode::Forward && !std::isfinite(*s.price)) {
      throw Error(ErrorKind::InvalidArgument, "seller " + std::to_string(j) + " price");
    }
    if (mode == MarketMode::Inverse) {
      if (!(*s.observed_supply >= 0.0) || !std::isfinite(*s.observed_supply)) {
        throw Error(ErrorKind::InvalidArgument, "seller " + std::to_string(j) + " supply");
      }
      supply += *s.observed_supply;
    }
  }
  if (mode == MarketMode::Inverse && supply > demand + 1e-9 * std::max(1.0, demand)) {
    throw Error(ErrorKind::Unbalanced, "observed supply " + std::to_string(supply) +
                                           " exceeds buyer mass " + std::to_string(demand));
  }

  std::vector<Node> nodes = g.nodes();
  Node outside;
  outside.tags["role"] = "outside";
  nodes.push_back(std::move(outside));
  const auto outside_id = static_cast<NodeId>(n);

  std::vector<Arc> arcs = g.arcs();
  for (const Buyer& b : buyers) {
    if (b.reservation_utility == kInfinity) continue;
    arcs.push_back(Arc{outside_id, b.node, b.reservation_utility, {{"role", "outside"}}});
  }

  Market m;
  m.graph = std::make_shared<const Graph>(Graph::build(std::move(nodes), std::move(arcs)));
  m.buyers = std::move(buyers);
  m.sellers = std::move(sellers);
  m.mode = mode;
  m.outside_node = outside_id;
  m.road_arc_count = g.arc_count();
  return m;
}

ForwardEquilibrium forward_prices(const Market& m) {
  if (m.mode != MarketMode::Forward) throw Error(ErrorKind::ModeMismatch, "forward_prices");
  std::vector<Seed> seeds;
  seeds.reserve(m.sellers.size());
  for (std::uint32_t j = 0; j < m.sellers.size(); ++j) {
    seeds.push_back({m.sellers[j].node, *m.sellers[j].price, j});
  }

  // The outside node has no incoming arcs, so seeding sellers alone keeps
  // each buyer's outside option private to that buyer.
  ForwardEquilibrium eq;
  eq.tree = dijkstra(*m.graph, seeds, Direction::Forward);
  eq.prices.node_price = eq.tree.dist;
  eq.prices.node_price[m.outside_node] = 0.0;
  eq.prices.anchor = m.outside_node;
  eq.prices.seller_price.reserve(m.sellers.size());
  for (const Seller& s : m.sellers) eq.prices.seller_price.push_back(*s.price);
  eq.choice.reserve(m.buyers.size());
  eq.buyer_price.reserve(m.buyers.size());
  for (const Buyer& b : m.buyers) {
    const double delivered = eq.tree.dist[b.node];
    if (b.reservation_utility < delivered) {
      eq.choice.push_back(kOutsideChoice);
      eq.buyer_price.push_back(b.reservation_utility);
    } else {
      eq.choice.push_back(eq.tree.origin[b.node]);
      eq.buyer_price.push_back(delivered);
    }
    double& p = eq.prices.node_price[b.node];
    p = std::min(p, eq.buyer_price.back());
  }
  return eq;
}

InverseEquilibrium inverse_prices(const Market& m, SolveOrder order) {
  if (m.mode != MarketMode::Inverse) throw Error(ErrorKind::ModeMismatch, "inverse_prices");
  const std::size_t n = m.graph->node_count();
  InverseEquilibrium eq;
  eq.problem.graph = m.graph;
  eq.problem.excess.assign(n, 0.0);
  for (const Seller& s : m.sellers) eq.problem.excess[s.node] += *s.observed_supply;
  for (const Buyer& b : m.buyers) eq.problem.excess[b.node] -= b.mass;
  double residual = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    if (v != m.outside_node) residual -= eq.problem.excess[v];
  }
  eq.problem.excess[m.outside_node] = residual;

  SolveOptions options;
  options.order = order;
  options.reference = m.outside_node;
  eq.solution = solve_mcf(eq.problem, options);

  eq.prices.node_price = eq.solution.potential;
  eq.prices.anchor = m.outside_node;
  eq.prices.seller_price.reserve(m.sellers.size());
  for (const Seller& s : m.sellers) eq.prices.seller_price.push_back(eq.solution.potential[s.node]);
  return eq;
}

std::vector<double> iceberg_costs(std::span<const double> taus) {
  std::vector<double> costs;
  costs.reserve(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double tau = taus[i];
    if (!(tau >= 0.0 && tau < 1.0)) {
      throw Error(ErrorKind::TauOutOfRange, "tau[" + std::to_string(i) + "] = " + std::to_string(tau));
    }
    costs.push_back(-std::log1p(-tau));
  }
  return costs;
}

Graph with_iceberg_costs(const Graph& g, std::span<const double> taus) {
  if (taus.size() != g.arc_count()) {
    throw Error(ErrorKind::DimensionMismatch, "one tau per arc required");
  }
  const auto costs = iceberg_costs(taus);
  std::vector<Arc> arcs = g.arcs();
  for (std::size_t e = 0; e < arcs.size(); ++e) arcs[e].cost = costs[e];
  return Graph::build(g.nodes(), std::move(arcs));
}

std::vector<double> iceberg_prices(std::span<const double> log_prices) {
  std::vector<double> prices(log_prices.size());
  std::transform(log_prices.begin(), log_prices.end(), prices.begin(),
                 [](double x) { return std::exp(x); });
  return prices;
}

Market split_node(const Market& m, NodeId node, std::span<const BuyerGroup> groups) {
  if (node >= m.outside_node) throw Error(ErrorKind::UnknownNode, "node " + std::to_string(node));
  for (const Seller& s : m.sellers) {
    if (s.node == node) {
      throw Error(ErrorKind::UnknownNode, "node " + std::to_string(node) + " hosts a seller");
    }
  }
  const auto at_node = [node](const Buyer& b) { return b.node == node; };
  const auto original = std::find_if(m.buyers.begin(), m.buyers.end(), at_node);
  if (original == m.buyers.end()) {
    throw Error(ErrorKind::UnknownNode, "node " + std::to_string(node) + " hosts no buyer");
  }
  if (groups.empty()) throw Error(ErrorKind::InvalidArgument, "split needs at least one group");
  for (const BuyerGroup& grp : groups) {
    if (!(grp.mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "group mass must be > 0");
  }

  const Graph road = m.road_graph();
  std::vector<Node> nodes = road.nodes();
  std::vector<Arc> arcs = road.arcs();
  std::vector<Buyer> buyers;
  for (const Buyer& b : m.buyers) {
    if (!at_node(b)) buyers.push_back(b);
  }
  for (const BuyerGroup& grp : groups) {
    const auto replica = static_cast<NodeId>(nodes.size());
    nodes.push_back(road.node(node));
    for (ArcId e : road.out_arcs(node)) {
      Arc a = road.arc(e);
      a.tail = replica;
      arcs.push_back(std::move(a));
    }
    for (ArcId e : road.in_arcs(node)) {
      Arc a = road.arc(e);
      a.head = replica;
      arcs.push_back(std::move(a));
    }
    buyers.push_back(Buyer{replica, grp.mass, grp.reservation_utility, original->region});
  }
  return build_market(Graph::build(std::move(nodes), std::move(arcs)), std::move(buyers), m.sellers,
                      m.mode);
}

}  // namespace netequil
