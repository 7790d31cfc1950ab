#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netequil/graph.hpp"
#include "netequil/mcf.hpp"
#include "netequil/shortest_paths.hpp"

namespace netequil {

struct Buyer {
  NodeId node = kNoNode;
  double mass = 0.0;
  /// Cost of the outside option, in arc-cost units. Infinite means the buyer
  /// never exits the market.
  double reservation_utility = kInfinity;
  std::optional<std::string> region;
};

/// A seller carries a posted price (forward mode) or an observed supply
/// (inverse mode), never both.
struct Seller {
  NodeId node = kNoNode;
  std::optional<double> price;
  std::optional<double> observed_supply;
  std::string label;
  std::optional<std::string> region;
};

enum class MarketMode { Forward, Inverse };

/// Market over a road graph with the fictitious outside-option node appended
/// as the last NodeId. Goods flow from sellers toward buyers, so the outside
/// option is a zero-price seller linked by arcs outside -> buyer node of cost
/// equal to that buyer's reservation utility.
struct Market {
  std::shared_ptr<const Graph> graph;
  std::vector<Buyer> buyers;
  std::vector<Seller> sellers;
  MarketMode mode = MarketMode::Forward;
  NodeId outside_node = kNoNode;
  /// Arcs [0, road_arc_count) are road arcs; the rest leave the outside node.
  std::size_t road_arc_count = 0;

  /// The road network without the outside node.
  Graph road_graph() const;
};

/// Throws UnknownNode for agents off the graph, MixedSellerModes when sellers
/// do not uniformly carry the field required by `mode`, InvalidArgument on
/// nonpositive masses or negative supplies, and Unbalanced in inverse mode
/// when observed supply exceeds buyer mass.
Market build_market(const Graph& g, std::vector<Buyer> buyers, std::vector<Seller> sellers,
                    MarketMode mode);

inline constexpr std::uint32_t kOutsideChoice = std::numeric_limits<std::uint32_t>::max();

struct PriceVector {
  std::vector<double> node_price;    // delivered price per market node
  std::vector<double> seller_price;  // per seller, in seller order
  NodeId anchor = kNoNode;           // node pinned at price 0
};

struct ForwardEquilibrium {
  PriceVector prices;
  LabelTree tree;
  /// Per buyer: index of the chosen seller, or kOutsideChoice.
  std::vector<std::uint32_t> choice;
  /// Per buyer: min(reservation utility, cheapest delivered seller price).
  std::vector<double> buyer_price;
};

/// Consumer program with posted prices: one multi-source Dijkstra seeded
/// with every seller at its price, then each buyer compares the delivered
/// price with its own reservation utility. The outside option is personal
/// and never travels along roads. Ties go to real sellers over the outside
/// option, then to the smaller seller index. A node's price is the lowest
/// price any option there offers; unreached nodes without buyers stay at
/// infinity.
ForwardEquilibrium forward_prices(const Market& m);

struct InverseEquilibrium {
  PriceVector prices;
  FlowProblem problem;
  FlowSolution solution;
};

/// Prices that make each seller's demand equal its observed supply: dual
/// potentials of the market's transshipment problem, anchored at the outside
/// node.
InverseEquilibrium inverse_prices(const Market& m, SolveOrder order = SolveOrder::Ascending);

/// Additive arc costs -log(1 - tau). Throws TauOutOfRange unless 0 <= tau < 1.
std::vector<double> iceberg_costs(std::span<const double> taus);

/// Copy of `g` whose arc costs are the iceberg transform of `taus`.
Graph with_iceberg_costs(const Graph& g, std::span<const double> taus);

/// Multiplicative prices from log-price potentials; the anchor maps to 1.
std::vector<double> iceberg_prices(std::span<const double> log_prices);

struct BuyerGroup {
  double mass = 0.0;
  double reservation_utility = kInfinity;
};

/// Replaces the buyer(s) at `node` by one replica node per group. Each
/// replica copies the node's road arcs and gets its own outside arc. The
/// original node stays as a plain junction. Throws UnknownNode when `node`
/// hosts no buyer or hosts a seller.
Market split_node(const Market& m, NodeId node, std::span<const BuyerGroup> groups);

}  // namespace netequil
