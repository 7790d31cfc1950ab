#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netequil/equilibrium.hpp"
#include "netequil/graph.hpp"
#include "netequil/mcf.hpp"

namespace netequil {

struct TransportEntry {
  std::uint32_t seller = 0;
  double cost = 0.0;
};

/// Buyer x seller transport instance with costs geodesic^alpha. Rows are
/// stored sparsely; a missing entry is an infinite (forbidden) cost.
struct TransportProblem {
  std::vector<std::vector<TransportEntry>> rows;  // per buyer, ascending seller
  std::vector<double> supply;                     // per seller
  std::vector<double> demand;                     // per buyer
  double alpha = 1.0;
  /// True when rows were cut down to the k nearest sellers.
  bool sparsified = false;

  std::size_t buyer_count() const { return demand.size(); }
  std::size_t seller_count() const { return supply.size(); }
  double cost(std::size_t buyer, std::size_t seller) const;
};

struct TransportOptions {
  /// Above this many buyer x seller cells, each buyer keeps only its
  /// `k_nearest` sellers. The optimum is then exact only if some optimal plan
  /// uses those pairs alone.
  std::size_t max_dense_cells = 5000ull * 5000ull;
  std::size_t k_nearest = 32;
  unsigned threads = 0;
};

/// Geodesics are taken in the direction goods travel, seller to buyer.
/// Throws NegativeAlpha (alpha < 1), Unbalanced, MixedSellerModes when a
/// seller has no observed supply, UnknownNode.
TransportProblem build_transport(const Graph& g, std::span<const Buyer> buyers,
                                 std::span<const Seller> sellers, double alpha,
                                 const TransportOptions& options = {});

struct TransportCell {
  std::uint32_t buyer = 0;
  std::uint32_t seller = 0;
  double weight = 0.0;
};

struct TransportPlan {
  std::vector<TransportCell> cells;  // positive weights, sorted by (buyer, seller)
  double total_cost = 0.0;
  std::vector<double> buyer_potential;
  std::vector<double> seller_potential;
};

/// Exact optimum through the bipartite transshipment reduction. Throws
/// Infeasible when some mass can only move along forbidden pairs.
TransportPlan solve_transport(const TransportProblem& tp,
                              SolveOrder order = SolveOrder::Ascending);

/// The bipartite network solve_transport hands to solve_mcf: sellers are
/// nodes [0, S), buyers [S, S + B).
FlowProblem transport_flow_problem(const TransportProblem& tp);

struct BuyerAssignment {
  std::optional<std::uint32_t> seller;  // set when one seller serves the buyer
  std::vector<std::uint32_t> split;     // sellers sharing the buyer otherwise
};

struct PowerDiagram {
  std::vector<BuyerAssignment> assignment;
  std::size_t split_count = 0;
};

/// A buyer belongs to the seller holding at least (1 - tie_tol) of its mass,
/// otherwise it is marked split across every seller in its support.
PowerDiagram extract_power_diagram(const TransportPlan& plan, std::size_t buyer_count,
                                   double tie_tol = 1e-6);

struct TransportDegeneracy {
  bool degenerate = false;
  TransportPlan ascending;
  TransportPlan descending;
};

/// Re-solves with every tie-break reversed; differing supports prove that
/// several optimal plans (and so several power diagrams) coexist. Equal
/// supports do not prove uniqueness.
TransportDegeneracy probe_degeneracy(const TransportProblem& tp);

struct FlowDegeneracy {
  bool degenerate = false;
  FlowSolution ascending;
  FlowSolution descending;
};

FlowDegeneracy probe_degeneracy(const FlowProblem& p);

}  // namespace netequil
