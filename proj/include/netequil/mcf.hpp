#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "netequil/graph.hpp"

namespace netequil {

/// Uncapacitated transshipment instance. excess[v] > 0 marks a net source of
/// goods, excess[v] < 0 a sink; the excesses must sum to zero.
struct FlowProblem {
  std::shared_ptr<const Graph> graph;
  std::vector<double> excess;
};

/// Primal flows per arc and dual potentials per node. Potentials satisfy
/// potential[head] - potential[tail] <= cost on every arc, with equality on
/// arcs carrying flow.
struct FlowSolution {
  std::vector<double> flow;
  std::vector<double> potential;
  double total_cost = 0.0;
};

/// Tie-breaking regime. Descending reverses every deterministic choice the
/// solver makes (heap order, parent arc preference, service order), which is
/// what the degeneracy probe relies on to surface alternative optima.
enum class SolveOrder { Ascending, Descending };

struct SolveOptions {
  SolveOrder order = SolveOrder::Ascending;
  /// Node pinned to potential 0 in its weak component. Other components are
  /// pinned at their smallest NodeId.
  std::optional<NodeId> reference;
  /// Run the price warm start. Unset means on for graphs of at least
  /// kWarmStartNodes nodes. Its labels are not integral, so integer-cost
  /// instances are solved exactly, and scale-invariantly, only without it.
  std::optional<bool> warm_start;
};

inline constexpr std::size_t kWarmStartNodes = 10000;

/// Successive shortest paths with node potentials.
///
/// On large graphs a warm start first prices the sources so their nearest-deficit
/// territories roughly match their supplies, and serves each deficit from its
/// nearest priced source; the forest labels become the initial potentials.
/// Each phase then runs one Dijkstra on reduced costs from every node that
/// still has excess, stopping once the settled deficits could absorb 30% of
/// the remaining excess. Potentials are raised by the distances (capped at
/// the last settled label) and a blocking flow saturates the tight arcs.
///
/// Throws Unbalanced when the excesses do not sum to zero (relative 1e-9),
/// Disconnected when some remaining deficit cannot be reached, and
/// DimensionMismatch when excess and graph sizes differ.
FlowSolution solve_mcf(const FlowProblem& p, const SolveOptions& options = {});

struct SlacknessReport {
  double max_dual_violation = 0.0;  // max over arcs of p_head - p_tail - cost (clamped at 0)
  double max_support_gap = 0.0;     // max over arcs with flow > 0 of |p_head - p_tail - cost|
  double max_conservation_residual = 0.0;
  bool optimal = false;
};

SlacknessReport verify_slackness(const FlowProblem& p, const FlowSolution& s, double tol);

/// Exact optimum of a small integral instance by enumerating every pairing of
/// supply units with demand units, each pair costed by its geodesic. Throws
/// TooLarge above 8 units of supply and InvalidArgument on non-integral or
/// unbalanced excess.
double oracle_min_cost(const FlowProblem& p);

}  // namespace netequil
