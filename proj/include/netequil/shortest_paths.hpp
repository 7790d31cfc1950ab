#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "netequil/detail/parallel.hpp"
#include "netequil/graph.hpp"

namespace netequil {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::uint32_t kNoSource = std::numeric_limits<std::uint32_t>::max();

enum class Direction { Forward, Reverse };

struct Seed {
  NodeId node = kNoNode;
  double initial_label = 0.0;
  std::uint32_t source_id = 0;
};

/// Output of a label-setting run. `parent[v]` is the arc used to reach v
/// (kNoArc at seeds and unreached nodes); in Reverse runs the arc is
/// traversed head to tail.
struct LabelTree {
  Direction direction = Direction::Forward;
  std::vector<double> dist;
  std::vector<ArcId> parent;
  std::vector<std::uint32_t> origin;
  std::vector<double> initial_label;  // label of the seed a node was reached from

  bool reached(NodeId v) const { return dist[v] != kInfinity; }
  /// Arcs from the seed to v, in travel order.
  std::vector<ArcId> path_to(const Graph& g, NodeId v) const;
};

/// Multi-source Dijkstra: dist[v] = min over seeds s of
/// (label_s + geodesic from s to v). Among equal distances the smaller
/// source_id wins the origin, then the smaller parent arc index.
LabelTree dijkstra(const Graph& g, std::span<const Seed> seeds,
                   Direction direction = Direction::Forward);

/// Dense |rows| x |cols| table of geodesics rows[i] -> cols[j] (kInfinity when
/// unreachable), one single-source run per row. Rows are spread over
/// `threads` workers (0 = hardware concurrency); the result does not depend
/// on the schedule.
std::vector<std::vector<double>> geodesic_matrix(const Graph& g, std::span<const NodeId> rows,
                                                 std::span<const NodeId> cols,
                                                 unsigned threads = 0);

}  // namespace netequil
