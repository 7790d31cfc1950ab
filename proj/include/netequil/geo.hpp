#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "netequil/graph.hpp"

namespace netequil {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Great-circle distance in meters on a sphere of radius kEarthRadiusKm.
double haversine_m(GeoPoint a, GeoPoint b);

struct Polyline {
  std::vector<GeoPoint> points;  // at least two, consecutive points distinct
  Tags tags;
  /// Explicit arc cost (csv-edges input); when unset the cost is derived
  /// from the geometry.
  std::optional<double> cost;
};

enum class LineFormat { GeoJson, CsvEdges };

struct ParsedLines {
  std::vector<Polyline> lines;
  /// Features skipped because they are not lines (or collapse to a point).
  std::size_t skipped = 0;
};

/// GeoJSON: a FeatureCollection (or a single Feature); LineString and
/// MultiLineString geometries are kept, properties become tags.
/// csv-edges: header tail_lon,tail_lat,head_lon,head_lat,cost[,tag...].
/// Throws ParseError with a byte offset (GeoJSON) or line number (CSV).
ParsedLines parse_lines(std::istream& in, LineFormat format);

struct LinesToGraphOptions {
  double snap_tol_m = 1.0;
  double per_km_cost = 1.0;
};

/// Merges vertices within snap_tol_m of each other (transitively), links
/// consecutive vertices of each line with an arc costing its haversine length
/// in km times per_km_cost (or the line's explicit cost), then adds reverse
/// arcs. A merged node sits at the first vertex of its group.
Graph lines_to_graph(std::span<const Polyline> lines, const LinesToGraphOptions& options = {});

/// Uniform lon/lat cell index answering exact nearest-node queries by
/// great-circle distance. Ties go to the smaller NodeId. A nonpositive
/// `cell_deg` picks a size giving about two nodes per cell.
class SnapIndex {
 public:
  explicit SnapIndex(const Graph& g, double cell_deg = 0.0);

  struct Hit {
    NodeId node = kNoNode;
    double distance_m = 0.0;
  };

  /// Throws EmptyGraph when the indexed graph has no nodes.
  Hit nearest(GeoPoint p) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::int64_t cell_x(double lon) const;
  std::int64_t cell_y(double lat) const;
  const std::vector<NodeId>* cell(std::int64_t x, std::int64_t y) const;

  double cell_deg_ = 1.0;
  double max_abs_lat_ = 0.0;
  double min_lon_ = 0.0, max_lon_ = 0.0, min_lat_ = 0.0;
  std::vector<GeoPoint> points_;
  std::int64_t nx_ = 0, ny_ = 0;
  std::unordered_map<std::uint64_t, std::vector<NodeId>> cells_;
};

std::vector<SnapIndex::Hit> snap_agents(const SnapIndex& index, std::span<const GeoPoint> points);

}  // namespace netequil
