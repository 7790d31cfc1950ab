#include "netequil/geo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "netequil/csv.hpp"
#include "netequil/error.hpp"

namespace netequil {

namespace {

constexpr double kEarthRadiusM = kEarthRadiusKm * 1000.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;

using json = nlohmann::json;

std::string tag_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

GeoPoint position(const json& pos, std::size_t feature) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
    throw Error(ErrorKind::ParseError,
                "feature " + std::to_string(feature) + ": position is not [lon, lat]");
  }
  return {pos[0].get<double>(), pos[1].get<double>()};
}

// Appends the line unless it collapses to a single point.
void add_line(ParsedLines& out, const json& coords, const Tags& tags, std::size_t feature) {
  if (!coords.is_array()) {
    throw Error(ErrorKind::ParseError,
                "feature " + std::to_string(feature) + ": coordinates is not an array");
  }
  Polyline line;
  line.tags = tags;
  for (const json& pos : coords) {
    const GeoPoint p = position(pos, feature);
    if (line.points.empty() || !(line.points.back() == p)) line.points.push_back(p);
  }
  if (line.points.size() < 2) {
    ++out.skipped;
    return;
  }
  out.lines.push_back(std::move(line));
}

void add_feature(ParsedLines& out, const json& feature, std::size_t index) {
  if (!feature.is_object()) {
    throw Error(ErrorKind::ParseError, "feature " + std::to_string(index) + ": not an object");
  }
  const json* geometry = &feature;
  Tags tags;
  if (feature.value("type", "") == "Feature") {
    const auto g = feature.find("geometry");
    if (g == feature.end() || g->is_null()) {
      ++out.skipped;
      return;
    }
    geometry = &*g;
    const auto props = feature.find("properties");
    if (props != feature.end() && props->is_object()) {
      for (const auto& [k, v] : props->items()) {
        if (!v.is_null()) tags[k] = tag_text(v);
      }
    }
  }
  if (!geometry->is_object() || !geometry->contains("type")) {
    throw Error(ErrorKind::ParseError, "feature " + std::to_string(index) + ": geometry has no type");
  }
  const std::string type = (*geometry)["type"].is_string() ? (*geometry)["type"].get<std::string>() : "";
  if (type == "LineString") {
    add_line(out, geometry->value("coordinates", json()), tags, index);
  } else if (type == "MultiLineString") {
    const json coords = geometry->value("coordinates", json());
    if (!coords.is_array()) {
      throw Error(ErrorKind::ParseError,
                  "feature " + std::to_string(index) + ": coordinates is not an array");
    }
    for (const json& part : coords) add_line(out, part, tags, index);
  } else {
    ++out.skipped;
  }
}

ParsedLines parse_geojson(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  ParsedLines out;
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "top level is not an object");
  if (doc.value("type", "") == "FeatureCollection") {
    const auto features = doc.find("features");
    if (features == doc.end() || !features->is_array()) {
      throw Error(ErrorKind::ParseError, "FeatureCollection without a features array");
    }
    for (std::size_t i = 0; i < features->size(); ++i) add_feature(out, (*features)[i], i);
  } else {
    add_feature(out, doc, 0);
  }
  return out;
}

ParsedLines parse_csv_edges(std::istream& in) {
  static const std::vector<std::string> kColumns = {"tail_lon", "tail_lat", "head_lon", "head_lat",
                                                    "cost"};
  const CsvTable table = read_csv(in);
  ParsedLines out;
  if (table.header.empty()) return out;
  if (table.header.size() < kColumns.size() ||
      !std::equal(kColumns.begin(), kColumns.end(), table.header.begin())) {
    throw Error(ErrorKind::ParseError,
                "line 1: header must start with tail_lon,tail_lat,head_lon,head_lat,cost");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line_no = table.line[r];
    double v[5];
    for (std::size_t c = 0; c < 5; ++c) v[c] = parse_number(row[c], line_no, kColumns[c]);
    Polyline line;
    line.points = {{v[0], v[1]}, {v[2], v[3]}};
    line.cost = v[4];
    for (std::size_t c = 5; c < row.size(); ++c) {
      if (!row[c].empty()) line.tags[table.header[c]] = row[c];
    }
    if (line.points[0] == line.points[1]) {
      ++out.skipped;
      continue;
    }
    out.lines.push_back(std::move(line));
  }
  return out;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  // The smaller index becomes the root so each group is named by its first
  // vertex.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }

  std::vector<std::size_t> parent;
};

std::uint64_t cell_key(std::int64_t x, std::int64_t y) {
  return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint32_t>(y);
}

}  // namespace

double haversine_m(GeoPoint a, GeoPoint b) {
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dlat / 2);
  const double s2 = std::sin(dlon / 2);
  const double h = s1 * s1 + std::cos(a.lat * kDegToRad) * std::cos(b.lat * kDegToRad) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

ParsedLines parse_lines(std::istream& in, LineFormat format) {
  return format == LineFormat::GeoJson ? parse_geojson(in) : parse_csv_edges(in);
}

Graph lines_to_graph(std::span<const Polyline> lines, const LinesToGraphOptions& options) {
  if (!(options.snap_tol_m >= 0.0) || !std::isfinite(options.snap_tol_m)) {
    throw Error(ErrorKind::InvalidArgument, "snap tolerance must be >= 0");
  }
  if (!(options.per_km_cost > 0.0) || !std::isfinite(options.per_km_cost)) {
    throw Error(ErrorKind::InvalidArgument, "per-km cost must be > 0");
  }

  std::vector<GeoPoint> vertex;
  double max_abs_lat = 0.0;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const Polyline& line = lines[l];
    if (line.cost && line.points.size() != 2) {
      throw Error(ErrorKind::InvalidArgument,
                  "line " + std::to_string(l) + ": an explicit cost needs exactly two points");
    }
    for (const GeoPoint& p : line.points) {
      if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || std::abs(p.lat) > 90.0 ||
          std::abs(p.lon) > 180.0) {
        throw Error(ErrorKind::InvalidCoordinate, "line " + std::to_string(l));
      }
      vertex.push_back(p);
      max_abs_lat = std::max(max_abs_lat, std::abs(p.lat));
    }
  }

  DisjointSets sets(vertex.size());
  if (options.snap_tol_m == 0.0) {
    std::map<std::pair<double, double>, std::size_t> first;
    for (std::size_t v = 0; v < vertex.size(); ++v) {
      const auto [it, fresh] = first.try_emplace({vertex[v].lon, vertex[v].lat}, v);
      if (!fresh) sets.unite(it->second, v);
    }
  } else {
    // Cells at least one tolerance wide in both directions, so any pair
    // within tolerance lies in neighboring cells.
    const double cell_lat = options.snap_tol_m / (kEarthRadiusM * kDegToRad);
    const double cos_lat = std::cos(std::min(max_abs_lat, 89.9) * kDegToRad);
    const double cell_lon = 1.01 * cell_lat / cos_lat;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
    for (std::size_t v = 0; v < vertex.size(); ++v) {
      const auto cx = static_cast<std::int64_t>(std::floor((vertex[v].lon + 180.0) / cell_lon));
      const auto cy = static_cast<std::int64_t>(std::floor((vertex[v].lat + 90.0) / cell_lat));
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          const auto it = cells.find(cell_key(cx + dx, cy + dy));
          if (it == cells.end()) continue;
          for (std::size_t u : it->second) {
            if (haversine_m(vertex[u], vertex[v]) <= options.snap_tol_m) sets.unite(u, v);
          }
        }
      }
      cells[cell_key(cx, cy)].push_back(v);
    }
  }

  std::vector<NodeId> node_of(vertex.size(), kNoNode);
  std::vector<Node> nodes;
  for (std::size_t v = 0; v < vertex.size(); ++v) {
    const std::size_t root = sets.find(v);
    if (root == v) {
      node_of[v] = static_cast<NodeId>(nodes.size());
      nodes.push_back(Node{vertex[v].lon, vertex[v].lat, {}});
    } else {
      node_of[v] = node_of[root];
    }
  }

  std::vector<Arc> arcs;
  std::size_t v = 0;
  for (const Polyline& line : lines) {
    for (std::size_t k = 0; k + 1 < line.points.size(); ++k) {
      const NodeId a = node_of[v + k];
      const NodeId b = node_of[v + k + 1];
      if (a == b) continue;
      const double cost =
          line.cost ? *line.cost
                    : haversine_m({nodes[a].lon, nodes[a].lat}, {nodes[b].lon, nodes[b].lat}) /
                          1000.0 * options.per_km_cost;
      arcs.push_back(Arc{a, b, cost, line.tags});
    }
    v += line.points.size();
  }
  return make_bidirectional(Graph::build(std::move(nodes), std::move(arcs)));
}

SnapIndex::SnapIndex(const Graph& g, double cell_deg) {
  points_.reserve(g.node_count());
  double max_lat = 0.0;
  for (const Node& n : g.nodes()) points_.push_back({n.lon, n.lat});
  if (points_.empty()) return;
  min_lon_ = max_lon_ = points_[0].lon;
  min_lat_ = max_lat = points_[0].lat;
  for (const GeoPoint& p : points_) {
    min_lon_ = std::min(min_lon_, p.lon);
    max_lon_ = std::max(max_lon_, p.lon);
    min_lat_ = std::min(min_lat_, p.lat);
    max_lat = std::max(max_lat, p.lat);
    max_abs_lat_ = std::max(max_abs_lat_, std::abs(p.lat));
  }
  const double span = std::max(max_lon_ - min_lon_, max_lat - min_lat_);
  if (!(cell_deg > 0.0)) {
    const double area = (max_lon_ - min_lon_) * (max_lat - min_lat_);
    const double n = static_cast<double>(points_.size());
    cell_deg = area > 0.0 ? std::sqrt(2.0 * area / n) : (span > 0.0 ? 2.0 * span / n : 1.0);
  }
  // Keep the grid dimensions representable.
  cell_deg_ = std::max(cell_deg, span / 1e6);
  if (!(cell_deg_ > 0.0)) cell_deg_ = 1.0;
  nx_ = cell_x(max_lon_) + 1;
  ny_ = cell_y(max_lat) + 1;
  for (NodeId v = 0; v < points_.size(); ++v) {
    cells_[cell_key(cell_x(points_[v].lon), cell_y(points_[v].lat))].push_back(v);
  }
}

std::int64_t SnapIndex::cell_x(double lon) const {
  return static_cast<std::int64_t>(std::floor((lon - min_lon_) / cell_deg_));
}

std::int64_t SnapIndex::cell_y(double lat) const {
  return static_cast<std::int64_t>(std::floor((lat - min_lat_) / cell_deg_));
}

const std::vector<NodeId>* SnapIndex::cell(std::int64_t x, std::int64_t y) const {
  if (x < 0 || y < 0 || x >= nx_ || y >= ny_) return nullptr;
  const auto it = cells_.find(cell_key(x, y));
  return it == cells_.end() ? nullptr : &it->second;
}

SnapIndex::Hit SnapIndex::nearest(GeoPoint p) const {
  if (points_.empty()) throw Error(ErrorKind::EmptyGraph, "cannot snap to an empty graph");
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
    throw Error(ErrorKind::InvalidCoordinate, "agent coordinate is not finite");
  }
  // Clamping the query cell to one step outside the grid keeps the ring
  // bounds below valid.
  auto clamp_cell = [](double f, std::int64_t n) -> std::int64_t {
    if (f < 0.0) return -1;
    if (f >= static_cast<double>(n)) return n;
    return static_cast<std::int64_t>(f);
  };
  const std::int64_t cx = clamp_cell(std::floor((p.lon - min_lon_) / cell_deg_), nx_);
  const std::int64_t cy = clamp_cell(std::floor((p.lat - min_lat_) / cell_deg_), ny_);
  const double cos_l = std::cos(std::min(90.0, std::max(max_abs_lat_, std::abs(p.lat))) * kDegToRad);
  const double width = std::max(max_lon_, p.lon) - std::min(min_lon_, p.lon);

  Hit best;
  best.distance_m = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<NodeId>* members) {
    if (!members) return;
    for (NodeId v : *members) {
      const double d = haversine_m(p, points_[v]);
      if (d < best.distance_m || (d == best.distance_m && v < best.node)) best = {v, d};
    }
  };
  for (std::int64_t r = 0;; ++r) {
    if (r == 0) {
      consider(cell(cx, cy));
    } else {
      for (std::int64_t x = cx - r; x <= cx + r; ++x) {
        consider(cell(x, cy - r));
        consider(cell(x, cy + r));
      }
      for (std::int64_t y = cy - r + 1; y <= cy + r - 1; ++y) {
        consider(cell(cx - r, y));
        consider(cell(cx + r, y));
      }
    }
    if (cx - r <= 0 && cx + r >= nx_ - 1 && cy - r <= 0 && cy + r >= ny_ - 1) break;
    // Anything unvisited is more than r cells away in lon or in lat.
    const double gap = static_cast<double>(r) * cell_deg_;
    const double lat_bound = kEarthRadiusM * gap * kDegToRad;
    const double dlon = std::min(gap, 360.0 - width) * kDegToRad;
    const double lon_bound =
        2.0 * kEarthRadiusM * std::asin(std::min(1.0, cos_l * std::sin(std::max(0.0, dlon) / 2)));
    if (best.distance_m < std::min(lat_bound, lon_bound)) break;
  }
  return best;
}

std::vector<SnapIndex::Hit> snap_agents(const SnapIndex& index, std::span<const GeoPoint> points) {
  if (index.size() == 0) throw Error(ErrorKind::EmptyGraph, "cannot snap to an empty graph");
  std::vector<SnapIndex::Hit> hits;
  hits.reserve(points.size());
  for (const GeoPoint& p : points) hits.push_back(index.nearest(p));
  return hits;
}

}  // namespace netequil
