#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netequil/equilibrium.hpp"
#include "netequil/geo.hpp"
#include "netequil/graph.hpp"

namespace netequil {

// Graph artifact: nodes.csv (id,lon,lat,<tag>...) and arcs.csv
// (tail,head,cost,<tag>...). Tag columns are the sorted union of tag keys; an
// empty cell means the tag is absent. Coordinates and costs are written in
// shortest round-trip form so a reload reproduces the graph exactly.
void write_graph(const Graph& g, std::ostream& nodes, std::ostream& arcs);
Graph read_graph(std::istream& nodes, std::istream& arcs);

void save_graph(const Graph& g, const std::filesystem::path& dir);
Graph load_graph(const std::filesystem::path& dir);

/// A row of a buyers file: lon,lat,mass[,reservation_utility][,region][,node].
/// An empty reservation_utility means none. When `node` is given it is used
/// as is and the coordinates are not snapped.
struct BuyerRecord {
  GeoPoint at;
  double mass = 0.0;
  double reservation_utility = kInfinity;
  std::optional<std::string> region;
  std::optional<NodeId> node;
};

/// A row of a sellers file: label,lon,lat and exactly one of price (forward)
/// or supply (inverse), plus optional region and node.
struct SellerRecord {
  std::string label;
  GeoPoint at;
  std::optional<double> price;
  std::optional<double> supply;
  std::optional<std::string> region;
  std::optional<NodeId> node;
};

struct BuyerFile {
  std::vector<BuyerRecord> rows;
  bool has_region = false;
};

struct SellerFile {
  std::vector<SellerRecord> rows;
  bool has_region = false;
  MarketMode mode = MarketMode::Forward;
};

/// Both readers throw ParseError naming the line and column at fault.
BuyerFile read_buyers(std::istream& in);
SellerFile read_sellers(std::istream& in);

void write_buyers(std::ostream& out, const std::vector<BuyerRecord>& rows);
void write_sellers(std::ostream& out, const std::vector<SellerRecord>& rows);

}  // namespace netequil
