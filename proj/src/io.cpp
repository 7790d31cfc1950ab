#include "netequil/io.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include "netequil/csv.hpp"
#include "netequil/error.hpp"

namespace netequil {

namespace {

template <class Item>
std::vector<std::string> tag_keys(const std::vector<Item>& items) {
  std::set<std::string> keys;
  for (const Item& item : items) {
    for (const auto& [k, v] : item.tags) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

void append_tags(std::vector<std::string>& row, const Tags& tags, const std::vector<std::string>& keys) {
  for (const std::string& k : keys) {
    const auto it = tags.find(k);
    row.push_back(it == tags.end() ? std::string() : it->second);
  }
}

Tags read_tags(const CsvTable& t, std::size_t r, std::size_t first) {
  Tags tags;
  for (std::size_t c = first; c < t.header.size(); ++c) {
    if (!t.rows[r][c].empty()) tags[t.header[c]] = t.rows[r][c];
  }
  return tags;
}

void expect_header(const CsvTable& t, std::initializer_list<const char*> names, const char* file) {
  std::size_t i = 0;
  for (const char* name : names) {
    if (i >= t.header.size() || t.header[i] != name) {
      throw Error(ErrorKind::ParseError, std::string(file) + " line 1: column " +
                                             std::to_string(i + 1) + " must be '" + name + "'");
    }
    ++i;
  }
}

std::uint64_t parse_index(std::string_view text, std::size_t line, std::string_view column) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::string(column) + ": not an index '" +
                                           std::string(text) + "'");
  }
  return value;
}

std::optional<NodeId> parse_node(const CsvTable& t, std::size_t r, std::size_t col) {
  if (col == std::string::npos || t.rows[r][col].empty()) return std::nullopt;
  const std::uint64_t v = parse_index(t.rows[r][col], t.line[r], "node");
  if (v >= kNoNode) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(t.line[r]) + ", column node: out of range");
  }
  return static_cast<NodeId>(v);
}

std::size_t require(const CsvTable& t, const char* name) {
  const std::size_t c = t.column(name);
  if (c == std::string::npos) {
    throw Error(ErrorKind::ParseError, std::string("line 1: missing column '") + name + "'");
  }
  return c;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + p.string());
  return out;
}

}  // namespace

void write_graph(const Graph& g, std::ostream& nodes, std::ostream& arcs) {
  const auto node_keys = tag_keys(g.nodes());
  std::vector<std::string> row = {"id", "lon", "lat"};
  row.insert(row.end(), node_keys.begin(), node_keys.end());
  write_csv_row(nodes, row);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const Node& n = g.node(v);
    row = {std::to_string(v), format_exact(n.lon), format_exact(n.lat)};
    append_tags(row, n.tags, node_keys);
    write_csv_row(nodes, row);
  }

  const auto arc_keys = tag_keys(g.arcs());
  row = {"tail", "head", "cost"};
  row.insert(row.end(), arc_keys.begin(), arc_keys.end());
  write_csv_row(arcs, row);
  for (const Arc& a : g.arcs()) {
    row = {std::to_string(a.tail), std::to_string(a.head), format_exact(a.cost)};
    append_tags(row, a.tags, arc_keys);
    write_csv_row(arcs, row);
  }
}

Graph read_graph(std::istream& nodes_in, std::istream& arcs_in) {
  const CsvTable nt = read_csv(nodes_in);
  const CsvTable at = read_csv(arcs_in);
  expect_header(nt, {"id", "lon", "lat"}, "nodes.csv");
  expect_header(at, {"tail", "head", "cost"}, "arcs.csv");

  std::vector<Node> nodes;
  nodes.reserve(nt.rows.size());
  for (std::size_t r = 0; r < nt.rows.size(); ++r) {
    const auto& row = nt.rows[r];
    if (parse_index(row[0], nt.line[r], "id") != r) {
      throw Error(ErrorKind::ParseError,
                  "nodes.csv line " + std::to_string(nt.line[r]) + ": ids must be 0, 1, 2, ...");
    }
    nodes.push_back(Node{parse_number(row[1], nt.line[r], "lon"), parse_number(row[2], nt.line[r], "lat"),
                         read_tags(nt, r, 3)});
  }
  std::vector<Arc> arcs;
  arcs.reserve(at.rows.size());
  for (std::size_t r = 0; r < at.rows.size(); ++r) {
    const auto& row = at.rows[r];
    const std::uint64_t tail = parse_index(row[0], at.line[r], "tail");
    const std::uint64_t head = parse_index(row[1], at.line[r], "head");
    if (tail >= nodes.size() || head >= nodes.size()) {
      throw Error(ErrorKind::DanglingEndpoint, "arcs.csv line " + std::to_string(at.line[r]));
    }
    arcs.push_back(Arc{static_cast<NodeId>(tail), static_cast<NodeId>(head),
                       parse_number(row[2], at.line[r], "cost"), read_tags(at, r, 3)});
  }
  return Graph::build(std::move(nodes), std::move(arcs));
}

void save_graph(const Graph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream nodes = open_out(dir / "nodes.csv");
  std::ofstream arcs = open_out(dir / "arcs.csv");
  write_graph(g, nodes, arcs);
}

Graph load_graph(const std::filesystem::path& dir) {
  std::ifstream nodes = open_in(dir / "nodes.csv");
  std::ifstream arcs = open_in(dir / "arcs.csv");
  return read_graph(nodes, arcs);
}

BuyerFile read_buyers(std::istream& in) {
  const CsvTable t = read_csv(in);
  BuyerFile file;
  if (t.header.empty()) return file;
  const std::size_t lon = require(t, "lon");
  const std::size_t lat = require(t, "lat");
  const std::size_t mass = require(t, "mass");
  const std::size_t ru = t.column("reservation_utility");
  const std::size_t region = t.column("region");
  const std::size_t node = t.column("node");
  file.has_region = region != std::string::npos;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.line[r];
    BuyerRecord b;
    b.at = {parse_number(row[lon], line, "lon"), parse_number(row[lat], line, "lat")};
    b.mass = parse_number(row[mass], line, "mass");
    if (ru != std::string::npos && !row[ru].empty()) {
      b.reservation_utility = parse_number(row[ru], line, "reservation_utility");
    }
    if (file.has_region) b.region = row[region];
    b.node = parse_node(t, r, node);
    file.rows.push_back(std::move(b));
  }
  return file;
}

SellerFile read_sellers(std::istream& in) {
  const CsvTable t = read_csv(in);
  SellerFile file;
  if (t.header.empty()) return file;
  const std::size_t label = require(t, "label");
  const std::size_t lon = require(t, "lon");
  const std::size_t lat = require(t, "lat");
  const std::size_t price = t.column("price");
  const std::size_t supply = t.column("supply");
  if ((price == std::string::npos) == (supply == std::string::npos)) {
    throw Error(ErrorKind::ParseError, "line 1: sellers need exactly one of 'price' or 'supply'");
  }
  file.mode = price != std::string::npos ? MarketMode::Forward : MarketMode::Inverse;
  const std::size_t region = t.column("region");
  const std::size_t node = t.column("node");
  file.has_region = region != std::string::npos;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t line = t.line[r];
    SellerRecord s;
    s.label = row[label];
    s.at = {parse_number(row[lon], line, "lon"), parse_number(row[lat], line, "lat")};
    if (file.mode == MarketMode::Forward) {
      s.price = parse_number(row[price], line, "price");
    } else {
      s.supply = parse_number(row[supply], line, "supply");
    }
    if (file.has_region) s.region = row[region];
    s.node = parse_node(t, r, node);
    file.rows.push_back(std::move(s));
  }
  return file;
}

void write_buyers(std::ostream& out, const std::vector<BuyerRecord>& rows) {
  bool has_ru = false;
  bool has_region = false;
  bool has_node = false;
  for (const BuyerRecord& b : rows) {
    has_ru |= b.reservation_utility != kInfinity;
    has_region |= b.region.has_value();
    has_node |= b.node.has_value();
  }
  std::vector<std::string> row = {"lon", "lat", "mass"};
  if (has_ru) row.push_back("reservation_utility");
  if (has_region) row.push_back("region");
  if (has_node) row.push_back("node");
  write_csv_row(out, row);
  for (const BuyerRecord& b : rows) {
    row = {format_exact(b.at.lon), format_exact(b.at.lat), format_exact(b.mass)};
    if (has_ru) row.push_back(b.reservation_utility == kInfinity ? "" : format_exact(b.reservation_utility));
    if (has_region) row.push_back(b.region.value_or(""));
    if (has_node) row.push_back(b.node ? std::to_string(*b.node) : "");
    write_csv_row(out, row);
  }
}

void write_sellers(std::ostream& out, const std::vector<SellerRecord>& rows) {
  const bool forward = !rows.empty() && rows.front().price.has_value();
  bool has_region = false;
  bool has_node = false;
  for (const SellerRecord& s : rows) {
    if (s.price.has_value() != forward || s.supply.has_value() == forward) {
      throw Error(ErrorKind::MixedSellerModes, "seller " + s.label);
    }
    has_region |= s.region.has_value();
    has_node |= s.node.has_value();
  }
  std::vector<std::string> row = {"label", "lon", "lat", forward ? "price" : "supply"};
  if (has_region) row.push_back("region");
  if (has_node) row.push_back("node");
  write_csv_row(out, row);
  for (const SellerRecord& s : rows) {
    row = {s.label, format_exact(s.at.lon), format_exact(s.at.lat),
           format_exact(forward ? *s.price : *s.supply)};
    if (has_region) row.push_back(s.region.value_or(""));
    if (has_node) row.push_back(s.node ? std::to_string(*s.node) : "");
    write_csv_row(out, row);
  }
}

}  // namespace netequil
