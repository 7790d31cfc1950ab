#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netequil/error.hpp"
#include "netequil/geo.hpp"
#include "netequil/graph.hpp"

using namespace netequil;

namespace {

ParsedLines parse(const std::string& text, LineFormat format = LineFormat::GeoJson) {
  std::istringstream in(text);
  return parse_lines(in, format);
}

// Textbook haversine kept apart from the library's.
double reference_haversine_m(GeoPoint a, GeoPoint b) {
  const double r = 6371008.8;
  const double rad = M_PI / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double h = std::pow(std::sin(dlat / 2), 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::pow(std::sin(dlon / 2), 2);
  return 2 * r * std::atan2(std::sqrt(h), std::sqrt(1 - h));
}

Graph point_graph(const std::vector<GeoPoint>& points) {
  std::vector<Node> nodes;
  for (const GeoPoint& p : points) nodes.push_back(Node{p.lon, p.lat, {}});
  return Graph::build(std::move(nodes), {});
}

}  // namespace

TEST(ParseLines, LineStringFeature) {
  const ParsedLines p = parse(R"({"type":"FeatureCollection","features":[
    {"type":"Feature","properties":{"name":"D1","lanes":2},
     "geometry":{"type":"LineString","coordinates":[[2,46],[2.01,46],[2.02,46.01]]}}]})");
  ASSERT_EQ(p.lines.size(), 1u);
  EXPECT_EQ(p.lines[0].points.size(), 3u);
  EXPECT_EQ(p.lines[0].tags.at("name"), "D1");
  EXPECT_EQ(p.lines[0].tags.at("lanes"), "2");
  EXPECT_EQ(p.skipped, 0u);
}

TEST(ParseLines, EmptyCollection) {
  const ParsedLines p = parse(R"({"type":"FeatureCollection","features":[]})");
  EXPECT_TRUE(p.lines.empty());
}

TEST(ParseLines, SkipsNonLineFeatures) {
  const ParsedLines p = parse(R"({"type":"FeatureCollection","features":[
    {"type":"Feature","properties":{},"geometry":{"type":"LineString","coordinates":[[0,0],[1,0]]}},
    {"type":"Feature","properties":{},"geometry":{"type":"Point","coordinates":[0,0]}},
    {"type":"Feature","properties":{},"geometry":{"type":"LineString","coordinates":[[1,0],[1,1]]}}]})");
  EXPECT_EQ(p.lines.size(), 2u);
  EXPECT_EQ(p.skipped, 1u);
}

TEST(ParseLines, MultiLineStringSplits) {
  const ParsedLines p = parse(R"({"type":"Feature","properties":{"k":"v"},
    "geometry":{"type":"MultiLineString","coordinates":[[[0,0],[1,0]],[[2,0],[3,0]]]}})");
  ASSERT_EQ(p.lines.size(), 2u);
  EXPECT_EQ(p.lines[1].tags.at("k"), "v");
}

TEST(ParseLines, MalformedJsonReportsOffset) {
  try {
    parse(R"({"type":"FeatureCollection","features":[)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(ParseLines, CsvEdges) {
  const ParsedLines p = parse(
      "tail_lon,tail_lat,head_lon,head_lat,cost,road\n"
      "0,0,0.01,0,2.5,A1\n"
      "0.01,0,0.02,0,1,A2\n",
      LineFormat::CsvEdges);
  ASSERT_EQ(p.lines.size(), 2u);
  EXPECT_EQ(*p.lines[0].cost, 2.5);
  EXPECT_EQ(p.lines[1].tags.at("road"), "A2");
}

TEST(ParseLines, CsvEdgesBadNumberNamesLine) {
  try {
    parse("tail_lon,tail_lat,head_lon,head_lat,cost\n0,0,1,1,2\n0,0,x,1,2\n", LineFormat::CsvEdges);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Haversine, MatchesReference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lon(-180, 180), lat(-89, 89);
  for (int k = 0; k < 200; ++k) {
    const GeoPoint a{lon(rng), lat(rng)};
    const GeoPoint b{lon(rng), lat(rng)};
    EXPECT_NEAR(haversine_m(a, b), reference_haversine_m(a, b), 1e-9 * reference_haversine_m(a, b) + 1e-6);
  }
}

TEST(LinesToGraph, SharedEndpoint) {
  std::vector<Polyline> lines = {{{{0, 0}, {0.01, 0}}, {}, {}}, {{{0.01, 0}, {0.02, 0}}, {}, {}}};
  const Graph g = lines_to_graph(lines);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.arc_count(), 4u);
}

TEST(LinesToGraph, SnapsWithinTolerance) {
  // 0.5 m apart at the equator: 0.5 / (R * pi / 180) degrees of longitude.
  const double half_meter = 0.5 / (6371008.8 * M_PI / 180.0);
  std::vector<Polyline> lines = {{{{0, 0}, {0.01, 0}}, {}, {}},
                                 {{{0.01 + half_meter, 0}, {0.02, 0}}, {}, {}}};
  EXPECT_EQ(lines_to_graph(lines, {1.0, 1.0}).node_count(), 3u);
  EXPECT_EQ(lines_to_graph(lines, {0.1, 1.0}).node_count(), 4u);
}

TEST(LinesToGraph, SnappingIsTransitive) {
  // a~b and b~c within 0.8 m, a and c 1.6 m apart: all three merge.
  const double step = 0.8 / (6371008.8 * M_PI / 180.0);
  std::vector<Polyline> lines = {{{{0, 0}, {0, 1}}, {}, {}},
                                 {{{step, 0}, {1, 1}}, {}, {}},
                                 {{{2 * step, 0}, {2, 1}}, {}, {}}};
  const Graph g = lines_to_graph(lines, {1.0, 1.0});
  EXPECT_EQ(g.node_count(), 4u);
  EXPECT_EQ(g.node(0).lon, 0.0);
}

TEST(LinesToGraph, CostIsKilometersTimesRate) {
  const GeoPoint a{2.0, 46.0};
  const GeoPoint b{2.0, 46.0 + 1.0 / (6371.0088 * M_PI / 180.0)};  // 1 km north
  std::vector<Polyline> lines = {{{a, b}, {}, {}}};
  const Graph g = lines_to_graph(lines, {1.0, 0.2});
  ASSERT_EQ(g.arc_count(), 2u);
  const double expected = reference_haversine_m(a, b) / 1000.0 * 0.2;
  EXPECT_NEAR(g.arc(0).cost, expected, 1e-9 * expected);
  EXPECT_NEAR(g.arc(0).cost, 0.2, 1e-9);
  EXPECT_EQ(g.arc(1).cost, g.arc(0).cost);
}

TEST(LinesToGraph, ExplicitCostWins) {
  std::vector<Polyline> lines = {{{{0, 0}, {1, 0}}, {{"road", "x"}}, 7.0}};
  const Graph g = lines_to_graph(lines);
  EXPECT_EQ(g.arc(0).cost, 7.0);
  EXPECT_EQ(g.arc(0).tags.at("road"), "x");
}

TEST(LinesToGraph, RandomCostsWithinRelativeTolerance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lon(-5, 5), lat(40, 50);
  std::vector<Polyline> lines;
  for (int k = 0; k < 50; ++k) lines.push_back({{{lon(rng), lat(rng)}, {lon(rng), lat(rng)}}, {}, {}});
  const Graph g = lines_to_graph(lines, {0.0, 1.7});
  for (const Arc& a : g.arcs()) {
    const GeoPoint p{g.node(a.tail).lon, g.node(a.tail).lat};
    const GeoPoint q{g.node(a.head).lon, g.node(a.head).lat};
    const double expected = reference_haversine_m(p, q) / 1000.0 * 1.7;
    EXPECT_NEAR(a.cost, expected, 1e-9 * expected);
  }
}

TEST(Snap, CoincidentPointAndTie) {
  const Graph g = point_graph({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {0.5, 1}, {4, 0}, {5, 0}, {0.5, -1}});
  const SnapIndex index(g);
  const SnapIndex::Hit hit = index.nearest({2, 0});
  EXPECT_EQ(hit.node, 2u);
  EXPECT_EQ(hit.distance_m, 0.0);
  // (0.5, 0) is half a degree from both node 0 and node 1.
  EXPECT_EQ(index.nearest({0.5, 0.0}).node, 0u);
  const SnapIndex::Hit mid = index.nearest({0.5, 0.6});
  EXPECT_EQ(mid.node, 4u);
}

TEST(Snap, EquidistantPairGoesToSmallerId) {
  const Graph g = point_graph({{10, 10}, {11, 10}, {12, 10}, {13, 10}, {0, 1}, {5, 5}, {6, 6}, {0, -1}});
  EXPECT_EQ(SnapIndex(g).nearest({0, 0}).node, 4u);
}

TEST(Snap, AgreesWithLinearScan) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lon(1, 3), lat(45, 47);
  for (int round = 0; round < 20; ++round) {
    std::vector<GeoPoint> points;
    const int n = 1 + static_cast<int>(rng() % 300);
    for (int k = 0; k < n; ++k) points.push_back({lon(rng), lat(rng)});
    const SnapIndex index(point_graph(points));
    std::vector<GeoPoint> queries;
    for (int k = 0; k < 50; ++k) queries.push_back({lon(rng) * 1.2 - 0.3, lat(rng)});
    const auto hits = snap_agents(index, queries);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      NodeId best = 0;
      for (NodeId v = 1; v < points.size(); ++v) {
        if (haversine_m(queries[q], points[v]) < haversine_m(queries[q], points[best])) best = v;
      }
      EXPECT_EQ(hits[q].node, best);
      EXPECT_EQ(hits[q].distance_m, haversine_m(queries[q], points[best]));
    }
  }
}

TEST(Snap, EmptyGraphThrows) {
  const SnapIndex index(Graph::build({}, {}));
  try {
    index.nearest({0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyGraph);
  }
}
