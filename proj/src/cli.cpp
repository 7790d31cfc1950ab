#include "netequil/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "netequil/alpha_transport.hpp"
#include "netequil/applications.hpp"
#include "netequil/csv.hpp"
#include "netequil/equilibrium.hpp"
#include "netequil/error.hpp"
#include "netequil/geo.hpp"
#include "netequil/io.hpp"
#include "netequil/synth.hpp"

namespace netequil {

namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::InvalidCoordinate:
    case ErrorKind::NegativeCost:
    case ErrorKind::DanglingEndpoint:
    case ErrorKind::UnknownNode:
    case ErrorKind::MixedSellerModes:
      return kExitParse;
    case ErrorKind::EmptyGraph:
    case ErrorKind::EmptyArea:
      return kExitEmpty;
    case ErrorKind::Unbalanced:
    case ErrorKind::EmptyRegionSide:
      return kExitImbalance;
    case ErrorKind::Disconnected:
    case ErrorKind::Infeasible:
      return kExitDisconnected;
    default:
      return kExitUsage;
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  return out;
}

struct MarketInput {
  std::string graph_dir;
  std::string buyers_path;
  std::string sellers_path;
};

struct LoadedMarket {
  Graph graph;
  BuyerFile buyer_file;
  SellerFile seller_file;
  std::vector<Buyer> buyers;
  std::vector<Seller> sellers;
};

// Reads the three inputs and places every agent on a node: the file's node
// column when present, the nearest node otherwise.
LoadedMarket load_market(const MarketInput& in) {
  LoadedMarket m;
  m.graph = load_graph(in.graph_dir);
  {
    std::ifstream f = open_in(in.buyers_path);
    m.buyer_file = read_buyers(f);
  }
  {
    std::ifstream f = open_in(in.sellers_path);
    m.seller_file = read_sellers(f);
  }
  if (m.graph.empty()) throw Error(ErrorKind::EmptyGraph, in.graph_dir);

  std::unique_ptr<SnapIndex> index;
  auto place = [&](const std::optional<NodeId>& node, GeoPoint at) {
    if (node) {
      if (*node >= m.graph.node_count()) {
        throw Error(ErrorKind::UnknownNode, "node " + std::to_string(*node) + " is not in the graph");
      }
      return *node;
    }
    if (!index) index = std::make_unique<SnapIndex>(m.graph);
    return index->nearest(at).node;
  };
  for (const BuyerRecord& r : m.buyer_file.rows) {
    Buyer b;
    b.node = place(r.node, r.at);
    b.mass = r.mass;
    b.reservation_utility = r.reservation_utility;
    b.region = r.region;
    m.buyers.push_back(std::move(b));
  }
  for (const SellerRecord& r : m.seller_file.rows) {
    Seller s;
    s.node = place(r.node, r.at);
    s.price = r.price;
    s.observed_supply = r.supply;
    s.label = r.label;
    s.region = r.region;
    m.sellers.push_back(std::move(s));
  }
  return m;
}

void add_market_options(CLI::App* cmd, MarketInput& in) {
  cmd->add_option("--graph", in.graph_dir, "Graph artifact directory (nodes.csv, arcs.csv)")->required();
  cmd->add_option("--buyers", in.buyers_path, "Buyers CSV: lon,lat,mass[,reservation_utility][,region][,node]")
      ->required();
  cmd->add_option("--sellers", in.sellers_path, "Sellers CSV: label,lon,lat,price|supply[,region][,node]")
      ->required();
}

std::string node_text(NodeId v, NodeId outside) {
  return v == outside ? std::string("outside") : std::to_string(v);
}

void write_node_prices(const fs::path& path, const std::vector<double>& price, std::size_t road_nodes) {
  std::ofstream f = open_out(path);
  write_csv_row(f, std::vector<std::string>{"node", "price"});
  for (NodeId v = 0; v < road_nodes; ++v) {
    write_csv_row(f, std::vector<std::string>{std::to_string(v), format_number(price[v])});
  }
}

struct BuildGraphArgs {
  std::string input;
  std::string format;
  std::string out;
  double snap_tol = 1.0;
  double per_km_cost = 1.0;
  bool largest = false;
  bool simplify = false;
};

int cmd_build_graph(const BuildGraphArgs& a, std::ostream& out, std::ostream& err) {
  std::string format = a.format;
  if (format.empty()) format = fs::path(a.input).extension() == ".csv" ? "csv-edges" : "geojson";
  std::ifstream in = open_in(a.input);
  const ParsedLines parsed =
      parse_lines(in, format == "csv-edges" ? LineFormat::CsvEdges : LineFormat::GeoJson);
  if (parsed.skipped > 0) err << "warning: skipped " << parsed.skipped << " non-line features\n";

  Graph g = lines_to_graph(parsed.lines, {a.snap_tol, a.per_km_cost});
  if (a.largest) g = largest_component(g).graph;
  if (a.simplify) g = simplify_chains(g, {}).graph;
  if (g.empty()) {
    err << "error: the input produced an empty graph\n";
    return kExitEmpty;
  }
  save_graph(g, a.out);
  std::uint32_t components = 0;
  weak_components(g, &components);
  out << "nodes=" << g.node_count() << ", arcs=" << g.arc_count() << ", components=" << components
      << '\n';
  return kExitOk;
}

struct SolveArgs {
  MarketInput input;
  std::string out;
  std::string mode;
  double tol = 1e-9;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  LoadedMarket lm = load_market(a.input);
  MarketMode mode = lm.seller_file.mode;
  if (a.mode == "forward") mode = MarketMode::Forward;
  if (a.mode == "inverse") mode = MarketMode::Inverse;
  if (mode != lm.seller_file.mode) {
    err << "error: --mode " << a.mode << " does not match the sellers file\n";
    return kExitUsage;
  }
  const std::size_t road_nodes = lm.graph.node_count();
  const Market m = build_market(lm.graph, lm.buyers, lm.sellers, mode);
  const fs::path dir(a.out);
  fs::create_directories(dir);

  if (mode == MarketMode::Forward) {
    const DemandReport report = aggregate_demand(m);
    {
      std::ofstream f = open_out(dir / "buyers.csv");
      write_csv_row(f, std::vector<std::string>{"buyer", "node", "seller", "price"});
      for (std::size_t i = 0; i < m.buyers.size(); ++i) {
        const std::uint32_t c = report.buyer_choice[i];
        write_csv_row(f, std::vector<std::string>{
                             std::to_string(i), std::to_string(m.buyers[i].node),
                             c == kOutsideChoice ? std::string("outside") : m.sellers[c].label,
                             format_number(report.buyer_price[i])});
      }
    }
    {
      std::ofstream f = open_out(dir / "sellers.csv");
      write_csv_row(f, std::vector<std::string>{"label", "node", "price", "demand"});
      for (std::size_t j = 0; j < m.sellers.size(); ++j) {
        write_csv_row(f, std::vector<std::string>{m.sellers[j].label, std::to_string(m.sellers[j].node),
                                                  format_number(*m.sellers[j].price),
                                                  format_number(report.seller_demand[j])});
      }
    }
    const ForwardEquilibrium eq = forward_prices(m);
    write_node_prices(dir / "prices.csv", eq.prices.node_price, road_nodes);
    out << "buyers=" << m.buyers.size() << ", sellers=" << m.sellers.size()
        << ", outside_mass=" << format_number(report.outside_mass) << '\n';
    return kExitOk;
  }

  const InverseEquilibrium eq = inverse_prices(m);
  {
    std::ofstream f = open_out(dir / "sellers.csv");
    write_csv_row(f, std::vector<std::string>{"label", "node", "price", "quality"});
    for (std::size_t j = 0; j < m.sellers.size(); ++j) {
      const double p = eq.prices.seller_price[j];
      write_csv_row(f, std::vector<std::string>{m.sellers[j].label, std::to_string(m.sellers[j].node),
                                                format_number(p), format_number(-p)});
    }
  }
  {
    std::ofstream f = open_out(dir / "flows.csv");
    write_csv_row(f, std::vector<std::string>{"arc", "tail", "head", "flow"});
    const Graph& g = *m.graph;
    for (ArcId e = 0; e < g.arc_count(); ++e) {
      if (!(eq.solution.flow[e] > 0.0)) continue;
      write_csv_row(f, std::vector<std::string>{std::to_string(e), node_text(g.arc(e).tail, m.outside_node),
                                                node_text(g.arc(e).head, m.outside_node),
                                                format_number(eq.solution.flow[e])});
    }
  }
  write_node_prices(dir / "prices.csv", eq.prices.node_price, road_nodes);
  const SlacknessReport check = verify_slackness(eq.problem, eq.solution, a.tol);
  out << "total_cost=" << format_number(eq.solution.total_cost) << '\n';
  out << "slackness: max_dual_violation=" << format_number(check.max_dual_violation)
      << " max_support_gap=" << format_number(check.max_support_gap)
      << " max_conservation_residual=" << format_number(check.max_conservation_residual)
      << " optimal=" << (check.optimal ? "yes" : "no") << '\n';
  return kExitOk;
}

struct AlphaArgs {
  MarketInput input;
  std::string out;
  double alpha = 1.0;
  unsigned threads = 0;
};

int cmd_alpha_match(const AlphaArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.alpha >= 1.0)) {
    err << "error: --alpha must be >= 1\n";
    return kExitUsage;
  }
  LoadedMarket lm = load_market(a.input);
  if (lm.seller_file.mode != MarketMode::Inverse) {
    err << "error: alpha-match needs a sellers file with a supply column\n";
    return kExitUsage;
  }
  TransportOptions options;
  options.threads = a.threads;
  const TransportProblem tp = build_transport(lm.graph, lm.buyers, lm.sellers, a.alpha, options);
  const TransportDegeneracy probe = probe_degeneracy(tp);
  const TransportPlan& plan = probe.ascending;
  const PowerDiagram diagram = extract_power_diagram(plan, tp.buyer_count());
  {
    std::ofstream f = open_out(a.out);
    write_csv_row(f, std::vector<std::string>{"buyer", "seller", "weight"});
    for (const TransportCell& c : plan.cells) {
      write_csv_row(f, std::vector<std::string>{std::to_string(c.buyer), lm.sellers[c.seller].label,
                                                format_number(c.weight)});
    }
  }
  if (tp.sparsified) err << "note: each buyer kept only its " << options.k_nearest << " nearest sellers\n";
  out << "total_cost=" << format_number(plan.total_cost) << '\n';
  out << "split_count=" << diagram.split_count << '\n';
  out << "degenerate: " << (probe.degenerate ? "yes" : "no") << '\n';
  return kExitOk;
}

struct RankArgs {
  MarketInput input;
  std::string out;
  bool balance = false;
  unsigned threads = 0;
};

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  LoadedMarket lm = load_market(a.input);
  if (!lm.buyer_file.has_region || !lm.seller_file.has_region) {
    err << "error: line 1: both agent files need a 'region' column\n";
    return kExitParse;
  }
  if (lm.seller_file.mode != MarketMode::Inverse) {
    err << "error: rank needs a sellers file with a supply column\n";
    return kExitUsage;
  }
  std::vector<Buyer> buyers = lm.buyers;
  if (a.balance) {
    BalancedBuyers balanced = balance_regions(lm.buyers, lm.sellers);
    for (const auto& [region, r] : balanced.balance) {
      if (r.scale != 1.0) err << "region " << region << " scale " << format_number(r.scale) << '\n';
    }
    buyers = std::move(balanced.buyers);
  }
  const Market m = build_market(lm.graph, std::move(buyers), lm.sellers, MarketMode::Inverse);
  const QualityRanking ranking = rank_quality(m, a.threads);

  std::vector<std::size_t> order(ranking.entries.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const QualityEntry& p = ranking.entries[x];
    const QualityEntry& q = ranking.entries[y];
    return std::tie(p.region, p.rank, p.label) < std::tie(q.region, q.rank, q.label);
  });
  std::ofstream f = open_out(a.out);
  write_csv_row(f, std::vector<std::string>{"label", "region", "quality", "rank"});
  for (std::size_t j : order) {
    const QualityEntry& e = ranking.entries[j];
    write_csv_row(f, std::vector<std::string>{e.label, e.region, format_number(e.quality),
                                              std::to_string(e.rank)});
  }
  out << "sellers=" << ranking.entries.size() << '\n';
  return kExitOk;
}

int cmd_synth(const SynthOptions& o, const std::string& dir, std::ostream& out) {
  const SynthMarket market = synthesize(o);
  save_graph(market.graph, dir);
  {
    std::ofstream f = open_out(fs::path(dir) / "buyers.csv");
    write_buyers(f, market.buyers);
  }
  {
    std::ofstream f = open_out(fs::path(dir) / "sellers.csv");
    write_sellers(f, market.sellers);
  }
  out << "nodes=" << market.graph.node_count() << ", arcs=" << market.graph.arc_count()
      << ", buyers=" << market.buyers.size() << ", sellers=" << market.sellers.size() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial market equilibria on road networks"};
  app.name("netequil");
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  BuildGraphArgs build;
  auto* build_cmd = app.add_subcommand("build-graph", "Turn GeoJSON or csv-edges lines into a graph artifact");
  build_cmd->add_option("input", build.input, "Input file")->required();
  build_cmd->add_option("--format", build.format, "geojson or csv-edges (default: by extension)")
      ->check(CLI::IsMember({"geojson", "csv-edges"}));
  build_cmd->add_option("--snap-tol", build.snap_tol, "Vertex merge tolerance in meters")
      ->capture_default_str();
  build_cmd->add_option("--per-km-cost", build.per_km_cost, "Arc cost per kilometer")->capture_default_str();
  build_cmd->add_flag("--largest-component", build.largest, "Keep only the largest weak component");
  build_cmd->add_flag("--simplify", build.simplify, "Contract pass-through chains");
  build_cmd->add_option("-o,--out", build.out, "Output directory")->required();

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Forward prices/demand or inverse prices/flows");
  add_market_options(solve_cmd, solve.input);
  solve_cmd->add_option("--mode", solve.mode, "forward or inverse (default: from the sellers file)")
      ->check(CLI::IsMember({"forward", "inverse"}));
  solve_cmd->add_option("--tol", solve.tol, "Complementary slackness tolerance")->capture_default_str();
  solve_cmd->add_option("-o,--out", solve.out, "Output directory")->required();

  AlphaArgs alpha;
  auto* alpha_cmd = app.add_subcommand("alpha-match", "alpha-power transport plan and degeneracy probe");
  add_market_options(alpha_cmd, alpha.input);
  alpha_cmd->add_option("--alpha", alpha.alpha, "Distance exponent, >= 1")->capture_default_str();
  alpha_cmd->add_option("-o,--out", alpha.out, "Plan CSV")->required();

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "Per-region quality ranking of sellers");
  add_market_options(rank_cmd, rank.input);
  rank_cmd->add_flag("--balance", rank.balance, "Scale buyer mass to each region's supply");
  rank_cmd->add_option("-o,--out", rank.out, "Ranking CSV")->required();

  SynthOptions synth;
  std::string synth_dir;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a random grid market");
  synth_cmd->add_option("--rows", synth.rows)->capture_default_str();
  synth_cmd->add_option("--cols", synth.cols)->capture_default_str();
  synth_cmd->add_option("--sellers", synth.sellers)->capture_default_str();
  synth_cmd->add_option("--units", synth.demand_units, "Units of demand")->capture_default_str();
  synth_cmd->add_option("--regions", synth.regions, "Vertical bands")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--spacing", synth.spacing_deg, "Grid step in degrees")->capture_default_str();
  synth_cmd->add_option("--jitter", synth.jitter, "Jitter as a fraction of the step")->capture_default_str();
  synth_cmd->add_option("--per-km-cost", synth.per_km_cost)->capture_default_str();
  synth_cmd->add_option("-o,--out", synth_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build_cmd) return cmd_build_graph(build, out, err);
    if (*solve_cmd) return cmd_solve(solve, out, err);
    if (*alpha_cmd) {
      alpha.threads = threads;
      return cmd_alpha_match(alpha, out, err);
    }
    if (*rank_cmd) {
      rank.threads = threads;
      return cmd_rank(rank, out, err);
    }
    if (*synth_cmd) return cmd_synth(synth, synth_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace netequil
