#include "netequil/synth.hpp"

#include <random>
#include <string>

#include "netequil/error.hpp"
#include "netequil/geo.hpp"

namespace netequil {

namespace {

// Portable draws: the standard distributions are implementation-defined, the
// engine's raw output is not.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

SynthMarket synthesize(const SynthOptions& o) {
  if (o.rows < 1 || o.cols < 1 || o.regions < 1 || o.regions > o.cols) {
    throw Error(ErrorKind::InvalidArgument, "grid needs rows, cols >= 1 and 1 <= regions <= cols");
  }
  if (o.sellers < o.regions) throw Error(ErrorKind::InvalidArgument, "every region needs a seller");
  if (!(o.spacing_deg > 0.0) || !(o.jitter >= 0.0 && o.jitter < 0.5) || !(o.per_km_cost > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "need spacing > 0, 0 <= jitter < 0.5, per-km cost > 0");
  }
  const std::uint64_t n = std::uint64_t{o.rows} * o.cols;
  if (n >= kNoNode) throw Error(ErrorKind::TooLarge, "grid has too many nodes");
  Draw draw(o.seed);

  std::vector<Node> nodes;
  nodes.reserve(n);
  for (std::uint32_t r = 0; r < o.rows; ++r) {
    for (std::uint32_t c = 0; c < o.cols; ++c) {
      const double dx = (2.0 * draw.unit() - 1.0) * o.jitter;
      const double dy = (2.0 * draw.unit() - 1.0) * o.jitter;
      nodes.push_back(Node{o.origin_lon + (c + dx) * o.spacing_deg,
                           o.origin_lat + (r + dy) * o.spacing_deg, {}});
    }
  }
  std::vector<Arc> arcs;
  arcs.reserve(2 * (std::uint64_t{o.rows} * (o.cols - 1) + std::uint64_t{o.rows - 1} * o.cols));
  auto link = [&](NodeId a, NodeId b) {
    const double km = haversine_m({nodes[a].lon, nodes[a].lat}, {nodes[b].lon, nodes[b].lat}) / 1000.0;
    arcs.push_back(Arc{a, b, km * o.per_km_cost, {}});
    arcs.push_back(Arc{b, a, km * o.per_km_cost, {}});
  };
  for (std::uint32_t r = 0; r < o.rows; ++r) {
    for (std::uint32_t c = 0; c < o.cols; ++c) {
      const NodeId v = r * o.cols + c;
      if (c + 1 < o.cols) link(v, v + 1);
      if (r + 1 < o.rows) link(v, v + o.cols);
    }
  }

  auto band_of = [&](NodeId v) {
    return static_cast<std::uint32_t>(std::uint64_t{v % o.cols} * o.regions / o.cols);
  };
  auto region_name = [&](std::uint32_t band) -> std::optional<std::string> {
    if (o.regions == 1) return std::nullopt;
    return "R" + std::to_string(band);
  };

  std::vector<std::vector<NodeId>> band_nodes(o.regions);
  for (NodeId v = 0; v < n; ++v) band_nodes[band_of(v)].push_back(v);

  // Sellers: an even share of the count per band, on distinct nodes.
  std::vector<std::vector<NodeId>> band_sellers(o.regions);
  for (std::uint32_t b = 0; b < o.regions; ++b) {
    const std::uint32_t want = o.sellers / o.regions + (b < o.sellers % o.regions ? 1 : 0);
    auto& pool = band_nodes[b];
    if (want > pool.size()) throw Error(ErrorKind::InvalidArgument, "more sellers than nodes");
    for (std::uint32_t k = 0; k < want; ++k) {
      const std::uint64_t pick = k + draw.below(pool.size() - k);
      std::swap(pool[k], pool[pick]);
      band_sellers[b].push_back(pool[k]);
    }
  }

  std::vector<std::uint64_t> units(n, 0);
  std::vector<std::uint64_t> band_units(o.regions, 0);
  for (std::uint64_t u = 0; u < o.demand_units; ++u) {
    const auto v = static_cast<NodeId>(draw.below(n));
    ++units[v];
    ++band_units[band_of(v)];
  }

  SynthMarket market;
  for (NodeId v = 0; v < n; ++v) {
    if (units[v] == 0) continue;
    BuyerRecord b;
    b.at = {nodes[v].lon, nodes[v].lat};
    b.mass = static_cast<double>(units[v]);
    b.region = region_name(band_of(v));
    b.node = v;
    market.buyers.push_back(std::move(b));
  }

  std::uint32_t label = 0;
  for (std::uint32_t b = 0; b < o.regions; ++b) {
    const auto& sellers = band_sellers[b];
    if (sellers.empty()) continue;
    if (band_units[b] < sellers.size()) {
      throw Error(ErrorKind::InvalidArgument,
                  "band " + std::to_string(b) + " has fewer demand units than sellers");
    }
    std::vector<std::uint64_t> supply(sellers.size(), 1);
    for (std::uint64_t u = sellers.size(); u < band_units[b]; ++u) ++supply[draw.below(sellers.size())];
    for (std::size_t k = 0; k < sellers.size(); ++k) {
      SellerRecord s;
      s.label = "S" + std::to_string(label++);
      s.at = {nodes[sellers[k]].lon, nodes[sellers[k]].lat};
      s.supply = static_cast<double>(supply[k]);
      s.region = region_name(b);
      s.node = sellers[k];
      market.sellers.push_back(std::move(s));
    }
  }
  market.graph = Graph::build(std::move(nodes), std::move(arcs));
  return market;
}

}  // namespace netequil
