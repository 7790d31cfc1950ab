#include "netequil/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "netequil/detail/parallel.hpp"
#include "netequil/error.hpp"

namespace netequil {

DemandReport aggregate_demand(const Market& m) {
  const ForwardEquilibrium eq = forward_prices(m);
  DemandReport report;
  report.seller_demand.assign(m.sellers.size(), 0.0);
  report.buyer_choice = eq.choice;
  report.buyer_price.reserve(m.buyers.size());
  for (std::size_t i = 0; i < m.buyers.size(); ++i) {
    const Buyer& b = m.buyers[i];
    report.buyer_price.push_back(eq.buyer_price[i]);
    if (eq.choice[i] == kOutsideChoice) {
      report.outside_mass += b.mass;
    } else {
      report.seller_demand[eq.choice[i]] += b.mass;
    }
  }
  return report;
}

std::vector<Buyer> spread_population(std::span<const AreaCount> area_counts,
                                     std::span<const std::string> node_areas) {
  std::unordered_map<std::string, std::size_t> nodes_in_area;
  for (const std::string& area : node_areas) ++nodes_in_area[area];
  std::unordered_map<std::string, double> mass_per_node;
  for (const AreaCount& ac : area_counts) {
    if (!(ac.count >= 0.0)) throw Error(ErrorKind::InvalidArgument, "negative count in " + ac.area);
    if (ac.count == 0.0) continue;
    const auto it = nodes_in_area.find(ac.area);
    if (it == nodes_in_area.end()) throw Error(ErrorKind::EmptyArea, ac.area);
    mass_per_node[ac.area] += ac.count / static_cast<double>(it->second);
  }
  std::vector<Buyer> buyers;
  for (NodeId v = 0; v < node_areas.size(); ++v) {
    const auto it = mass_per_node.find(node_areas[v]);
    if (it == mass_per_node.end()) continue;
    Buyer b;
    b.node = v;
    b.mass = it->second;
    buyers.push_back(b);
  }
  return buyers;
}

BalancedBuyers balance_regions(std::span<const Buyer> buyers, std::span<const Seller> sellers) {
  BalancedBuyers out;
  out.buyers.assign(buyers.begin(), buyers.end());
  RegionBalance& balance = out.balance;
  for (const Buyer& b : buyers) balance[b.region.value_or("")].demand_before += b.mass;
  for (const Seller& s : sellers) {
    if (!s.observed_supply) {
      throw Error(ErrorKind::MixedSellerModes, "seller " + s.label + " has no observed supply");
    }
    balance[s.region.value_or("")].supply += *s.observed_supply;
  }
  for (auto& [region, r] : balance) {
    if (!(r.demand_before > 0.0) || !(r.supply > 0.0)) {
      throw Error(ErrorKind::EmptyRegionSide, "region '" + region + "'");
    }
    r.scale = r.supply / r.demand_before;
  }

  // Scale, then let the last buyer of each region absorb rounding so the
  // left-to-right regional sum lands on the supply.
  std::map<std::string, std::size_t> last_buyer;
  for (std::size_t i = 0; i < out.buyers.size(); ++i) {
    Buyer& b = out.buyers[i];
    const std::string region = b.region.value_or("");
    if (balance[region].scale != 1.0) b.mass *= balance[region].scale;
    last_buyer[region] = i;
  }
  std::map<std::string, double> others;
  for (std::size_t i = 0; i < out.buyers.size(); ++i) {
    const std::string region = out.buyers[i].region.value_or("");
    if (last_buyer[region] != i) others[region] += out.buyers[i].mass;
  }
  for (auto& [region, idx] : last_buyer) {
    const RegionScale& r = balance[region];
    if (r.scale == 1.0) continue;
    const double fixed = r.supply - others[region];
    if (fixed > 0.0) out.buyers[idx].mass = fixed;
  }
  for (const Buyer& b : out.buyers) balance[b.region.value_or("")].demand_after += b.mass;
  return out;
}

namespace {

struct RegionAgents {
  std::vector<Buyer> buyers;
  std::vector<std::size_t> seller_index;
};

}  // namespace

QualityRanking rank_quality(const Market& m, unsigned threads) {
  if (m.mode != MarketMode::Inverse) throw Error(ErrorKind::ModeMismatch, "rank_quality");
  std::map<std::string, RegionAgents> regions;
  for (const Buyer& b : m.buyers) regions[b.region.value_or("")].buyers.push_back(b);
  for (std::size_t j = 0; j < m.sellers.size(); ++j) {
    regions[m.sellers[j].region.value_or("")].seller_index.push_back(j);
  }
  for (const auto& [name, agents] : regions) {
    double demand = 0.0;
    double supply = 0.0;
    for (const Buyer& b : agents.buyers) demand += b.mass;
    for (std::size_t j : agents.seller_index) supply += *m.sellers[j].observed_supply;
    if (std::abs(demand - supply) > 1e-9 * std::max({1.0, demand, supply})) {
      throw Error(ErrorKind::Unbalanced, "region '" + name + "': supply " + std::to_string(supply) +
                                             ", demand " + std::to_string(demand));
    }
  }

  const Graph road = m.road_graph();
  std::vector<const std::pair<const std::string, RegionAgents>*> work;
  for (const auto& entry : regions) work.push_back(&entry);

  QualityRanking ranking;
  ranking.entries.resize(m.sellers.size());
  parallel_for(work.size(), threads, [&](std::size_t r) {
    const auto& [name, agents] = *work[r];
    if (agents.seller_index.empty()) return;
    std::vector<Seller> sellers;
    for (std::size_t j : agents.seller_index) sellers.push_back(m.sellers[j]);
    const Market sub = build_market(road, agents.buyers, sellers, MarketMode::Inverse);
    const InverseEquilibrium eq = inverse_prices(sub);

    std::vector<std::size_t> order(sellers.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> quality(sellers.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < sellers.size(); ++k) {
      quality[k] = -eq.prices.seller_price[k];
      scale = std::max(scale, std::abs(quality[k]));
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (quality[a] != quality[b]) return quality[a] > quality[b];
      return sellers[a].label < sellers[b].label;
    });
    const double tol = 1e-9 * scale;
    std::uint32_t rank = 0;
    double leader = 0.0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const std::size_t k = order[pos];
      if (pos == 0 || leader - quality[k] > tol) {
        ++rank;
        leader = quality[k];
      }
      QualityEntry& e = ranking.entries[agents.seller_index[k]];
      e.label = sellers[k].label;
      e.region = name;
      e.quality = quality[k];
      e.rank = rank;
    }
  });
  return ranking;
}

}  // namespace netequil
