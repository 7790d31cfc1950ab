#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netequil/equilibrium.hpp"

namespace netequil {

/// Demand served by each seller given posted prices.
struct DemandReport {
  std::vector<double> seller_demand;        // per seller
  std::vector<std::uint32_t> buyer_choice;  // seller index or kOutsideChoice
  std::vector<double> buyer_price;          // delivered price per buyer
  double outside_mass = 0.0;
};

DemandReport aggregate_demand(const Market& m);

struct AreaCount {
  std::string area;
  double count = 0.0;
};

/// Splits each area's population equally over the nodes labelled with that
/// area. Buyers come out in ascending node order; areas with a zero count
/// produce none. Throws EmptyArea when a populated area has no node.
std::vector<Buyer> spread_population(std::span<const AreaCount> area_counts,
                                     std::span<const std::string> node_areas);

struct RegionScale {
  double scale = 1.0;
  double demand_before = 0.0;
  double demand_after = 0.0;
  double supply = 0.0;
};

/// Region label -> balancing record. Agents without a region share the
/// empty label.
using RegionBalance = std::map<std::string, RegionScale>;

struct BalancedBuyers {
  std::vector<Buyer> buyers;
  RegionBalance balance;
};

/// Scales buyer masses per region so regional demand equals regional
/// observed supply. Throws EmptyRegionSide when a region lacks supply or
/// demand.
BalancedBuyers balance_regions(std::span<const Buyer> buyers, std::span<const Seller> sellers);

struct QualityEntry {
  std::string label;
  std::string region;
  double quality = 0.0;  // negated equilibrium price
  std::uint32_t rank = 0;
};

/// One entry per seller, in seller order. Ranks are dense, 1 = best, and
/// only comparable within a region.
struct QualityRanking {
  std::vector<QualityEntry> entries;
};

/// Solves each region's inverse equilibrium on the shared road graph and ranks
/// its sellers by quality. Qualities within 1e-9 of the region's largest
/// magnitude share a rank. Throws Unbalanced(region) when a region's supply
/// and demand differ.
QualityRanking rank_quality(const Market& m, unsigned threads = 0);

}  // namespace netequil
