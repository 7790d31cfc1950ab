#pragma once

#include <cstdint>
#include <vector>

#include "netequil/graph.hpp"
#include "netequil/io.hpp"

namespace netequil {

/// Parameters of the random grid market. Identical parameters give identical
/// output on every platform: all draws come from std::mt19937_64 bits.
///
/// Nodes form a rows x cols lattice `spacing_deg` apart starting at
/// (origin_lon, origin_lat). Each coordinate is shifted by a uniform draw in
/// [-jitter, jitter) x spacing. Horizontal and vertical neighbors are joined
/// by a pair of opposite arcs costing haversine km x per_km_cost. Sellers sit
/// on distinct random nodes. Each of `demand_units` units of demand lands on
/// a uniform random node, and buyers aggregate the units per node. The grid is
/// cut into `regions` vertical bands of whole columns; each band's units are
/// shared among that band's sellers, one unit per seller first and the rest
/// uniformly at random, so every band balances.
struct SynthOptions {
  std::uint32_t rows = 432;
  std::uint32_t cols = 432;
  std::uint32_t sellers = 1000;
  std::uint64_t demand_units = 100000;
  std::uint32_t regions = 1;
  std::uint64_t seed = 0;
  double spacing_deg = 0.01;
  double jitter = 0.3;
  double origin_lon = 2.0;
  double origin_lat = 46.0;
  double per_km_cost = 1.0;
};

struct SynthMarket {
  Graph graph;
  std::vector<BuyerRecord> buyers;    // ascending node, node set
  std::vector<SellerRecord> sellers;  // supply set, labels S0, S1, ...
};

/// Throws InvalidArgument when the options cannot produce a valid market
/// (e.g. more sellers than nodes, or fewer units than sellers in a band).
SynthMarket synthesize(const SynthOptions& options);

}  // namespace netequil
