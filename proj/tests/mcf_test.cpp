#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "netequil/alpha_transport.hpp"
#include "netequil/error.hpp"
#include "netequil/mcf.hpp"
#include "support.hpp"

using namespace netequil;
using namespace testing_support;

namespace {

FlowProblem problem(Graph g, std::vector<double> excess) {
  return FlowProblem{std::make_shared<const Graph>(std::move(g)), std::move(excess)};
}

double cost_of(const Graph& g, const std::vector<double>& flow) {
  double c = 0.0;
  for (ArcId e = 0; e < g.arc_count(); ++e) c += flow[e] * g.arc(e).cost;
  return c;
}

Graph scaled(const Graph& g, double k) {
  std::vector<Arc> arcs = g.arcs();
  for (Arc& a : arcs) a.cost *= k;
  return Graph::build(g.nodes(), std::move(arcs));
}

}  // namespace

TEST(SolveMcf, LineShipsEndToEnd) {
  const FlowProblem p = problem(line3(), {1, 0, -1});
  const FlowSolution s = solve_mcf(p);
  EXPECT_EQ(s.total_cost, 2.0);
  EXPECT_EQ(s.potential, (std::vector<double>{0, 1, 2}));
  // Arcs alternate forward and back: 0->1, 1->0, 1->2, 2->1.
  EXPECT_EQ(s.flow, (std::vector<double>{1, 0, 1, 0}));
  EXPECT_TRUE(verify_slackness(p, s, 1e-9).optimal);
}

TEST(SolveMcf, ZeroExcessShipsNothing) {
  const FlowProblem p = problem(line3(), {0, 0, 0});
  const FlowSolution s = solve_mcf(p);
  EXPECT_EQ(s.total_cost, 0.0);
  for (double f : s.flow) EXPECT_EQ(f, 0.0);
  EXPECT_TRUE(verify_slackness(p, s, 1e-9).optimal);
}

TEST(SolveMcf, ReferenceNodeIsPinned) {
  const FlowProblem p = problem(line3(), {1, 0, -1});
  SolveOptions o;
  o.reference = 2;
  const FlowSolution s = solve_mcf(p, o);
  EXPECT_EQ(s.potential, (std::vector<double>{-2, -1, 0}));
}

TEST(SolveMcf, DegenerateSquare) {
  const FlowProblem p = problem(degen4(), degen4_excess());
  for (SolveOrder order : {SolveOrder::Ascending, SolveOrder::Descending}) {
    const FlowSolution s = solve_mcf(p, {order, std::nullopt});
    EXPECT_EQ(s.total_cost, 3.0);
    // Both sellers ship, so the cheaper one is priced exactly one unit lower.
    EXPECT_EQ(s.potential[3], s.potential[2] + 1.0);
    EXPECT_EQ(s.potential[0], s.potential[1]);
    EXPECT_TRUE(verify_slackness(p, s, 1e-9).optimal);
    const FlowSolution w = solve_mcf(p, {order, std::nullopt, true});
    EXPECT_EQ(w.total_cost, 3.0);
    EXPECT_NEAR(w.potential[3], w.potential[2] + 1.0, 1e-9);
  }
}

TEST(SolveMcf, DegeneracyProbeFindsBothPlans) {
  const FlowDegeneracy d = probe_degeneracy(problem(degen4(), degen4_excess()));
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.ascending.total_cost, d.descending.total_cost);
  EXPECT_NE(support_of(d.ascending.flow), support_of(d.descending.flow));
}

TEST(VerifySlackness, DetectsPerturbedPotential) {
  const FlowProblem p = problem(degen4(), degen4_excess());
  FlowSolution s = solve_mcf(p);
  s.potential[3] -= 1.0;
  const SlacknessReport r = verify_slackness(p, s, 1e-9);
  EXPECT_FALSE(r.optimal);
  EXPECT_EQ(r.max_support_gap, 1.0);
  EXPECT_EQ(r.max_dual_violation, 1.0);
  EXPECT_EQ(r.max_conservation_residual, 0.0);
}

TEST(VerifySlackness, DetectsBrokenConservation) {
  const FlowProblem p = problem(line3(), {1, 0, -1});
  FlowSolution s = solve_mcf(p);
  s.flow[2] = 0.5;
  const SlacknessReport r = verify_slackness(p, s, 1e-9);
  EXPECT_FALSE(r.optimal);
  EXPECT_EQ(r.max_conservation_residual, 0.5);
}

TEST(SolveMcf, Errors) {
  try {
    solve_mcf(problem(line3(), {1, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unbalanced);
  }
  try {
    solve_mcf(problem(graph_of(3, {{0, 1, 1.0}}), {1, 0, -1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Disconnected);
  }
  try {
    solve_mcf(problem(line3(), {1, -1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(OracleMinCost, MatchesEnumeration) {
  EXPECT_EQ(oracle_min_cost(problem(degen4(), degen4_excess())), 3.0);
  try {
    oracle_min_cost(problem(line3(), {9, 0, -9}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
  EXPECT_THROW(oracle_min_cost(problem(line3(), {0.5, 0, -0.5})), Error);
}

TEST(SolveMcf, RandomInstancesMatchBruteForce) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 300; ++round) {
    const RandomInstance r = random_instance(rng);
    const FlowProblem p{r.graph, r.excess};
    const double expected = enumerate_min_cost(*r.graph, r.excess);
    EXPECT_EQ(oracle_min_cost(p), expected);
    for (SolveOrder order : {SolveOrder::Ascending, SolveOrder::Descending}) {
      for (bool warm : {false, true}) {
        const FlowSolution s = solve_mcf(p, {order, std::nullopt, warm});
        if (warm) {
          EXPECT_NEAR(s.total_cost, expected, 1e-9) << "round " << round;
        } else {
          EXPECT_EQ(s.total_cost, expected) << "round " << round;
          for (double q : s.potential) EXPECT_EQ(q, std::round(q));
        }
        EXPECT_NEAR(cost_of(*r.graph, s.flow), s.total_cost, 1e-9);
        EXPECT_TRUE(verify_slackness(p, s, 1e-9).optimal) << "round " << round;
        for (double f : s.flow) EXPECT_EQ(f, std::round(f));
      }
    }
  }
}

TEST(SolveMcf, LargerRandomInstancesAreOptimal) {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 30; ++round) {
    const NodeId n = 50 + rng() % 150;
    std::vector<Edge> edges;
    for (NodeId v = 1; v < n; ++v) {
      const NodeId u = static_cast<NodeId>(rng() % v);
      edges.push_back({u, v, static_cast<double>(rng() % 100) / 4.0});
      edges.push_back({v, u, static_cast<double>(rng() % 100) / 4.0});
    }
    for (NodeId k = 0; k < n; ++k) {
      const NodeId a = rng() % n;
      const NodeId b = rng() % n;
      edges.push_back({a, b, static_cast<double>(rng() % 100) / 4.0});
    }
    std::vector<double> excess(n, 0.0);
    for (int k = 0; k < 200; ++k) {
      excess[rng() % n] += 1.0;
      excess[rng() % n] -= 1.0;
    }
    const FlowProblem p = problem(graph_of(n, edges), excess);
    const FlowSolution cold = solve_mcf(p, {SolveOrder::Ascending, std::nullopt, false});
    const FlowSolution warm = solve_mcf(p, {SolveOrder::Ascending, std::nullopt, true});
    EXPECT_TRUE(verify_slackness(p, cold, 1e-9).optimal) << "round " << round;
    EXPECT_TRUE(verify_slackness(p, warm, 1e-9).optimal) << "round " << round;
    EXPECT_NEAR(warm.total_cost, cold.total_cost, 1e-9 * cold.total_cost);
  }
}

TEST(SolveMcf, SupportInvariantUnderExactCostScaling) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 50; ++round) {
    const RandomInstance r = random_instance(rng);
    const FlowSolution base = solve_mcf({r.graph, r.excess});
    for (double k : {0.5, 2.0, 17.0}) {
      const FlowProblem p{std::make_shared<const Graph>(scaled(*r.graph, k)), r.excess};
      const FlowSolution s = solve_mcf(p);
      EXPECT_EQ(support_of(s.flow), support_of(base.flow));
      EXPECT_EQ(s.total_cost, k * base.total_cost);
    }
  }
}
