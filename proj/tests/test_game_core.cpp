#include <random>

#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "braess/game.hpp"
#include "braess/topology.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace braess;
using namespace braess::testing;

TEST_CASE("latency function validation") {
  CHECK_THROWS_AS(LatencyFunction::linear(0), Error);
  CHECK_THROWS_AS(LatencyFunction::affine(-1, 0), Error);
  // loads must strictly increase, costs must not decrease
  CHECK_THROWS_AS(LatencyFunction::monotone({{0, 0}, {0, 1}}, 1), Error);
  CHECK_THROWS_AS(LatencyFunction::monotone({{0, 1}, {1, 0}}, 1), Error);
  // Lipschitz constant must dominate every segment slope
  CHECK_THROWS_AS(LatencyFunction::monotone({{0, 0}, {1, 5}}, 2), Error);
  auto pl = LatencyFunction::monotone({{0, 0}, {rat(1, 2), 1}, {2, 1}, {3, 4}}, 3);
  CHECK(pl.eval(rat(1, 4)) == rat(1, 2));
  CHECK(pl.eval(1) == 1);  // flat segment
  CHECK(pl.eval(3) == 4);
  CHECK_THROWS_AS(pl.eval(4), Error);  // outside the load domain
  // inverse caps: flat pieces resolve to the rightmost load
  CHECK(pl.inverse_cap(1, 10) == 2);
  CHECK(pl.inverse_cap(rat(5, 2), 10) == rat(5, 2));
  CHECK(pl.inverse_cap(0, 10) == 0);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(make_instance({"s", "t"}, "s", "s", {linear_edge("e", 0, 1, 1)}, 1), Error);
  CHECK_THROWS_AS(
      make_instance({"s", "t"}, "s", "t",
                    {linear_edge("a", 0, 1, 1), linear_edge("a", 0, 1, 1)}, 1),
      Error);
  CHECK_THROWS_AS(make_instance({"s", "t"}, "s", "t", {linear_edge("e", 0, 0, 1)}, 1), Error);
  CHECK_THROWS_AS(make_instance({"s", "t", "x"}, "s", "t",
                                {linear_edge("e", 0, 2, 1)}, 1),
                  Error);  // edge into x only: no s-t path
}

TEST_CASE("edge loads on the theta graph") {
  auto theta = theta_graph();
  SUBCASE("all flow through the middle path") {
    Flow f = make_flow(theta, {{{"su", "uv", "vt"}, 1}});
    auto loads = edge_loads(f);
    CHECK(loads.at("su") == 1);
    CHECK(loads.at("uv") == 1);
    CHECK(loads.at("vt") == 1);
    CHECK(loads.at("ut") == 0);
    CHECK(loads.at("sv") == 0);
  }
  SUBCASE("half-half split on the outer paths") {
    Flow f = make_flow(theta, {{{"su", "ut"}, rat(1, 2)}, {{"sv", "vt"}, rat(1, 2)}});
    auto loads = edge_loads(f);
    CHECK(loads.at("su") == rat(1, 2));
    CHECK(loads.at("ut") == rat(1, 2));
    CHECK(loads.at("sv") == rat(1, 2));
    CHECK(loads.at("vt") == rat(1, 2));
    CHECK(loads.at("uv") == 0);
  }
  SUBCASE("zero rate admits the empty flow") {
    auto zero = make_instance(theta->nodes, "s", "t", theta->edges, 0);
    Flow f = make_flow(zero, {});
    for (const auto& [id, load] : edge_loads(f)) CHECK(load == 0);
  }
  SUBCASE("infeasible totals are rejected") {
    CHECK_THROWS_AS(make_flow(theta, {{{"su", "ut"}, rat(1, 3)}}), Error);
    CHECK_THROWS_AS(make_flow(theta, {{{"su", "ut"}, rat(-1, 2)},
                                      {{"sv", "vt"}, rat(3, 2)}}),
                    Error);
  }
  SUBCASE("paths must be simple s-t paths of the instance") {
    CHECK_THROWS_AS(make_flow(theta, {{{"su", "uv"}, 1}}), Error);  // ends at v
    CHECK_THROWS_AS(make_flow(theta, {{{"su", "vt"}, 1}}), Error);  // disconnected
    CHECK_THROWS_AS(make_flow(theta, {{{"su", "xx"}, 1}}), Error);  // unknown edge
  }
}

TEST_CASE("bottleneck costs") {
  auto theta = theta_graph();
  Flow middle = make_flow(theta, {{{"su", "uv", "vt"}, 1}});
  CHECK(bottleneck_cost(middle).bottleneck == 1);
  Flow split = make_flow(theta, {{{"su", "ut"}, rat(1, 2)}, {{"sv", "vt"}, rat(1, 2)}});
  CHECK(bottleneck_cost(split).bottleneck == rat(1, 2));
  auto single = single_edge(2, 3);
  CHECK(bottleneck_cost(make_flow(single, {{{"e"}, 3}})).bottleneck == 6);
}

TEST_CASE("scaling latencies") {
  auto theta = theta_graph();
  CHECK_THROWS_AS(scale_latencies(theta, 0), Error);
  auto scaled = scale_latencies(theta, 3);
  Flow split = make_flow(scaled, {{{"su", "ut"}, rat(1, 2)}, {{"sv", "vt"}, rat(1, 2)}});
  CHECK(bottleneck_cost(split).bottleneck == rat(3, 2));
  auto same = scale_latencies(theta, 1);
  CHECK(same->edges[0].latency.a == theta->edges[0].latency.a);

  // gap network scaled by 2 doubles the optimum (checked against the optimal
  // solver before and after)
  GapNetwork gap = build_gap_network(ddp_yes(), rat(1, 8), 12);
  Rational before = optimal_bottleneck_cost(gap.instance).cost;
  Rational after = optimal_bottleneck_cost(scale_latencies(gap.instance, 2)).cost;
  CHECK(before == 3);
  CHECK(after == 6);
}

TEST_CASE("rate normalization") {
  auto single = single_edge(1, 4);
  auto unit = normalize_rate(single);
  CHECK(unit->rate == 1);
  CHECK(unit->edges[0].latency.a == 4);
  CHECK(optimal_bottleneck_cost(single).cost == 4);
  CHECK(optimal_bottleneck_cost(unit).cost == 4);

  auto theta2 = theta_graph(2);
  auto theta_unit = normalize_rate(theta2);
  CHECK(theta_unit->rate == 1);
  CHECK(price_of_anarchy(theta2) == 2);
  CHECK(price_of_anarchy(theta_unit) == 2);

  auto already = theta_graph();
  CHECK(normalize_rate(already).get() == already.get());
}

TEST_CASE("eps-Nash predicate") {
  auto theta = theta_graph();
  Flow split = make_flow(theta, {{{"su", "ut"}, rat(1, 2)}, {{"sv", "vt"}, rat(1, 2)}});
  CHECK(is_eps_nash(split, 0));  // exact Nash flows are 0-Nash
  Flow lopsided = make_flow(theta, {{{"su", "ut"}, 1}});
  CHECK_FALSE(is_eps_nash(lopsided, rat(1, 2)));
  CHECK(is_eps_nash(lopsided, 1));
}

TEST_CASE("scaling invariance of costs and Nash verdicts") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> alpha_num(1, 9), alpha_den(1, 9);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_dag(rng, 3, 4, rat(1 + trial % 3));
    PathSet paths = enumerate_paths(*g);
    Flow f = random_feasible_flow(rng, g, paths);
    Rational alpha = rat(alpha_num(rng), alpha_den(rng));
    auto scaled = scale_latencies(g, alpha);
    Flow f_scaled = make_flow(scaled, f.path_flows);
    CHECK(bottleneck_cost(f_scaled).bottleneck == alpha * bottleneck_cost(f).bottleneck);
    CHECK(is_nash_flow(f_scaled).verdict == is_nash_flow(f).verdict);
  }
}

TEST_CASE("linear rate homogeneity of the bottleneck cost") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_dag(rng, 3, 3, 2);
    PathSet paths = enumerate_paths(*g);
    Flow f = random_feasible_flow(rng, g, paths);
    Rational lambda = rat(3, 2);
    auto g2 = make_instance(g->nodes, g->nodes[g->source], g->nodes[g->sink], g->edges,
                            g->rate * lambda);
    std::vector<std::pair<EdgePath, Rational>> scaled;
    for (const auto& [p, v] : f.path_flows) scaled.emplace_back(p, v * lambda);
    Flow f2 = make_flow(g2, std::move(scaled));
    CHECK(bottleneck_cost(f2).bottleneck == lambda * bottleneck_cost(f).bottleneck);
  }
}

TEST_CASE("per-path bottlenecks stay below the flow bottleneck") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_dag(rng, 3, 4, 1);
    PathSet paths = enumerate_paths(*g);
    Flow f = random_feasible_flow(rng, g, paths);
    CostReport report = bottleneck_cost(f);
    bool attained = false;
    for (const auto& [path, b] : report.path_bottlenecks) {
      CHECK(b <= report.bottleneck);
      if (b == report.bottleneck) attained = true;
    }
    CHECK(attained);
  }
}
