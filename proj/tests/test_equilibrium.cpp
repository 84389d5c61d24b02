#include <algorithm>
#include <random>
#include <set>

#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "braess/topology.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace braess;
using namespace braess::testing;

namespace {

// checks the certificate invariant: removing the blocking cut disconnects s-t
void check_blocking_cut(const InstancePtr& g, const NashCertificate& cert) {
  REQUIRE(cert.verdict);
  REQUIRE(cert.blocking_cut.has_value());
  std::set<std::string> cut(cert.blocking_cut->begin(), cert.blocking_cut->end());
  std::vector<std::string> rest;
  for (const auto& e : g->edges)
    if (!cut.count(e.id)) rest.push_back(e.id);
  CHECK_FALSE(has_st_path(*g, rest));
}

}  // namespace

TEST_CASE("optimal bottleneck cost") {
  auto theta = theta_graph();
  OptimalResult opt = optimal_bottleneck_cost(theta);
  CHECK(opt.cost == rat(1, 2));
  CHECK(opt.exact);
  CHECK(bottleneck_cost(opt.witness).bottleneck == rat(1, 2));

  GapNetwork gap = build_gap_network(ddp_yes(), rat(1, 8), 12);
  CHECK(optimal_bottleneck_cost(gap.instance).cost == 3);

  // B + B/2 = 1 at the single cut, so B = 2/3; the grid agrees
  auto skewed = two_parallel(1, 2, 1);
  OptimalResult sk = optimal_bottleneck_cost(skewed);
  CHECK(sk.cost == rat(2, 3));
  auto loads = edge_loads(sk.witness);
  CHECK(loads.at("e1") == rat(2, 3));
  CHECK(loads.at("e2") == rat(1, 3));
  GridExtremes grid = grid_extremes(skewed, 12);
  REQUIRE(grid.min_bottleneck.has_value());
  CHECK(*grid.min_bottleneck >= sk.cost);
}

TEST_CASE("optimal cost stays exact for affine latencies") {
  // caps lambda-1 and lambda/2 meet the unit rate at lambda = 4/3
  auto g = make_instance({"s", "t"}, "s", "t",
                         {{"e1", 0, 1, LatencyFunction::affine(1, 1)},
                          {"e2", 0, 1, LatencyFunction::affine(2, 0)}},
                         1);
  OptimalResult opt = optimal_bottleneck_cost(g);
  CHECK(opt.exact);
  CHECK(opt.cost == rat(4, 3));
  auto loads = edge_loads(opt.witness);
  CHECK(loads.at("e1") == rat(1, 3));
  CHECK(loads.at("e2") == rat(2, 3));
  CHECK(is_nash_flow(opt.witness).verdict);

  // constant edges only gate the level, they never carry cost growth
  auto mixed = make_instance({"s", "m", "t"}, "s", "t",
                             {{"c", 0, 1, LatencyFunction::affine(0, rat(1, 2))},
                              {"x", 1, 2, LatencyFunction::affine(1, 0)}},
                             2);
  OptimalResult mo = optimal_bottleneck_cost(mixed);
  CHECK(mo.exact);
  CHECK(mo.cost == 2);  // the linear edge at full load dominates the constant
}

TEST_CASE("optimal cost via bisection for monotone latencies") {
  // one edge linear x, one edge tabulated sqrt-ish curve
  auto pl = LatencyFunction::monotone({{0, 0}, {1, 1}, {2, rat(3, 2)}}, 1);
  auto g = make_instance({"s", "t"}, "s", "t",
                         {linear_edge("e1", 0, 1, 1), {"e2", 0, 1, pl}}, 1);
  OptimalResult opt = optimal_bottleneck_cost(g);
  CHECK_FALSE(opt.exact);
  // balance: x + y = 1 with x = cost = c(y); true optimum cost 1/2 at x=y=1/2
  Rational err = opt.cost - rat(1, 2);
  CHECK(err >= 0);
  CHECK(err <= rat(1, 100000000));
}

TEST_CASE("Nash certificates on the theta graph") {
  auto theta = theta_graph();
  SUBCASE("worst flow is Nash with a two-edge bipartition inside its cut") {
    Flow middle = make_flow(theta, {{{"su", "uv", "vt"}, 1}});
    NashCertificate cert = is_nash_flow(middle);
    check_blocking_cut(theta, cert);
    // the canonical two-edge cut is contained in the blocking set
    std::set<std::string> cut(cert.blocking_cut->begin(), cert.blocking_cut->end());
    CHECK(cut.count("su"));
    CHECK(cut.count("vt"));
  }
  SUBCASE("an unused free path refutes Nash") {
    Flow lopsided = make_flow(theta, {{{"su", "ut"}, 1}});
    NashCertificate cert = is_nash_flow(lopsided);
    CHECK_FALSE(cert.verdict);
    REQUIRE(cert.violation.has_value());
    CHECK(*cert.violation == EdgePath{"sv", "vt"});
  }
  SUBCASE("the Braess subnetwork has the optimal flow as its Nash flow") {
    auto sub = subnetwork(theta, {"su", "ut", "sv", "vt"});
    REQUIRE(sub);
    Flow split = make_flow(sub, {{{"su", "ut"}, rat(1, 2)}, {{"sv", "vt"}, rat(1, 2)}});
    NashCertificate cert = is_nash_flow(split);
    check_blocking_cut(sub, cert);
    CHECK(cert.blocking_cut->size() == 4);  // every edge sits at the bottleneck
  }
}

TEST_CASE("worst equilibrium bottleneck cost") {
  auto theta = theta_graph();
  WorstNashResult worst = worst_nash_flow(theta);
  CHECK(worst.cost == 1);
  CHECK(worst.exhaustive);
  CHECK(is_nash_flow(worst.flow).verdict);
  CHECK(worst.cut == std::vector<std::string>{"su", "vt"});

  GapNetwork gap_no = build_gap_network(ddp_no(), rat(1, 8), 12);
  CHECK(worst_nash_flow(gap_no.instance).cost == 4);

  auto twin = two_parallel(1, 1, 1);
  WorstNashResult tw = worst_nash_flow(twin);
  CHECK(tw.cost == rat(1, 2));
  auto loads = edge_loads(tw.flow);
  CHECK(loads.at("e1") == rat(1, 2));
  CHECK(loads.at("e2") == rat(1, 2));

  auto affine = make_instance(
      {"s", "t"}, "s", "t", {{"e", 0, 1, LatencyFunction::affine(1, 1)}}, 1);
  CHECK_THROWS_AS(worst_nash_flow(affine), Error);
}

TEST_CASE("worst Nash dominates the grid oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    auto g = random_dag(rng, 3, 3, rat(1 + trial % 2));
    WorstNashResult worst = worst_nash_flow(g);
    GridExtremes grid = grid_extremes(g, 6);
    if (grid.worst_nash) CHECK(worst.cost >= *grid.worst_nash);
    REQUIRE(grid.min_bottleneck.has_value());
    CHECK(optimal_bottleneck_cost(g).cost <= *grid.min_bottleneck);
  }
}

TEST_CASE("worst Nash exists and dominates the optimum on every linear instance") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 25; ++trial) {
    auto g = random_dag(rng, 4, 5, rat(2, 1 + trial % 3));
    OptimalResult opt = optimal_bottleneck_cost(g);
    CHECK(is_nash_flow(opt.witness).verdict);  // Nash-optimal flow exists
    WorstNashResult worst = worst_nash_flow(g);
    CHECK(worst.cost >= opt.cost);
    CHECK(bottleneck_cost(worst.flow).bottleneck == worst.cost);
  }
}

TEST_CASE("worst Nash scales linearly with the rate") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_dag(rng, 3, 4, 1);
    Rational lambda = rat(5, 2);
    auto scaled = make_instance(g->nodes, g->nodes[g->source], g->nodes[g->sink], g->edges,
                                g->rate * lambda);
    CHECK(worst_nash_flow(scaled).cost == lambda * worst_nash_flow(g).cost);
  }
}

TEST_CASE("subnetworks cannot beat the parent optimum") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 15; ++trial) {
    auto g = random_dag(rng, 3, 4, 1);
    OptimalResult opt = optimal_bottleneck_cost(g);
    for (int attempt = 0; attempt < 4; ++attempt) {
      std::vector<std::string> keep;
      for (const auto& e : g->edges)
        if (coin(rng)) keep.push_back(e.id);
      InstancePtr sub = subnetwork(g, keep);
      if (!sub) continue;
      CHECK(optimal_bottleneck_cost(sub).cost >= opt.cost);
      CHECK(worst_nash_flow(sub).cost >= opt.cost);
    }
  }
}

TEST_CASE("subpath-optimal Nash flows") {
  auto theta = theta_graph();
  SubpathOptimalResult res = subpath_optimal_nash_flow(theta);
  REQUIRE(res.flow.path_flows.size() == 2);
  CHECK(res.flow.path_flows[0].first == EdgePath{"su", "ut"});
  CHECK(res.flow.path_flows[0].second == rat(1, 2));
  CHECK(res.flow.path_flows[1].second == rat(1, 2));
  CHECK(res.labels.labels.at("s") == 0);
  CHECK(res.labels.labels.at("u") == rat(1, 2));
  CHECK(res.labels.labels.at("v") == rat(1, 2));
  CHECK(res.labels.labels.at("t") == rat(1, 2));

  // single-path network: the unique flow, labels are prefix maxima
  auto chain = make_instance({"s", "u", "t"}, "s", "t",
                             {linear_edge("a", 0, 1, 2), linear_edge("b", 1, 2, 1)}, 1);
  SubpathOptimalResult ch = subpath_optimal_nash_flow(chain);
  REQUIRE(ch.flow.path_flows.size() == 1);
  CHECK(ch.labels.labels.at("u") == 2);
  CHECK(ch.labels.labels.at("t") == 2);

  GapNetwork gap = build_gap_network(ddp_yes(), rat(1, 8), 12);
  SubpathOptimalResult gp = subpath_optimal_nash_flow(gap.instance);
  CHECK(bottleneck_cost(gp.flow).bottleneck == 3);  // equals B*
}

TEST_CASE("subpath-optimal flows match the optimum on random instances") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_dag(rng, 3, 4, rat(1 + trial % 3, 1 + trial % 2));
    SubpathOptimalResult res = subpath_optimal_nash_flow(g);
    CHECK(bottleneck_cost(res.flow).bottleneck == optimal_bottleneck_cost(g).cost);
    // labels never decrease along used-path prefixes
    CostReport report = bottleneck_cost(res.flow);
    for (const auto& [path, amount] : res.flow.path_flows) {
      Rational previous = 0;
      for (const auto& id : path) {
        const auto& e = g->edge(id);
        Rational label = res.labels.labels.at(g->nodes[e.head]);
        CHECK(label >= previous);
        previous = label;
      }
    }
  }
}

TEST_CASE("price of anarchy") {
  CHECK(price_of_anarchy(theta_graph()) == 2);
  GapNetwork gap = build_gap_network(ddp_yes(), rat(1, 8), 12);
  CHECK(price_of_anarchy(gap.instance) == rat(4, 3));

  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto sp = random_series_parallel(rng, 3, 1);
    CHECK(price_of_anarchy(sp) == 1);  // series-parallel networks are paradox-free
  }
}

TEST_CASE("series-parallel worst equals optimum") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 15; ++trial) {
    auto sp = random_series_parallel(rng, 4, rat(1 + trial % 4, 1 + trial % 3));
    CHECK(worst_nash_flow(sp).cost == optimal_bottleneck_cost(sp).cost);
  }
}
