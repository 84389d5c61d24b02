#include <random>
#include <set>

#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "braess/subnet_search.hpp"
#include "braess/topology.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace braess;
using namespace braess::testing;

TEST_CASE("sparsity bound k(eps)") {
  CHECK(k_of_eps(1, 1) == 1);            // floor(ln 2 / 2) + 1
  CHECK(k_of_eps(rat(1, 2), 8) == 6);    // floor(ln 16 / (1/2)) + 1
  CHECK(k_of_eps(rat(1, 10), 100) == 265);
  CHECK(k_of_eps(rat(1, 2), 8, LogBase::Two) >= k_of_eps(rat(1, 2), 8));
  CHECK_THROWS_AS(k_of_eps(0, 4), Error);
}

TEST_CASE("candidate flow enumeration") {
  CHECK(count_candidate_flows(2, 1) == 2);
  CHECK(count_candidate_flows(2, 2) == 5);
  CHECK(count_candidate_flows(3, 2) == 9);

  auto twin = two_parallel(1, 1, 1);
  PathSet paths = enumerate_paths(*twin);
  std::vector<std::vector<int>> seen;
  enumerate_candidate_flows(twin, paths, 2, [&](const CandidateFlow& cf) {
    std::vector<int> counts(paths.paths.size(), 0);
    for (const auto& [path, count] : cf.multiset)
      for (std::size_t p = 0; p < paths.paths.size(); ++p)
        if (paths.paths[p] == path) counts[p] = count;
    seen.push_back(counts);
    Rational total = 0;
    for (const auto& [path, amount] : cf.flow.path_flows) total += amount;
    CHECK(total == 1);  // derived flows are rate-1 feasible
  });
  std::vector<std::vector<int>> expected = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  CHECK(seen == expected);

  CHECK_THROWS_AS(
      enumerate_candidate_flows(twin, paths, 2, [](const CandidateFlow&) {}, 3),
      Error);  // bound reports the count
}

TEST_CASE("sparsification") {
  auto theta = theta_graph();
  SUBCASE("flows already on few paths come back exactly") {
    Flow half = make_flow(theta, {{{"su", "ut"}, rat(1, 2)}, {{"sv", "vt"}, rat(1, 2)}});
    CandidateFlow cf = sparsify_flow(half, rat(1, 2));
    CHECK(cf.size == 2);
    REQUIRE(cf.multiset.size() == 2);
    CHECK(cf.multiset[0].second == 1);
    CHECK(cf.multiset[1].second == 1);
    // deviation zero: loads agree edge by edge
    CHECK(edge_loads(cf.flow) == edge_loads(half));
    // floor(ln 10 / (1/2)) + 1 paths available at this eps
    CHECK(k_of_eps(rat(1, 2), 5) == 5);
  }
  SUBCASE("single-path flows stay a single path") {
    Flow single = make_flow(theta, {{{"su", "uv", "vt"}, 1}});
    CandidateFlow cf = sparsify_flow(single, rat(1, 4));
    CHECK(cf.size == 1);
    CHECK(cf.multiset.size() == 1);
  }
  SUBCASE("awkward rationals fall back to sampling within the bound") {
    Flow f = make_flow(theta, {{{"su", "ut"}, rat(1, 97)}, {{"sv", "vt"}, rat(96, 97)}});
    CandidateFlow cf = sparsify_flow(f, rat(1, 2), 0);
    CHECK(cf.size <= k_of_eps(rat(1, 2), 5));
    auto orig = edge_loads(f);
    auto sparse = edge_loads(cf.flow);
    for (const auto& e : theta->edges) {
      if (orig.at(e.id) == 0) {
        CHECK(sparse.at(e.id) == 0);
      } else {
        Rational dev = sparse.at(e.id) - orig.at(e.id);
        if (dev < 0) dev = -dev;
        CHECK(dev <= rat(1, 2));
      }
    }
  }
  SUBCASE("requires a rate-1 instance") {
    auto scaled = theta_graph(2);
    Flow f = make_flow(scaled, {{{"su", "ut"}, 1}, {{"sv", "vt"}, 1}});
    CHECK_THROWS_AS(sparsify_flow(f, rat(1, 2)), Error);
  }
}

TEST_CASE("sparsification bounds hold over random flows") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 25; ++trial) {
    auto g = random_dag(rng, 4, 5, 1);
    PathSet paths = enumerate_paths(*g);
    Flow f = random_feasible_flow(rng, g, paths);
    Rational eps = trial % 2 == 0 ? rat(1, 4) : rat(1, 2);
    CandidateFlow cf = sparsify_flow(f, eps, trial);
    CHECK(cf.size <= k_of_eps(eps, static_cast<int>(g->edges.size())));
    auto orig = edge_loads(f);
    auto sparse = edge_loads(cf.flow);
    for (const auto& e : g->edges) {
      if (orig.at(e.id) == 0) {
        CHECK(sparse.at(e.id) == 0);
      } else {
        Rational dev = sparse.at(e.id) - orig.at(e.id);
        if (dev < 0) dev = -dev;
        CHECK(dev <= eps);
      }
    }
  }
}

TEST_CASE("exhaustive best subnetwork on the theta graph") {
  auto theta = theta_graph();
  SubnetworkReport report = exhaustive_best_subnetwork(theta);
  CHECK(report.subnetwork == std::vector<std::string>{"su", "sv", "ut", "vt"});
  CHECK(report.worst_cost == rat(1, 2));
  CHECK(*report.classification == ParadoxClass::ParadoxRidden);
  CHECK(*report.improvement == 2);
  CHECK(is_nash_flow(report.witness).verdict);

  CHECK_THROWS_AS(exhaustive_best_subnetwork(theta, 3), Error);
  auto affine = make_instance(
      {"s", "t"}, "s", "t", {{"e", 0, 1, LatencyFunction::affine(1, 1)}}, 1);
  CHECK_THROWS_AS(exhaustive_best_subnetwork(affine), Error);
  auto idle = make_instance(theta->nodes, "s", "t", theta->edges, 0);
  CHECK_THROWS_AS(exhaustive_best_subnetwork(idle), Error);
}

TEST_CASE("exhaustive minimum dominates the optimum") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = random_dag(rng, 3, 3, 1);
    SubnetworkReport report = exhaustive_best_subnetwork(g);
    OptimalResult opt = optimal_bottleneck_cost(g);
    CHECK(report.worst_cost >= opt.cost);
    REQUIRE(report.improvement.has_value());
    CHECK(*report.improvement >= 1);
    CHECK(*report.improvement <= price_of_anarchy(g));
  }
}

TEST_CASE("paradox classification") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 8; ++trial) {
    auto sp = random_series_parallel(rng, 3, 1);
    if (sp->edges.size() > 12) continue;
    SubnetworkReport report = classify_paradox(sp);
    CHECK(*report.classification == ParadoxClass::ParadoxFree);
    CHECK(*report.improvement == 1);
  }
}

TEST_CASE("approximation on two identical parallel edges") {
  auto twin = two_parallel(1, 1, 1);
  ApproxParams params = make_approx_params(1, rat(1, 4), 1, 2);
  CHECK(params.eps1 == rat(1, 4));
  CHECK(params.eps2 == rat(1, 2));
  ApproxResult res = approx_best_subnetwork(twin, params);
  CHECK(res.subnetwork == std::vector<std::string>{"e1", "e2"});
  CHECK(res.candidate_cost == rat(3, 4));  // worst eps2-Nash candidate on H*
  CHECK(is_eps_nash(res.flow, params.eps2));

  // contracts against the exhaustive oracle
  SubnetworkReport exact = exhaustive_best_subnetwork(twin);
  CHECK(res.candidate_cost <= exact.worst_cost + params.eps);            // (ii)
  InstancePtr chosen = subnetwork(twin, res.subnetwork);
  REQUIRE(chosen);
  Rational chosen_worst = worst_nash_flow(chosen).cost;
  CHECK(chosen_worst <= res.candidate_cost + params.eps / 4);            // (iii)
  CHECK(res.candidate_cost <= chosen_worst + params.eps / 2);            // (iv)
}

TEST_CASE("approximation keeps single-path networks intact") {
  auto chain = make_instance({"s", "u", "t"}, "s", "t",
                             {linear_edge("a", 0, 1, 1), linear_edge("b", 1, 2, 1)}, 1);
  ApproxParams params = make_approx_params(rat(1, 2), rat(1, 4), 1, 2);
  ApproxResult res = approx_best_subnetwork(chain, params);
  CHECK(res.subnetwork == std::vector<std::string>{"a", "b"});
  CHECK(res.candidate_cost == 1);
  CHECK(worst_nash_flow(subnetwork(chain, res.subnetwork)).cost == 1);
}

TEST_CASE("approximation on the theta graph") {
  auto theta = theta_graph();
  ApproxParams params = make_approx_params(rat(1, 2), rat(1, 4), 1, 5);
  ApproxResult res = approx_best_subnetwork(theta, params);
  SubnetworkReport exact = exhaustive_best_subnetwork(theta);
  CHECK(exact.worst_cost == rat(1, 2));
  InstancePtr chosen = subnetwork(theta, res.subnetwork);
  REQUIRE(chosen);
  // chaining (ii) and (iii): B(H, 1) <= B(H*, 1) + eps + eps/4
  CHECK(worst_nash_flow(chosen).cost <= exact.worst_cost + rat(5, 8));
  CHECK(is_eps_nash(res.flow, params.eps2));
}

TEST_CASE("reports are deterministic") {
  auto theta = theta_graph();
  ApproxParams params = make_approx_params(rat(1, 2), rat(1, 4), 1, 5);
  ApproxResult a = approx_best_subnetwork(theta, params);
  ApproxResult b = approx_best_subnetwork(theta, params);
  CHECK(a.subnetwork == b.subnetwork);
  CHECK(a.candidate_cost == b.candidate_cost);
  CHECK(a.flow.path_flows == b.flow.path_flows);

  Flow half = make_flow(theta, {{{"su", "ut"}, rat(1, 97)}, {{"sv", "vt"}, rat(96, 97)}});
  CandidateFlow c1 = sparsify_flow(half, rat(1, 2), 5);
  CandidateFlow c2 = sparsify_flow(half, rat(1, 2), 5);
  CHECK(c1.multiset == c2.multiset);
}
