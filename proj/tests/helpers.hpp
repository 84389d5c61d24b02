#pragma once

// Shared fixtures, independent oracles, and random generators for the test
// suites. Oracles here deliberately avoid the library's solver paths.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "braess/constructions.hpp"
#include "braess/equilibrium.hpp"
#include "braess/game.hpp"
#include "braess/topology.hpp"

namespace braess::testing {

inline EdgeDef linear_edge(const std::string& id, int tail, int head, const Rational& a) {
  return {id, tail, head, LatencyFunction::linear(a)};
}

// Fig.-1 theta graph: identity latencies, unit rate unless overridden.
inline InstancePtr theta_graph(const Rational& rate = 1) {
  return make_instance({"s", "u", "v", "t"}, "s", "t",
                       {linear_edge("su", 0, 1, 1), linear_edge("ut", 1, 3, 1),
                        linear_edge("sv", 0, 2, 1), linear_edge("vt", 2, 3, 1),
                        linear_edge("uv", 1, 2, 1)},
                       rate);
}

inline InstancePtr single_edge(const Rational& slope, const Rational& rate) {
  return make_instance({"s", "t"}, "s", "t", {linear_edge("e", 0, 1, slope)}, rate);
}

inline InstancePtr two_parallel(const Rational& a1, const Rational& a2,
                                const Rational& rate) {
  return make_instance({"s", "t"}, "s", "t",
                       {linear_edge("e1", 0, 1, a1), linear_edge("e2", 0, 1, a2)}, rate);
}

inline TwoDDPInstance ddp_yes() {
  DirectedGraph g;
  g.nodes = {"s1", "s2", "t1", "t2"};
  g.edges = {{"a", "s1", "t1"}, {"b", "s2", "t2"}, {"c", "s1", "t2"}, {"d", "s2", "t1"}};
  return make_2ddp(std::move(g), "s1", "s2", "t1", "t2");
}

inline TwoDDPInstance ddp_no() {
  DirectedGraph g;
  g.nodes = {"s1", "s2", "w", "t1", "t2"};
  g.edges = {{"a", "s1", "w"}, {"b", "s2", "w"}, {"c", "w", "t1"}, {"d", "w", "t2"}};
  return make_2ddp(std::move(g), "s1", "s2", "t1", "t2");
}

// ---------------------------------------------------------------------------
// independent oracles
// ---------------------------------------------------------------------------

// Simple-path counter by plain recursion over an adjacency list; written
// independently of enumerate_paths.
inline long count_simple_paths_oracle(const RoutingInstance& g) {
  std::vector<char> used(g.nodes.size(), 0);
  std::function<long(int)> rec = [&](int u) -> long {
    if (u == g.sink) return 1;
    used[u] = 1;
    long total = 0;
    for (const auto& e : g.edges)
      if (e.tail == u && !used[e.head]) total += rec(e.head);
    used[u] = 0;
    return total;
  };
  return rec(g.source);
}

// All forward-edge sets of vertex bipartitions, by direct bit twiddling.
inline std::set<std::vector<std::string>> cuts_oracle(const RoutingInstance& g) {
  std::vector<int> inner;
  for (int v = 0; v < static_cast<int>(g.nodes.size()); ++v)
    if (v != g.source && v != g.sink) inner.push_back(v);
  std::set<std::vector<std::string>> cuts;
  for (unsigned mask = 0; mask < (1u << inner.size()); ++mask) {
    std::set<int> side{g.source};
    for (std::size_t i = 0; i < inner.size(); ++i)
      if (mask & (1u << i)) side.insert(inner[i]);
    std::vector<std::string> forward;
    for (const auto& e : g.edges)
      if (side.count(e.tail) && !side.count(e.head)) forward.push_back(e.id);
    std::sort(forward.begin(), forward.end());
    cuts.insert(forward);
  }
  return cuts;
}

// Enumerates grid path flows (multiples of rate/q) and reports the extremes:
// the best bottleneck over all grid flows and the worst over grid Nash flows.
struct GridExtremes {
  std::optional<Rational> min_bottleneck;
  std::optional<Rational> worst_nash;
};

inline GridExtremes grid_extremes(const InstancePtr& instance, int q) {
  PathSet paths = enumerate_paths(*instance);
  GridExtremes out;
  std::vector<int> units(paths.paths.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int remaining) {
    if (i + 1 == units.size()) {
      units[i] = remaining;
      std::vector<std::pair<EdgePath, Rational>> path_flows;
      for (std::size_t p = 0; p < units.size(); ++p)
        if (units[p] > 0)
          path_flows.emplace_back(paths.paths[p],
                                  instance->rate * units[p] / q);
      Flow flow = make_flow(instance, std::move(path_flows));
      Rational b = bottleneck_cost(flow).bottleneck;
      if (!out.min_bottleneck || b < *out.min_bottleneck) out.min_bottleneck = b;
      if (is_nash_flow(flow).verdict)
        if (!out.worst_nash || b > *out.worst_nash) out.worst_nash = b;
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      units[i] = take;
      rec(i + 1, remaining - take);
    }
  };
  if (!units.empty()) rec(0, q);
  return out;
}

// ---------------------------------------------------------------------------
// random generators
// ---------------------------------------------------------------------------

// Random layered DAG with strictly increasing linear latencies and a
// guaranteed chain s -> ... -> t.
inline InstancePtr random_dag(std::mt19937_64& rng, int max_inner_nodes, int max_extra_edges,
                              const Rational& rate, int max_slope_num = 4,
                              int max_slope_den = 4) {
  std::uniform_int_distribution<int> inner_dist(1, max_inner_nodes);
  int inner = inner_dist(rng);
  int n = inner + 2;  // nodes 0..n-1 in topological order, 0 = s, n-1 = t
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
  auto slope = [&] {
    std::uniform_int_distribution<int> num(1, max_slope_num), den(1, max_slope_den);
    return rat(num(rng), den(rng));
  };
  std::vector<EdgeDef> edges;
  int next_id = 0;
  auto add = [&](int tail, int head) {
    edges.push_back(linear_edge("e" + std::to_string(next_id++), tail, head, slope()));
  };
  for (int i = 0; i + 1 < n; ++i) add(i, i + 1);  // backbone chain
  std::uniform_int_distribution<int> extra_dist(0, max_extra_edges);
  int extra = extra_dist(rng);
  std::uniform_int_distribution<int> node_dist(0, n - 1);
  for (int k = 0; k < extra; ++k) {
    int a = node_dist(rng), b = node_dist(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    add(a, b);
  }
  return make_instance(nodes, nodes.front(), nodes.back(), std::move(edges), rate);
}

// Random two-terminal series-parallel instance built by explicit composition.
inline InstancePtr random_series_parallel(std::mt19937_64& rng, int depth,
                                          const Rational& rate) {
  int next_node = 0, next_edge = 0;
  std::vector<std::string> nodes;
  std::vector<EdgeDef> edges;
  auto fresh_node = [&] {
    nodes.push_back("n" + std::to_string(next_node++));
    return static_cast<int>(nodes.size()) - 1;
  };
  auto slope = [&] {
    std::uniform_int_distribution<int> num(1, 4), den(1, 4);
    return rat(num(rng), den(rng));
  };
  std::function<void(int, int, int)> build = [&](int s, int t, int d) {
    std::uniform_int_distribution<int> coin(0, 2);
    int choice = d <= 0 ? 0 : coin(rng);
    if (choice == 0) {
      edges.push_back(linear_edge("e" + std::to_string(next_edge++), s, t, slope()));
    } else if (choice == 1) {  // series
      int mid = fresh_node();
      build(s, mid, d - 1);
      build(mid, t, d - 1);
    } else {  // parallel
      build(s, t, d - 1);
      build(s, t, d - 1);
    }
  };
  int s = fresh_node(), t = fresh_node();
  build(s, t, depth);
  return make_instance(nodes, nodes[s], nodes[t], std::move(edges), rate);
}

// Random feasible flow over a random subset of the instance's paths.
inline Flow random_feasible_flow(std::mt19937_64& rng, const InstancePtr& instance,
                                 const PathSet& paths) {
  std::uniform_int_distribution<int> weight(0, 5);
  std::vector<int> w(paths.paths.size(), 0);
  int total = 0;
  while (total == 0)
    for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = weight(rng));
  std::vector<std::pair<EdgePath, Rational>> path_flows;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0)
      path_flows.emplace_back(paths.paths[i], instance->rate * w[i] / total);
  return make_flow(instance, std::move(path_flows));
}

}  // namespace braess::testing
