#include "braess/topology.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "braess/detail/bounded_flow.hpp"
#include "braess/errors.hpp"

namespace braess {

PathSet enumerate_paths(const RoutingInstance& instance, std::size_t max_paths) {
  PathSet result;
  std::vector<char> on_path(instance.nodes.size(), 0);
  std::vector<std::string> current;
  // out_edges is sorted by edge id, so DFS emits paths in lexicographic
  // order of their edge-id sequences.
  std::function<void(int)> dfs = [&](int u) {
    if (u == instance.sink) {
      if (result.paths.size() >= max_paths)
        fail(ErrorKind::Capacity,
             "path enumeration exceeds max_paths = " + std::to_string(max_paths));
      result.paths.push_back(current);
      return;
    }
    on_path[u] = 1;
    for (int ei : instance.out_edges[u]) {
      int v = instance.edges[ei].head;
      if (on_path[v] || v == instance.source) continue;
      current.push_back(instance.edges[ei].id);
      dfs(v);
      current.pop_back();
    }
    on_path[u] = 0;
  };
  dfs(instance.source);
  return result;
}

std::vector<std::vector<std::string>> enumerate_st_cuts(const RoutingInstance& instance,
                                                        int node_bound) {
  int n = static_cast<int>(instance.nodes.size());
  if (n > node_bound)
    fail(ErrorKind::Capacity, "cut enumeration bound exceeded: " + std::to_string(n) +
                                  " nodes > " + std::to_string(node_bound));
  std::vector<int> inner;
  for (int v = 0; v < n; ++v)
    if (v != instance.source && v != instance.sink) inner.push_back(v);
  std::set<std::vector<std::string>> cuts;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner.size()); ++mask) {
    std::vector<char> in_s(n, 0);
    in_s[instance.source] = 1;
    for (std::size_t i = 0; i < inner.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) in_s[inner[i]] = 1;
    std::vector<std::string> forward;
    for (const auto& e : instance.edges)
      if (in_s[e.tail] && !in_s[e.head]) forward.push_back(e.id);
    std::sort(forward.begin(), forward.end());
    cuts.insert(std::move(forward));
  }
  std::vector<std::vector<std::string>> result(cuts.begin(), cuts.end());
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return result;
}

MaxFlowResult max_flow_with_witness(const RoutingInstance& instance,
                                    const std::map<std::string, Rational>& capacities) {
  detail::ResidualNetwork net(static_cast<int>(instance.nodes.size()));
  std::vector<int> handles;
  for (const auto& e : instance.edges) {
    auto it = capacities.find(e.id);
    Rational cap = it == capacities.end() ? Rational(0) : it->second;
    if (cap < 0) fail(ErrorKind::Domain, "negative capacity on edge " + e.id);
    handles.push_back(net.add_arc(e.tail, e.head, cap));
  }
  MaxFlowResult result;
  result.value = net.run_max_flow(instance.source, instance.sink);
  for (std::size_t i = 0; i < instance.edges.size(); ++i)
    result.edge_flow[instance.edges[i].id] = net.flow_on(handles[i]);
  return result;
}

Rational max_flow(const RoutingInstance& instance,
                  const std::map<std::string, Rational>& capacities) {
  return max_flow_with_witness(instance, capacities).value;
}

namespace {

struct SuperEdge {
  int tail, head;
  std::shared_ptr<SPNode> node;
};

}  // namespace

std::optional<SPDecomposition> series_parallel_decompose(const RoutingInstance& instance) {
  std::vector<SuperEdge> edges;
  for (const auto& e : instance.edges) {
    auto node = std::make_shared<SPNode>();
    node->kind = SPNode::Kind::Leaf;
    node->edge_id = e.id;
    node->s = instance.nodes[e.tail];
    node->t = instance.nodes[e.head];
    edges.push_back({e.tail, e.head, node});
  }
  int n = static_cast<int>(instance.nodes.size());
  std::vector<char> consumed(n, 0);

  bool progress = true;
  while (progress && edges.size() > 1) {
    progress = false;
    // parallel reduction: first duplicate (tail, head) pair in scan order
    for (std::size_t i = 0; i < edges.size() && !progress; ++i) {
      for (std::size_t j = i + 1; j < edges.size() && !progress; ++j) {
        if (edges[i].tail == edges[j].tail && edges[i].head == edges[j].head) {
          auto node = std::make_shared<SPNode>();
          node->kind = SPNode::Kind::Parallel;
          node->s = edges[i].node->s;
          node->t = edges[i].node->t;
          node->children = {edges[i].node, edges[j].node};
          edges[i].node = node;
          edges.erase(edges.begin() + static_cast<long>(j));
          progress = true;
        }
      }
    }
    if (progress) continue;
    // series reduction: internal vertex with exactly one in and one out edge
    for (int v = 0; v < n && !progress; ++v) {
      if (v == instance.source || v == instance.sink || consumed[v]) continue;
      int in_i = -1, out_i = -1, in_count = 0, out_count = 0;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].head == v) {
          ++in_count;
          in_i = static_cast<int>(i);
        }
        if (edges[i].tail == v) {
          ++out_count;
          out_i = static_cast<int>(i);
        }
      }
      if (in_count != 1 || out_count != 1) continue;
      if (edges[in_i].tail == edges[out_i].head) continue;  // would form a loop
      auto node = std::make_shared<SPNode>();
      node->kind = SPNode::Kind::Series;
      node->s = edges[in_i].node->s;
      node->t = edges[out_i].node->t;
      node->children = {edges[in_i].node, edges[out_i].node};
      edges[in_i].node = node;
      edges[in_i].head = edges[out_i].head;
      edges.erase(edges.begin() + out_i);
      consumed[v] = 1;
      progress = true;
    }
  }

  if (edges.size() != 1 || edges[0].tail != instance.source ||
      edges[0].head != instance.sink)
    return std::nullopt;
  for (int v = 0; v < n; ++v)
    if (v != instance.source && v != instance.sink && !consumed[v]) return std::nullopt;
  return SPDecomposition{edges[0].node};
}

PathDecomposition decompose_edge_flow(const RoutingInstance& instance,
                                      std::map<std::string, Rational> edge_flow) {
  PathDecomposition result;
  while (true) {
    // BFS through positively loaded edges, in id order via out_edges
    std::vector<int> parent_edge(instance.nodes.size(), -1);
    parent_edge[instance.source] = -2;
    std::deque<int> queue{instance.source};
    while (!queue.empty() && parent_edge[instance.sink] == -1) {
      int u = queue.front();
      queue.pop_front();
      for (int ei : instance.out_edges[u]) {
        const auto& e = instance.edges[ei];
        auto it = edge_flow.find(e.id);
        if (it == edge_flow.end() || it->second <= 0) continue;
        if (parent_edge[e.head] == -1) {
          parent_edge[e.head] = ei;
          queue.push_back(e.head);
        }
      }
    }
    if (parent_edge[instance.sink] == -1) break;
    EdgePath path;
    Rational delta = -1;
    for (int v = instance.sink; v != instance.source;) {
      const auto& e = instance.edges[parent_edge[v]];
      path.push_back(e.id);
      if (delta < 0 || edge_flow[e.id] < delta) delta = edge_flow[e.id];
      v = e.tail;
    }
    std::reverse(path.begin(), path.end());
    for (const auto& id : path) edge_flow[id] -= delta;
    result.paths.emplace_back(std::move(path), delta);
  }
  for (const auto& [id, residual] : edge_flow)
    if (residual != 0) result.dropped_cycles = true;
  return result;
}

}  // namespace braess
