#include "braess/detail/bounded_flow.hpp"

#include <deque>
#include <functional>
#include <limits>

#include "braess/errors.hpp"

namespace braess::detail {

ResidualNetwork::ResidualNetwork(int num_nodes) : adjacency_(num_nodes) {}

int ResidualNetwork::add_arc(int tail, int head, const Rational& capacity) {
  int handle = static_cast<int>(arcs_.size());
  arcs_.push_back({head, capacity});
  arcs_.push_back({tail, Rational(0)});
  adjacency_[tail].push_back(handle);
  adjacency_[head].push_back(handle + 1);
  initial_cap_.push_back(capacity);
  initial_cap_.push_back(0);
  return handle;
}

Rational ResidualNetwork::run_max_flow(int source, int sink) {
  Rational total = 0;
  std::vector<int> parent_arc(adjacency_.size());
  while (true) {
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    parent_arc[source] = -2;
    std::deque<int> queue{source};
    while (!queue.empty() && parent_arc[sink] == -1) {
      int u = queue.front();
      queue.pop_front();
      for (int h : adjacency_[u]) {
        int v = arcs_[h].to;
        if (parent_arc[v] == -1 && arcs_[h].cap > 0) {
          parent_arc[v] = h;
          queue.push_back(v);
        }
      }
    }
    if (parent_arc[sink] == -1) break;
    Rational delta = -1;
    for (int v = sink; v != source;) {
      int h = parent_arc[v];
      if (delta < 0 || arcs_[h].cap < delta) delta = arcs_[h].cap;
      v = arcs_[h ^ 1].to;
    }
    for (int v = sink; v != source;) {
      int h = parent_arc[v];
      arcs_[h].cap -= delta;
      arcs_[h ^ 1].cap += delta;
      v = arcs_[h ^ 1].to;
    }
    total += delta;
  }
  return total;
}

Rational ResidualNetwork::flow_on(int handle) const {
  return initial_cap_[handle] - arcs_[handle].cap;
}

Rational ResidualNetwork::residual_cap(int handle) const { return arcs_[handle].cap; }

std::vector<char> ResidualNetwork::reachable(int start) const {
  std::vector<char> seen(adjacency_.size(), 0);
  std::deque<int> queue{start};
  seen[start] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int h : adjacency_[u]) {
      if (arcs_[h].cap > 0 && !seen[arcs_[h].to]) {
        seen[arcs_[h].to] = 1;
        queue.push_back(arcs_[h].to);
      }
    }
  }
  return seen;
}

namespace {

// Circulation-with-demands transform. `value_arc` adds t -> s with the given
// bounds so the s-t value can be pinned or left free.
struct Transform {
  ResidualNetwork net;
  std::vector<int> arc_handle;  // per problem arc
  int value_handle = -1;
  int super_source, super_sink;
  Rational required = 0;
};

Transform build_transform(int num_nodes, const std::vector<BoundedArc>& arcs, int source,
                          int sink, const Rational& value_lower,
                          const Rational& value_upper) {
  Transform t{ResidualNetwork(num_nodes + 2), {}, -1, num_nodes, num_nodes + 1, 0};
  std::vector<Rational> demand(num_nodes, Rational(0));
  for (const auto& a : arcs) {
    if (a.lower > a.upper) {
      // infeasible by construction; encode as an unsatisfiable demand
      demand[a.tail] += 1;
      t.required += 1;
      t.arc_handle.push_back(-1);
      continue;
    }
    t.arc_handle.push_back(t.net.add_arc(a.tail, a.head, a.upper - a.lower));
    demand[a.head] += a.lower;
    demand[a.tail] -= a.lower;
  }
  t.value_handle = t.net.add_arc(sink, source, value_upper - value_lower);
  demand[source] += value_lower;
  demand[sink] -= value_lower;
  for (int v = 0; v < num_nodes; ++v) {
    if (demand[v] > 0) {
      t.net.add_arc(t.super_source, v, demand[v]);
      t.required += demand[v];
    } else if (demand[v] < 0) {
      t.net.add_arc(v, t.super_sink, -demand[v]);
    }
  }
  return t;
}

std::optional<BoundedFlowSolution> extract(const Transform& t,
                                           const std::vector<BoundedArc>& arcs,
                                           const Rational& pushed,
                                           const Rational& value_lower) {
  if (pushed != t.required) return std::nullopt;
  BoundedFlowSolution sol;
  sol.arc_flow.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (t.arc_handle[i] < 0) return std::nullopt;
    sol.arc_flow.push_back(arcs[i].lower + t.net.flow_on(t.arc_handle[i]));
  }
  sol.value = value_lower + t.net.flow_on(t.value_handle);
  return sol;
}

Rational total_upper(const std::vector<BoundedArc>& arcs) {
  Rational sum = 1;
  for (const auto& a : arcs) sum += a.upper;
  return sum;
}

}  // namespace

std::optional<BoundedFlowSolution> feasible_flow(int num_nodes,
                                                 const std::vector<BoundedArc>& arcs,
                                                 int source, int sink) {
  Transform t = build_transform(num_nodes, arcs, source, sink, 0, total_upper(arcs));
  Rational pushed = t.net.run_max_flow(t.super_source, t.super_sink);
  return extract(t, arcs, pushed, 0);
}

std::optional<BoundedFlowSolution> min_value_flow(int num_nodes,
                                                  const std::vector<BoundedArc>& arcs,
                                                  int source, int sink) {
  auto feasible = feasible_flow(num_nodes, arcs, source, sink);
  if (!feasible) return std::nullopt;
  // Push t -> s through the bounded residual of the original arcs; every
  // pushed unit lowers the s-t value while conserving flow elsewhere.
  ResidualNetwork residual(num_nodes);
  std::vector<int> inc_handle(arcs.size()), dec_handle(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    inc_handle[i] = residual.add_arc(arcs[i].tail, arcs[i].head,
                                     arcs[i].upper - feasible->arc_flow[i]);
    dec_handle[i] = residual.add_arc(arcs[i].head, arcs[i].tail,
                                     feasible->arc_flow[i] - arcs[i].lower);
  }
  Rational pushed = residual.run_max_flow(sink, source);
  BoundedFlowSolution sol;
  sol.arc_flow.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i)
    sol.arc_flow.push_back(feasible->arc_flow[i] + residual.flow_on(inc_handle[i]) -
                           residual.flow_on(dec_handle[i]));
  sol.value = feasible->value - pushed;
  return sol;
}

std::optional<BoundedFlowSolution> fixed_value_flow(int num_nodes,
                                                    const std::vector<BoundedArc>& arcs,
                                                    int source, int sink,
                                                    const Rational& value) {
  Transform t = build_transform(num_nodes, arcs, source, sink, value, value);
  Rational pushed = t.net.run_max_flow(t.super_source, t.super_sink);
  return extract(t, arcs, pushed, value);
}

FixedValueOutcome fixed_value_flow_cut(int num_nodes, const std::vector<BoundedArc>& arcs,
                                       int source, int sink, const Rational& value) {
  Transform t = build_transform(num_nodes, arcs, source, sink, value, value);
  Rational pushed = t.net.run_max_flow(t.super_source, t.super_sink);
  FixedValueOutcome outcome;
  outcome.solution = extract(t, arcs, pushed, value);
  if (outcome.solution) return outcome;
  // Min cut of the transform (capacity = pushed < required). Only the
  // (upper - lower) caps of original arcs crossing it can grow, one-for-one
  // with the cut capacity, so the constraint on this cut reads
  //   sum_def upper_i >= required - fixed_part + sum_def lower_i.
  std::vector<char> in_cut = t.net.reachable(t.super_source);
  Rational crossing_caps = 0, lower_sum = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (t.arc_handle[i] < 0) continue;  // structurally infeasible arc
    if (in_cut[arcs[i].tail] && !in_cut[arcs[i].head]) {
      outcome.deficient_arcs.push_back(static_cast<int>(i));
      crossing_caps += arcs[i].upper - arcs[i].lower;
      lower_sum += arcs[i].lower;
    }
  }
  Rational fixed_part = pushed - crossing_caps;
  outcome.needed = t.required - fixed_part + lower_sum;
  return outcome;
}

std::vector<bool> invariant_arcs(int num_nodes, const std::vector<BoundedArc>& arcs,
                                 const BoundedFlowSolution& solution) {
  // Residual moves that keep the value fixed are exactly circulations; arc i
  // varies iff some residual cycle passes through one of its residual arcs.
  std::vector<bool> frozen(arcs.size(), true);
  auto reachable_without = [&](std::size_t skip, int from, int to) {
    std::vector<char> seen(num_nodes, 0);
    std::deque<int> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (u == to) return true;
      for (std::size_t j = 0; j < arcs.size(); ++j) {
        if (j == skip) continue;
        if (arcs[j].tail == u && solution.arc_flow[j] < arcs[j].upper && !seen[arcs[j].head]) {
          seen[arcs[j].head] = 1;
          queue.push_back(arcs[j].head);
        }
        if (arcs[j].head == u && solution.arc_flow[j] > arcs[j].lower && !seen[arcs[j].tail]) {
          seen[arcs[j].tail] = 1;
          queue.push_back(arcs[j].tail);
        }
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (solution.arc_flow[i] < arcs[i].upper &&
        reachable_without(i, arcs[i].head, arcs[i].tail)) {
      frozen[i] = false;
      continue;
    }
    if (solution.arc_flow[i] > arcs[i].lower &&
        reachable_without(i, arcs[i].tail, arcs[i].head)) {
      frozen[i] = false;
    }
  }
  return frozen;
}

void cancel_slack_cycles(int num_nodes, const std::vector<BoundedArc>& arcs,
                         BoundedFlowSolution& solution) {
  // DFS for a cycle in the subgraph of arcs strictly above their lower bound.
  while (true) {
    std::vector<std::vector<std::pair<int, int>>> adj(num_nodes);  // (head, arc)
    for (std::size_t i = 0; i < arcs.size(); ++i)
      if (solution.arc_flow[i] > arcs[i].lower)
        adj[arcs[i].tail].push_back({arcs[i].head, static_cast<int>(i)});
    std::vector<int> state(num_nodes, 0), stack_arc(num_nodes, -1), parent(num_nodes, -1);
    std::vector<int> cycle;
    std::function<bool(int)> dfs = [&](int u) {
      state[u] = 1;
      for (auto [v, ai] : adj[u]) {
        if (state[v] == 1) {
          cycle.push_back(ai);
          for (int w = u; w != v; w = parent[w]) cycle.push_back(stack_arc[w]);
          return true;
        }
        if (state[v] == 0) {
          parent[v] = u;
          stack_arc[v] = ai;
          if (dfs(v)) return true;
        }
      }
      state[u] = 2;
      return false;
    };
    bool found = false;
    for (int v = 0; v < num_nodes && !found; ++v)
      if (state[v] == 0) found = dfs(v);
    if (!found) return;
    Rational delta = -1;
    for (int ai : cycle) {
      Rational slack = solution.arc_flow[ai] - arcs[ai].lower;
      if (delta < 0 || slack < delta) delta = slack;
    }
    for (int ai : cycle) solution.arc_flow[ai] -= delta;
  }
}

}  // namespace braess::detail
