#include "braess/constructions.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "braess/topology.hpp"

namespace braess {

namespace {

struct DigraphView {
  const DirectedGraph& g;
  std::map<std::string, std::vector<std::size_t>> out;  // node -> edge indices

  explicit DigraphView(const DirectedGraph& graph) : g(graph) {
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      out[std::get<1>(g.edges[i])].push_back(i);
    for (auto& [n, v] : out)
      std::sort(v.begin(), v.end(), [&](std::size_t a, std::size_t b) {
        return std::get<0>(g.edges[a]) < std::get<0>(g.edges[b]);
      });
  }
};

bool reaches(const DirectedGraph& g, const std::set<std::string>& allowed_edges,
             const std::string& from, const std::string& to) {
  std::set<std::string> seen{from};
  std::deque<std::string> queue{from};
  while (!queue.empty()) {
    std::string u = queue.front();
    queue.pop_front();
    if (u == to) return true;
    for (const auto& [id, tail, head] : g.edges) {
      if (tail != u || !allowed_edges.count(id)) continue;
      if (seen.insert(head).second) queue.push_back(head);
    }
  }
  return false;
}

std::set<std::string> all_edge_ids(const DirectedGraph& g) {
  std::set<std::string> ids;
  for (const auto& [id, tail, head] : g.edges) ids.insert(id);
  return ids;
}

// All simple paths from -> to, emitted through the callback; stops early when
// the callback returns true.
bool for_each_simple_path(const DigraphView& view, const std::string& from,
                          const std::string& to,
                          const std::function<bool(const std::vector<std::size_t>&)>& cb) {
  std::vector<std::size_t> current;
  std::set<std::string> on_path{from};
  std::function<bool(const std::string&)> dfs = [&](const std::string& u) -> bool {
    if (u == to) return cb(current);
    auto it = view.out.find(u);
    if (it == view.out.end()) return false;
    for (std::size_t ei : it->second) {
      const auto& head = std::get<2>(view.g.edges[ei]);
      if (on_path.count(head)) continue;
      on_path.insert(head);
      current.push_back(ei);
      if (dfs(head)) return true;
      current.pop_back();
      on_path.erase(head);
    }
    return false;
  };
  return dfs(from);
}

}  // namespace

TwoDDPInstance make_2ddp(DirectedGraph network, const std::string& s1, const std::string& s2,
                         const std::string& t1, const std::string& t2) {
  std::set<std::string> node_set(network.nodes.begin(), network.nodes.end());
  for (const auto& term : {s1, s2, t1, t2})
    if (!node_set.count(term))
      fail(ErrorKind::Structure, "2DDP terminal not among the nodes: " + term);
  {
    std::set<std::string> distinct{s1, s2, t1, t2};
    if (distinct.size() != 4) fail(ErrorKind::Structure, "2DDP terminals must be distinct");
  }
  std::set<std::string> ids;
  for (const auto& [id, tail, head] : network.edges) {
    if (!ids.insert(id).second) fail(ErrorKind::Structure, "duplicate edge id: " + id);
    if (!node_set.count(tail) || !node_set.count(head))
      fail(ErrorKind::Structure, "edge endpoint not among the nodes: " + id);
  }

  TwoDDPInstance d;
  d.network = std::move(network);
  d.s1 = s1;
  d.s2 = s2;
  d.t1 = t1;
  d.t2 = t2;

  // the reduction's promise: edge-disjoint s1 -> t2 and s2 -> t1 paths
  DigraphView view(d.network);
  bool found = for_each_simple_path(view, s1, t2, [&](const std::vector<std::size_t>& p) {
    std::set<std::string> remaining = all_edge_ids(d.network);
    for (std::size_t ei : p) remaining.erase(std::get<0>(d.network.edges[ei]));
    if (!reaches(d.network, remaining, s2, t1)) return false;
    d.cross_path_s1_t2.clear();
    for (std::size_t ei : p) d.cross_path_s1_t2.push_back(std::get<0>(d.network.edges[ei]));
    // shortest q via BFS on the remaining edges
    std::map<std::string, std::string> parent_edge;
    std::deque<std::string> queue{s2};
    std::set<std::string> seen{s2};
    while (!queue.empty()) {
      std::string u = queue.front();
      queue.pop_front();
      if (u == t1) break;
      for (const auto& [id, tail, head] : d.network.edges) {
        if (tail != u || !remaining.count(id) || seen.count(head)) continue;
        seen.insert(head);
        parent_edge[head] = id;
        queue.push_back(head);
      }
    }
    d.cross_path_s2_t1.clear();
    std::string v = t1;
    while (v != s2) {
      const std::string& id = parent_edge.at(v);
      d.cross_path_s2_t1.push_back(id);
      for (const auto& [eid, tail, head] : d.network.edges)
        if (eid == id) v = tail;
    }
    std::reverse(d.cross_path_s2_t1.begin(), d.cross_path_s2_t1.end());
    return true;
  });
  if (!found)
    fail(ErrorKind::Structure,
         "2DDP instance lacks edge-disjoint s1-t2 and s2-t1 paths");
  return d;
}

TwoDDPVerdict classify_2ddp(const TwoDDPInstance& d, int node_bound) {
  if (static_cast<int>(d.network.nodes.size()) > node_bound)
    fail(ErrorKind::Capacity, "2DDP brute force bound exceeded");
  DigraphView view(d.network);
  TwoDDPVerdict verdict;
  for_each_simple_path(view, d.s1, d.t1, [&](const std::vector<std::size_t>& p) {
    std::set<std::string> blocked{d.s1, d.t1};
    for (std::size_t ei : p) {
      blocked.insert(std::get<1>(d.network.edges[ei]));
      blocked.insert(std::get<2>(d.network.edges[ei]));
    }
    if (blocked.count(d.s2) || blocked.count(d.t2)) return false;
    // s2 -> t2 avoiding the blocked vertices
    std::map<std::string, std::string> parent_edge;
    std::deque<std::string> queue{d.s2};
    std::set<std::string> seen{d.s2};
    bool ok = false;
    while (!queue.empty() && !ok) {
      std::string u = queue.front();
      queue.pop_front();
      for (const auto& [id, tail, head] : d.network.edges) {
        if (tail != u || seen.count(head) || blocked.count(head)) continue;
        seen.insert(head);
        parent_edge[head] = id;
        if (head == d.t2) {
          ok = true;
          break;
        }
        queue.push_back(head);
      }
    }
    if (!ok) return false;
    verdict.yes = true;
    for (std::size_t ei : p) verdict.path_s1_t1.push_back(std::get<0>(d.network.edges[ei]));
    std::string v = d.t2;
    while (v != d.s2) {
      const std::string& id = parent_edge.at(v);
      verdict.path_s2_t2.push_back(id);
      for (const auto& [eid, tail, head] : d.network.edges)
        if (eid == id) v = tail;
    }
    std::reverse(verdict.path_s2_t2.begin(), verdict.path_s2_t2.end());
    return true;
  });
  return verdict;
}

bool is_good_subnetwork(const TwoDDPInstance& d, const std::vector<std::string>& edge_ids) {
  std::set<std::string> sub(edge_ids.begin(), edge_ids.end());
  auto r = [&](const std::string& a, const std::string& b) {
    return reaches(d.network, sub, a, b);
  };
  bool i1 = (r(d.s1, d.t1) || r(d.s1, d.t2)) && (r(d.s2, d.t1) || r(d.s2, d.t2));
  bool i2 = (r(d.s1, d.t1) || r(d.s2, d.t1)) && (r(d.s1, d.t2) || r(d.s2, d.t2));
  bool i3 = !r(d.s1, d.t2) || !r(d.s2, d.t1);
  return i1 && i2 && i3;
}

// ---------------------------------------------------------------------------
// gadget generators
// ---------------------------------------------------------------------------

namespace {

GadgetMetadata to_metadata(const GapNetwork& gap) {
  GadgetMetadata meta;
  meta.gamma1 = gap.gamma1;
  meta.gamma2 = gap.gamma2;
  meta.level = gap.level;
  meta.eps = gap.eps;
  meta.external_edges = gap.external_edges;
  meta.d_copies = gap.d_copies;
  return meta;
}

}  // namespace

GapNetwork build_gap_network(const TwoDDPInstance& d, const Rational& eps,
                             const Rational& rate) {
  if (eps <= 0 || eps >= rat(1, 4))
    fail(ErrorKind::Domain, "gap construction requires eps in (0, 1/4)");
  GapNetwork gap;
  gap.gamma1 = 4;
  gap.gamma2 = 3;
  gap.level = 0;
  gap.eps = eps;

  std::vector<std::string> nodes{"s", "t", "u", "v"};
  for (const auto& n : d.network.nodes) nodes.push_back("D." + n);
  auto host = [](const std::string& n) { return "D." + n; };

  std::vector<std::tuple<std::string, std::string, std::string, LatencyFunction>> defs = {
      {"e1", "s", "u", LatencyFunction::linear(rat(1, 2))},
      {"e2", "u", "v", LatencyFunction::linear(eps)},
      {"e3", "v", "t", LatencyFunction::linear(rat(1, 2))},
      {"e4", "s", "v", LatencyFunction::linear(1)},
      {"e5", "v", host(d.s1), LatencyFunction::linear(1)},
      {"e6", "s", host(d.s2), LatencyFunction::linear(1)},
      {"e7", host(d.t1), "u", LatencyFunction::linear(1)},
      {"e8", "u", "t", LatencyFunction::linear(1)},
      {"e9", host(d.t2), "t", LatencyFunction::linear(1)},
  };

  DCopyRef copy;
  copy.prefix = "D.";
  copy.s1 = host(d.s1);
  copy.s2 = host(d.s2);
  copy.t1 = host(d.t1);
  copy.t2 = host(d.t2);

  std::vector<EdgeDef> edges;
  std::map<std::string, int> node_index;
  for (std::size_t i = 0; i < nodes.size(); ++i) node_index[nodes[i]] = static_cast<int>(i);
  for (auto& [id, tail, head, lat] : defs) {
    edges.push_back({id, node_index.at(tail), node_index.at(head), lat});
    gap.external_edges[id] = id;
  }
  for (const auto& [id, tail, head] : d.network.edges) {
    edges.push_back({"D." + id, node_index.at(host(tail)), node_index.at(host(head)),
                     LatencyFunction::linear(eps)});
    copy.edge_ids.push_back("D." + id);
  }
  gap.d_copies.push_back(copy);
  gap.instance = make_instance(nodes, "s", "t", std::move(edges), rate, to_metadata(gap));
  return gap;
}

namespace {

// Clones `gap` into a host network: nodes renamed through `rename`, edge ids
// prefixed, latencies scaled. The recursive bookkeeping (external edges,
// D copies, edgeworks) is renamed along.
GapNetwork transplant(const GapNetwork& gap, const std::string& prefix,
                      const std::function<std::string(const std::string&)>& rename,
                      const Rational& latency_scale) {
  GapNetwork out;
  out.gamma1 = gap.gamma1;
  out.gamma2 = gap.gamma2;
  out.level = gap.level;
  out.eps = gap.eps;
  const RoutingInstance& g = *gap.instance;
  std::vector<std::string> nodes;
  for (const auto& n : g.nodes) nodes.push_back(rename(n));
  std::vector<EdgeDef> edges;
  for (const auto& e : g.edges) {
    LatencyFunction lat = latency_scale == 1 ? e.latency : e.latency.scaled(latency_scale);
    edges.push_back({prefix + e.id, e.tail, e.head, lat});
  }
  for (const auto& [key, value] : gap.external_edges)
    out.external_edges[key] = prefix + value;
  for (const auto& c : gap.d_copies) {
    DCopyRef copy;
    copy.prefix = prefix + c.prefix;
    copy.s1 = rename(c.s1);
    copy.s2 = rename(c.s2);
    copy.t1 = rename(c.t1);
    copy.t2 = rename(c.t2);
    for (const auto& id : c.edge_ids) copy.edge_ids.push_back(prefix + id);
    out.d_copies.push_back(copy);
  }
  out.instance = make_instance(nodes, rename(g.nodes[g.source]), rename(g.nodes[g.sink]),
                               std::move(edges), g.rate, to_metadata(out));
  for (const auto& [idx, sub] : gap.edgeworks) {
    auto sub_clone =
        std::make_shared<GapNetwork>(transplant(*sub, prefix, rename, latency_scale));
    out.edgeworks.emplace_back(idx, sub_clone);
  }
  return out;
}

}  // namespace

GapNetwork amplify_gap(const TwoDDPInstance& d, const GapNetwork& gap, const Rational& eps) {
  if (eps <= 0 || eps >= 1 / (4 * gap.gamma1))
    fail(ErrorKind::Domain, "amplification requires eps in (0, 1/(4*gamma1))");

  GapNetwork out;
  out.gamma1 = 4 * gap.gamma1;
  out.gamma2 = 3 * gap.gamma2;
  out.level = gap.level + 1;
  out.eps = eps;

  auto host = [](const std::string& n) { return "D." + n; };
  // endpoint terminals of each edgework
  std::map<int, std::pair<std::string, std::string>> ends = {
      {1, {"s", "u"}},          {3, {"v", "t"}},          {4, {"s", "v"}},
      {5, {"v", host(d.s1)}},   {6, {"s", host(d.s2)}},   {7, {host(d.t1), "u"}},
      {8, {"u", "t"}},          {9, {host(d.t2), "t"}},
  };

  std::vector<std::string> nodes{"s", "t", "u", "v"};
  std::set<std::string> node_set(nodes.begin(), nodes.end());
  for (const auto& n : d.network.nodes) {
    nodes.push_back(host(n));
    node_set.insert(host(n));
  }

  std::vector<EdgeDef> edges;
  std::map<std::string, int> node_index;
  auto intern = [&](const std::string& n) {
    auto it = node_index.find(n);
    if (it != node_index.end()) return it->second;
    if (!node_set.count(n)) {
      nodes.push_back(n);
      node_set.insert(n);
    }
    int idx = -1;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] == n) idx = static_cast<int>(i);
    node_index[n] = idx;
    return idx;
  };
  for (const auto& n : nodes) intern(n);

  const std::string gap_s = gap.instance->nodes[gap.instance->source];
  const std::string gap_t = gap.instance->nodes[gap.instance->sink];

  for (int idx : {1, 3, 4, 5, 6, 7, 8, 9}) {
    std::string prefix = "G" + std::to_string(idx) + ".";
    auto [from, to] = ends.at(idx);
    auto rename = [&, from, to, prefix](const std::string& n) {
      if (n == gap_s) return from;
      if (n == gap_t) return to;
      return prefix + n;
    };
    Rational scale = (idx == 1 || idx == 3) ? rat(1, 2) : Rational(1);
    auto sub = std::make_shared<GapNetwork>(transplant(gap, prefix, rename, scale));
    for (const auto& e : sub->instance->edges) {
      edges.push_back({e.id, intern(sub->instance->nodes[e.tail]),
                       intern(sub->instance->nodes[e.head]), e.latency});
    }
    out.edgeworks.emplace_back(idx, sub);
    out.external_edges["e" + std::to_string(idx)] = "G" + std::to_string(idx);
    for (const auto& c : sub->d_copies) out.d_copies.push_back(c);
  }

  edges.push_back({"e2", intern("u"), intern("v"), LatencyFunction::linear(eps)});
  out.external_edges["e2"] = "e2";

  DCopyRef copy;
  copy.prefix = "D.";
  copy.s1 = host(d.s1);
  copy.s2 = host(d.s2);
  copy.t1 = host(d.t1);
  copy.t2 = host(d.t2);
  for (const auto& [id, tail, head] : d.network.edges) {
    edges.push_back({"D." + id, intern(host(tail)), intern(host(head)),
                     LatencyFunction::linear(eps)});
    copy.edge_ids.push_back("D." + id);
  }
  // the top-level copy is the first entry by convention
  out.d_copies.insert(out.d_copies.begin(), copy);

  out.instance = make_instance(nodes, "s", "t", std::move(edges), gap.instance->rate,
                               to_metadata(out));
  return out;
}

Rational saturation_rate(const InstancePtr& subedgework, const Rational& target_cost) {
  if (target_cost <= 0) fail(ErrorKind::Domain, "target cost must be positive");
  InstancePtr unit = make_instance(subedgework->nodes,
                                   subedgework->nodes[subedgework->source],
                                   subedgework->nodes[subedgework->sink],
                                   subedgework->edges, Rational(1), subedgework->gadget);
  Rational b1 = worst_nash_flow(unit).cost;
  if (b1 == 0) fail(ErrorKind::Structure, "degenerate instance: B(H, 1) = 0");
  return target_cost / b1;
}

// ---------------------------------------------------------------------------
// witness flows
// ---------------------------------------------------------------------------

namespace {

using PathFlowList = std::vector<std::pair<EdgePath, Rational>>;

// consumes `amount` worth of sub-paths from a queue, splitting the head
struct SegmentQueue {
  std::deque<std::pair<EdgePath, Rational>> items;

  PathFlowList draw(const Rational& amount) {
    PathFlowList taken;
    Rational remaining = amount;
    while (remaining > 0) {
      if (items.empty()) fail(ErrorKind::Internal, "edgework flow exhausted early");
      auto& [path, avail] = items.front();
      Rational take = std::min(avail, remaining);
      taken.emplace_back(path, take);
      avail -= take;
      remaining -= take;
      if (avail == 0) items.pop_front();
    }
    return taken;
  }
};

struct Segment {
  bool fixed = true;
  EdgePath edge_ids;   // fixed segments
  int edgework = -1;   // queue key otherwise
};

// Composes a route of the given rate out of fixed edges and edgework
// traversals, drawing sub-paths from the per-edgework queues.
PathFlowList compose_route(const std::vector<Segment>& segments, const Rational& rate,
                           std::map<int, SegmentQueue>& queues) {
  PathFlowList assembled{{EdgePath{}, rate}};
  for (const auto& seg : segments) {
    if (seg.fixed) {
      for (auto& [path, amount] : assembled)
        path.insert(path.end(), seg.edge_ids.begin(), seg.edge_ids.end());
      continue;
    }
    PathFlowList next;
    for (auto& [path, amount] : assembled) {
      for (auto& [sub_path, sub_amount] : queues.at(seg.edgework).draw(amount)) {
        EdgePath combined = path;
        combined.insert(combined.end(), sub_path.begin(), sub_path.end());
        next.emplace_back(std::move(combined), sub_amount);
      }
    }
    assembled = std::move(next);
  }
  return assembled;
}

EdgePath map_d_path(const GapNetwork& gap, const std::vector<std::string>& d_edge_ids) {
  EdgePath mapped;
  for (const auto& id : d_edge_ids) mapped.push_back(gap.d_copies.front().prefix + id);
  return mapped;
}

PathFlowList role_paths(const TwoDDPInstance& d, const GapNetwork& gap, WitnessRole role,
                        const Rational& r, const TwoDDPVerdict& verdict);

SegmentQueue queue_for(const TwoDDPInstance& d, const GapNetwork& gap, int edgework,
                       WitnessRole role, const Rational& rate,
                       const TwoDDPVerdict& verdict) {
  for (const auto& [idx, sub] : gap.edgeworks)
    if (idx == edgework) {
      SegmentQueue q;
      for (auto& item : role_paths(d, *sub, role, rate, verdict)) q.items.push_back(item);
      return q;
    }
  fail(ErrorKind::Internal, "missing edgework " + std::to_string(edgework));
}

// The gadget analysis flows as path lists (source-to-sink of gap.instance).
PathFlowList role_paths(const TwoDDPInstance& d, const GapNetwork& gap, WitnessRole role,
                        const Rational& r, const TwoDDPVerdict& verdict) {
  if (r == 0) return {};
  const Rational q4 = r / 4, q2 = r / 2, q3 = r / 3;
  if (gap.level == 0) {
    auto ext = [&](const std::string& key) { return gap.external_edges.at(key); };
    auto join = [&](std::initializer_list<std::string> pre, const EdgePath& mid,
                    std::initializer_list<std::string> post) {
      EdgePath p;
      for (const auto& k : pre) p.push_back(ext(k));
      p.insert(p.end(), mid.begin(), mid.end());
      for (const auto& k : post) p.push_back(ext(k));
      return p;
    };
    EdgePath cross_p = map_d_path(gap, d.cross_path_s1_t2);
    EdgePath cross_q = map_d_path(gap, d.cross_path_s2_t1);
    switch (role) {
      case WitnessRole::Optimal:
        return {{join({"e4", "e5"}, cross_p, {"e9"}), q4},
                {join({"e6"}, cross_q, {"e7", "e8"}), q4},
                {join({"e1", "e2", "e3"}, {}, {}), q2}};
      case WitnessRole::GoodEquilibrium: {
        EdgePath p_hat = map_d_path(gap, verdict.path_s1_t1);
        EdgePath q_hat = map_d_path(gap, verdict.path_s2_t2);
        return {{join({"e4", "e5"}, p_hat, {"e7", "e8"}), q4},
                {join({"e6"}, q_hat, {"e9"}), q4},
                {join({"e1", "e2", "e3"}, {}, {}), q2}};
      }
      case WitnessRole::BadEquilibrium:
        return {{join({"e1", "e2", "e3"}, {}, {}), q3},
                {join({"e1", "e2", "e5"}, cross_p, {"e9"}), q3},
                {join({"e6"}, cross_q, {"e7", "e2", "e3"}), q3}};
    }
    fail(ErrorKind::Internal, "unreachable witness role");
  }

  // level >= 1: compose through the edgeworks
  auto fixed = [&](std::initializer_list<std::string> ids) {
    Segment s;
    s.fixed = true;
    for (const auto& id : ids) s.edge_ids.push_back(id);
    return s;
  };
  auto work = [&](int idx) {
    Segment s;
    s.fixed = false;
    s.edgework = idx;
    return s;
  };
  const std::string e2 = gap.external_edges.at("e2");
  EdgePath cross_p = map_d_path(gap, d.cross_path_s1_t2);
  EdgePath cross_q = map_d_path(gap, d.cross_path_s2_t1);
  auto d_seg = [&](const EdgePath& ids) {
    Segment s;
    s.fixed = true;
    s.edge_ids = ids;
    return s;
  };

  std::map<int, SegmentQueue> queues;
  switch (role) {
    case WitnessRole::Optimal: {
      for (int idx : {4, 5, 9, 6, 7, 8})
        queues[idx] = queue_for(d, gap, idx, WitnessRole::Optimal, q4, verdict);
      for (int idx : {1, 3})
        queues[idx] = queue_for(d, gap, idx, WitnessRole::Optimal, q2, verdict);
      PathFlowList all;
      for (auto& item : compose_route({work(4), work(5), d_seg(cross_p), work(9)}, q4, queues))
        all.push_back(item);
      for (auto& item : compose_route({work(6), d_seg(cross_q), work(7), work(8)}, q4, queues))
        all.push_back(item);
      for (auto& item : compose_route({work(1), fixed({e2}), work(3)}, q2, queues))
        all.push_back(item);
      return all;
    }
    case WitnessRole::GoodEquilibrium: {
      EdgePath p_hat = map_d_path(gap, verdict.path_s1_t1);
      EdgePath q_hat = map_d_path(gap, verdict.path_s2_t2);
      for (int idx : {4, 5, 7, 8, 6, 9})
        queues[idx] = queue_for(d, gap, idx, WitnessRole::GoodEquilibrium, q4, verdict);
      for (int idx : {1, 3})
        queues[idx] = queue_for(d, gap, idx, WitnessRole::GoodEquilibrium, q2, verdict);
      PathFlowList all;
      for (auto& item :
           compose_route({work(4), work(5), d_seg(p_hat), work(7), work(8)}, q4, queues))
        all.push_back(item);
      for (auto& item : compose_route({work(6), d_seg(q_hat), work(9)}, q4, queues))
        all.push_back(item);
      for (auto& item : compose_route({work(1), fixed({e2}), work(3)}, q2, queues))
        all.push_back(item);
      return all;
    }
    case WitnessRole::BadEquilibrium: {
      for (int idx : {5, 6, 7, 9})
        queues[idx] = queue_for(d, gap, idx, WitnessRole::BadEquilibrium, q3, verdict);
      for (int idx : {1, 3})
        queues[idx] = queue_for(d, gap, idx, WitnessRole::BadEquilibrium, 2 * q3, verdict);
      PathFlowList all;
      for (auto& item : compose_route({work(1), fixed({e2}), work(3)}, q3, queues))
        all.push_back(item);
      for (auto& item :
           compose_route({work(1), fixed({e2}), work(5), d_seg(cross_p), work(9)}, q3, queues))
        all.push_back(item);
      for (auto& item :
           compose_route({work(6), d_seg(cross_q), work(7), fixed({e2}), work(3)}, q3, queues))
        all.push_back(item);
      return all;
    }
  }
  fail(ErrorKind::Internal, "unreachable witness role");
}

std::vector<std::string> all_instance_edges(const RoutingInstance& g) {
  std::vector<std::string> ids;
  for (const auto& e : g.edges) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::optional<std::vector<std::string>> good_subnetwork_edges(const TwoDDPInstance& d,
                                                              const GapNetwork& gap) {
  TwoDDPVerdict verdict = classify_2ddp(d);
  if (!verdict.yes) return std::nullopt;
  std::set<std::string> edges;
  std::function<void(const GapNetwork&)> collect = [&](const GapNetwork& g) {
    if (g.level == 0) {
      for (const auto& [key, id] : g.external_edges) edges.insert(id);
      for (const auto& id : verdict.path_s1_t1)
        edges.insert(g.d_copies.front().prefix + id);
      for (const auto& id : verdict.path_s2_t2)
        edges.insert(g.d_copies.front().prefix + id);
      return;
    }
    edges.insert(g.external_edges.at("e2"));
    for (const auto& id : verdict.path_s1_t1) edges.insert(g.d_copies.front().prefix + id);
    for (const auto& id : verdict.path_s2_t2) edges.insert(g.d_copies.front().prefix + id);
    for (const auto& [idx, sub] : g.edgeworks) collect(*sub);
  };
  collect(gap);
  return std::vector<std::string>(edges.begin(), edges.end());
}

std::vector<WitnessFlow> build_witness_flows(const TwoDDPInstance& d, const GapNetwork& gap,
                                             const Rational& r) {
  InstancePtr host = gap.instance;
  if (host->rate != r) {
    host = make_instance(host->nodes, host->nodes[host->source], host->nodes[host->sink],
                         host->edges, r, host->gadget);
  }
  TwoDDPVerdict verdict = classify_2ddp(d);
  std::vector<WitnessFlow> result;

  auto emit = [&](WitnessRole role, const std::vector<std::string>& sub,
                  const Rational& expected) {
    WitnessFlow w;
    w.role = role;
    w.flow = make_flow(host, role_paths(d, gap, role, r, verdict));
    w.subnetwork = sub;
    w.expected_cost = expected;
    result.push_back(std::move(w));
  };

  std::vector<std::string> full = all_instance_edges(*host);
  emit(WitnessRole::Optimal, full, r / gap.gamma1);
  if (verdict.yes) {
    auto good = good_subnetwork_edges(d, gap);
    emit(WitnessRole::GoodEquilibrium, *good, r / gap.gamma1);
  }
  emit(WitnessRole::BadEquilibrium, full, r / gap.gamma2);
  return result;
}

bool contains_good_d_copy(const TwoDDPInstance& d, const RoutingInstance& instance,
                          const std::vector<std::string>& edge_ids) {
  if (!instance.gadget) fail(ErrorKind::Structure, "instance has no gadget metadata");
  std::set<std::string> present(edge_ids.begin(), edge_ids.end());
  for (const auto& copy : instance.gadget->d_copies) {
    std::vector<std::string> original;
    for (const auto& host_id : copy.edge_ids) {
      if (!present.count(host_id)) continue;
      original.push_back(host_id.substr(copy.prefix.size()));
    }
    if (is_good_subnetwork(d, original)) return true;
  }
  return false;
}

}  // namespace braess
