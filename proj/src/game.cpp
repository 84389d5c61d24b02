#include "braess/game.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "braess/errors.hpp"
#include "braess/topology.hpp"

namespace braess {

namespace {

void check_monotone_table(const std::vector<std::pair<Rational, Rational>>& table,
                          const Rational& xi) {
  if (table.empty()) fail(ErrorKind::Domain, "monotone latency needs a non-empty table");
  if (table.front().first != 0)
    fail(ErrorKind::Domain, "monotone latency table must start at load 0");
  if (xi <= 0) fail(ErrorKind::Domain, "Lipschitz constant must be positive");
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const auto& [x0, y0] = table[i];
    const auto& [x1, y1] = table[i + 1];
    if (x1 <= x0) fail(ErrorKind::Domain, "monotone latency loads must strictly increase");
    if (y1 < y0) fail(ErrorKind::Domain, "monotone latency costs must be non-decreasing");
    if (y1 - y0 > xi * (x1 - x0))
      fail(ErrorKind::Domain, "monotone latency violates its Lipschitz constant");
  }
  if (table.front().second < 0) fail(ErrorKind::Domain, "latency costs must be non-negative");
}

}  // namespace

LatencyFunction LatencyFunction::linear(const Rational& slope) {
  if (slope <= 0) fail(ErrorKind::Domain, "linear latency requires slope > 0");
  LatencyFunction f;
  f.kind = LatencyKind::Linear;
  f.a = slope;
  f.b = 0;
  f.xi = slope;
  return f;
}

LatencyFunction LatencyFunction::affine(const Rational& slope, const Rational& intercept) {
  if (slope < 0 || intercept < 0)
    fail(ErrorKind::Domain, "affine latency requires a, b >= 0");
  LatencyFunction f;
  f.kind = LatencyKind::Affine;
  f.a = slope;
  f.b = intercept;
  f.xi = slope > 0 ? slope : Rational(1);
  return f;
}

LatencyFunction LatencyFunction::monotone(std::vector<std::pair<Rational, Rational>> table,
                                          const Rational& xi) {
  check_monotone_table(table, xi);
  LatencyFunction f;
  f.kind = LatencyKind::GeneralMonotone;
  f.table = std::move(table);
  f.xi = xi;
  f.a = 0;
  f.b = 0;
  return f;
}

Rational LatencyFunction::domain_max() const {
  if (kind != LatencyKind::GeneralMonotone) return Rational(0);
  return table.back().first;
}

Rational LatencyFunction::eval(const Rational& x) const {
  if (x < 0) fail(ErrorKind::Domain, "latency evaluated at negative load");
  switch (kind) {
    case LatencyKind::Linear:
      return a * x;
    case LatencyKind::Affine:
      return a * x + b;
    case LatencyKind::GeneralMonotone: {
      if (x > table.back().first)
        fail(ErrorKind::Domain, "latency evaluated outside its load domain");
      for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const auto& [x0, y0] = table[i];
        const auto& [x1, y1] = table[i + 1];
        if (x <= x1) return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
      }
      return table.back().second;
    }
  }
  fail(ErrorKind::Internal, "unreachable latency kind");
}

Rational LatencyFunction::inverse_cap(const Rational& lambda, const Rational& clamp) const {
  if (lambda < 0) return Rational(0);
  switch (kind) {
    case LatencyKind::Linear: {
      Rational cap = lambda / a;
      return std::min(cap, clamp);
    }
    case LatencyKind::Affine: {
      if (lambda < b) return Rational(0);
      if (a == 0) return clamp;
      Rational cap = (lambda - b) / a;
      return std::min(cap, clamp);
    }
    case LatencyKind::GeneralMonotone: {
      if (table.front().second > lambda) return Rational(0);
      Rational best = 0;
      for (std::size_t i = 0; i + 1 < table.size(); ++i) {
        const auto& [x0, y0] = table[i];
        const auto& [x1, y1] = table[i + 1];
        if (y1 <= lambda) {
          best = x1;
          continue;
        }
        if (y0 <= lambda && y1 > y0)
          best = std::max(best, Rational((lambda - y0) * (x1 - x0) / (y1 - y0) + x0));
        break;
      }
      if (table.back().second <= lambda) best = table.back().first;
      return std::min(best, clamp);
    }
  }
  fail(ErrorKind::Internal, "unreachable latency kind");
}

LatencyFunction LatencyFunction::scaled(const Rational& alpha) const {
  LatencyFunction f = *this;
  f.a *= alpha;
  f.b *= alpha;
  f.xi *= alpha;
  for (auto& [x, y] : f.table) y *= alpha;
  return f;
}

LatencyFunction LatencyFunction::rate_compressed(const Rational& rate) const {
  LatencyFunction f = *this;
  f.a *= rate;
  f.xi *= rate;
  for (auto& [x, y] : f.table) x /= rate;
  return f;
}

int RoutingInstance::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return static_cast<int>(i);
  return -1;
}

int RoutingInstance::edge_index(const std::string& id) const {
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return static_cast<int>(i);
  return -1;
}

const EdgeDef& RoutingInstance::edge(const std::string& id) const {
  int i = edge_index(id);
  if (i < 0) fail(ErrorKind::Structure, "unknown edge id: " + id);
  return edges[i];
}

InstancePtr make_instance(std::vector<std::string> nodes, const std::string& source,
                          const std::string& sink, std::vector<EdgeDef> edges,
                          const Rational& rate, std::optional<GadgetMetadata> gadget) {
  auto inst = std::make_shared<RoutingInstance>();
  inst->nodes = std::move(nodes);
  {
    std::set<std::string> seen;
    for (const auto& n : inst->nodes)
      if (!seen.insert(n).second) fail(ErrorKind::Structure, "duplicate node id: " + n);
  }
  inst->source = inst->node_index(source);
  inst->sink = inst->node_index(sink);
  if (inst->source < 0 || inst->sink < 0)
    fail(ErrorKind::Structure, "source/sink not among the nodes");
  if (inst->source == inst->sink) fail(ErrorKind::Structure, "source equals sink");
  // rate 0 is admitted as the degenerate zero-flow case
  if (rate < 0) fail(ErrorKind::Domain, "traffic rate must be non-negative");
  inst->rate = rate;
  inst->edges = std::move(edges);
  inst->gadget = std::move(gadget);

  std::set<std::string> ids;
  for (const auto& e : inst->edges) {
    if (!ids.insert(e.id).second) fail(ErrorKind::Structure, "duplicate edge id: " + e.id);
    if (e.tail < 0 || e.head < 0 || e.tail >= static_cast<int>(inst->nodes.size()) ||
        e.head >= static_cast<int>(inst->nodes.size()))
      fail(ErrorKind::Structure, "edge endpoint out of range: " + e.id);
    if (e.tail == e.head) fail(ErrorKind::Structure, "self-loop: " + e.id);
    if (e.latency.kind == LatencyKind::GeneralMonotone &&
        e.latency.domain_max() < inst->rate)
      fail(ErrorKind::Domain, "latency table of " + e.id + " does not cover [0, r]");
  }

  inst->out_edges.assign(inst->nodes.size(), {});
  inst->in_edges.assign(inst->nodes.size(), {});
  for (std::size_t i = 0; i < inst->edges.size(); ++i) {
    inst->out_edges[inst->edges[i].tail].push_back(static_cast<int>(i));
    inst->in_edges[inst->edges[i].head].push_back(static_cast<int>(i));
  }
  // deterministic adjacency: edges in id order
  auto by_id = [&](int x, int y) { return inst->edges[x].id < inst->edges[y].id; };
  for (auto& v : inst->out_edges) std::sort(v.begin(), v.end(), by_id);
  for (auto& v : inst->in_edges) std::sort(v.begin(), v.end(), by_id);

  std::vector<std::string> all_ids;
  for (const auto& e : inst->edges) all_ids.push_back(e.id);
  if (!has_st_path(*inst, all_ids)) fail(ErrorKind::Structure, "no s-t path in the network");
  return inst;
}

bool has_st_path(const RoutingInstance& instance, const std::vector<std::string>& edge_ids) {
  std::set<std::string> allowed(edge_ids.begin(), edge_ids.end());
  std::vector<char> visited(instance.nodes.size(), 0);
  std::deque<int> queue{instance.source};
  visited[instance.source] = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == instance.sink) return true;
    for (int ei : instance.out_edges[u]) {
      if (!allowed.count(instance.edges[ei].id)) continue;
      int v = instance.edges[ei].head;
      if (!visited[v]) {
        visited[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return false;
}

InstancePtr subnetwork(const InstancePtr& base, const std::vector<std::string>& edge_ids) {
  if (!has_st_path(*base, edge_ids)) return nullptr;
  std::set<std::string> keep(edge_ids.begin(), edge_ids.end());
  std::vector<EdgeDef> edges;
  for (const auto& e : base->edges)
    if (keep.count(e.id)) edges.push_back(e);
  return make_instance(base->nodes, base->nodes[base->source], base->nodes[base->sink],
                       std::move(edges), base->rate, base->gadget);
}

namespace {

// Validates that `path` is a simple s-t path of `instance` (chained edges,
// no repeated vertices).
void check_simple_st_path(const RoutingInstance& instance, const EdgePath& path) {
  if (path.empty()) fail(ErrorKind::Feasibility, "empty path in flow");
  int current = instance.source;
  std::set<int> seen{current};
  for (const auto& id : path) {
    int ei = instance.edge_index(id);
    if (ei < 0) fail(ErrorKind::Feasibility, "flow path uses unknown edge: " + id);
    const EdgeDef& e = instance.edges[ei];
    if (e.tail != current)
      fail(ErrorKind::Feasibility, "flow path is not connected at edge: " + id);
    current = e.head;
    if (!seen.insert(current).second)
      fail(ErrorKind::Feasibility, "flow path revisits a vertex at edge: " + id);
  }
  if (current != instance.sink) fail(ErrorKind::Feasibility, "flow path does not end at t");
}

}  // namespace

Flow make_flow(const InstancePtr& instance,
               std::vector<std::pair<EdgePath, Rational>> path_flows) {
  std::map<EdgePath, Rational> merged;
  Rational total = 0;
  for (auto& [path, amount] : path_flows) {
    if (amount < 0) fail(ErrorKind::Feasibility, "negative path flow");
    if (amount == 0) continue;
    check_simple_st_path(*instance, path);
    merged[path] += amount;
    total += amount;
  }
  if (total != instance->rate)
    fail(ErrorKind::Feasibility,
         "path flows sum to " + rat_str(total) + ", expected " + rat_str(instance->rate));
  Flow flow;
  flow.instance = instance;
  flow.path_flows.assign(merged.begin(), merged.end());
  return flow;
}

std::map<std::string, Rational> edge_loads(const Flow& flow) {
  std::map<std::string, Rational> loads;
  for (const auto& e : flow.instance->edges) loads[e.id] = 0;
  for (const auto& [path, amount] : flow.path_flows)
    for (const auto& id : path) loads[id] += amount;
  return loads;
}

Rational path_bottleneck(const RoutingInstance&, const EdgePath& path,
                         const std::map<std::string, Rational>& edge_cost) {
  Rational best = 0;
  for (const auto& id : path) best = std::max(best, edge_cost.at(id));
  return best;
}

CostReport bottleneck_cost(const Flow& flow) {
  CostReport report;
  auto loads = edge_loads(flow);
  for (const auto& e : flow.instance->edges)
    report.edge_latencies[e.id] = e.latency.eval(loads.at(e.id));
  for (const auto& [path, amount] : flow.path_flows) {
    Rational b = path_bottleneck(*flow.instance, path, report.edge_latencies);
    report.path_bottlenecks.emplace_back(path, b);
    report.bottleneck = std::max(report.bottleneck, b);
  }
  return report;
}

InstancePtr scale_latencies(const InstancePtr& instance, const Rational& alpha) {
  if (alpha <= 0) fail(ErrorKind::Domain, "scaling factor must be positive");
  std::vector<EdgeDef> edges = instance->edges;
  for (auto& e : edges) e.latency = e.latency.scaled(alpha);
  return make_instance(instance->nodes, instance->nodes[instance->source],
                       instance->nodes[instance->sink], std::move(edges), instance->rate,
                       instance->gadget);
}

InstancePtr normalize_rate(const InstancePtr& instance) {
  if (instance->rate <= 0) fail(ErrorKind::Domain, "rate normalization requires r > 0");
  if (instance->rate == 1) return instance;
  std::vector<EdgeDef> edges = instance->edges;
  for (auto& e : edges) e.latency = e.latency.rate_compressed(instance->rate);
  return make_instance(instance->nodes, instance->nodes[instance->source],
                       instance->nodes[instance->sink], std::move(edges), Rational(1),
                       instance->gadget);
}

bool is_eps_nash(const Flow& flow, const Rational& eps) {
  if (eps < 0) fail(ErrorKind::Domain, "eps must be non-negative");
  if (flow.path_flows.empty()) return true;
  CostReport report = bottleneck_cost(flow);
  Rational used_max = 0;
  for (const auto& [path, b] : report.path_bottlenecks) used_max = std::max(used_max, b);
  PathSet universe = enumerate_paths(*flow.instance);
  for (const auto& path : universe.paths) {
    Rational b = path_bottleneck(*flow.instance, path, report.edge_latencies);
    if (used_max > b + eps) return false;
  }
  return true;
}

}  // namespace braess
